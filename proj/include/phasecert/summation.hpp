#pragma once

#include <cmath>

namespace phasecert
{

/// Neumaier's compensated summation.
class NeumaierSum
{
  public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    NeumaierSum& operator+=(double x)
    {
        add(x);
        return *this;
    }

    NeumaierSum& operator+=(const NeumaierSum& other)
    {
        add(other.sum_);
        add(other.comp_);
        return *this;
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace phasecert

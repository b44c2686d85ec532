#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace phasecert
{

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Operand outside the documented domain of an operation.
class InvalidArgument : public Error
{
  public:
    using Error::Error;
};

/// Exact enumeration refused because the instance exceeds the configured cap.
class CapExceeded : public Error
{
  public:
    CapExceeded(std::string what, std::size_t size, std::size_t cap)
        : Error(std::move(what)), size_(size), cap_(cap)
    {
    }
    std::size_t size() const { return size_; }
    std::size_t cap() const { return cap_; }

  private:
    std::size_t size_;
    std::size_t cap_;
};

/// The monotone function never reaches the target level on the bracket.
class NoRoot : public Error
{
  public:
    using Error::Error;
};

/// Log-linear fit impossible; carries the abscissae that had to be dropped.
class DegenerateFit : public Error
{
  public:
    DegenerateFit(std::string what, std::vector<double> dropped)
        : Error(std::move(what)), dropped_(std::move(dropped))
    {
    }
    const std::vector<double>& dropped() const { return dropped_; }

  private:
    std::vector<double> dropped_;
};

/// No positive-multiplicity path joins the two sources of a current.
class NoPath : public Error
{
  public:
    using Error::Error;
};

/// Enumeration state space larger than the hard guard.
class StateSpaceOverflow : public Error
{
  public:
    using Error::Error;
};

} // namespace phasecert

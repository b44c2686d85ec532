#include "phasecert/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "phasecert/errors.hpp"
#include "phasecert/summation.hpp"

namespace phasecert
{

double ordered_mean(std::span<const double> series)
{
    if (series.empty())
        return 0.0;
    NeumaierSum s;
    for (double v : series)
        s += v;
    return s.value() / static_cast<double>(series.size());
}

MCEstimate binomial_estimate(std::span<const double> indicators, std::uint64_t seed, std::string observable)
{
    MCEstimate e;
    e.samples = indicators.size();
    e.seed = seed;
    e.observable = std::move(observable);
    e.mean = ordered_mean(indicators);
    if (e.samples > 0)
        e.std_error = std::sqrt(std::max(0.0, e.mean * (1.0 - e.mean)) / static_cast<double>(e.samples));
    return e;
}

MCEstimate batch_mean_estimate(std::span<const double> series, std::uint64_t seed, std::string observable,
                               std::size_t batches)
{
    MCEstimate e;
    e.samples = series.size();
    e.seed = seed;
    e.observable = std::move(observable);
    e.mean = ordered_mean(series);
    const std::size_t n = series.size();
    batches = std::min(batches, n);
    if (batches < 2)
        return e;
    const std::size_t len = n / batches;
    std::vector<double> means;
    means.reserve(batches);
    for (std::size_t b = 0; b < batches; ++b)
        means.push_back(ordered_mean(series.subspan(b * len, len)));
    const double m = ordered_mean(means);
    NeumaierSum ss;
    for (double v : means)
        ss += (v - m) * (v - m);
    const double var = ss.value() / static_cast<double>(batches - 1);
    e.std_error = std::sqrt(var / static_cast<double>(batches));
    return e;
}

double wilson_upper(double proportion, double n, double z)
{
    if (n <= 0.0)
        return 1.0;
    const double p = std::clamp(proportion, 0.0, 1.0);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return std::min(1.0, (centre + half) / denom);
}

double integrated_autocorrelation_time(std::span<const double> series)
{
    const std::size_t n = series.size();
    if (n < 4)
        return 0.5;
    const double m = ordered_mean(series);
    double c0 = 0.0;
    for (double v : series)
        c0 += (v - m) * (v - m);
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0)
        return 0.5;
    double tau = 0.5;
    for (std::size_t t = 1; t < n / 2; ++t)
    {
        double ct = 0.0;
        for (std::size_t i = 0; i + t < n; ++i)
            ct += (series[i] - m) * (series[i + t] - m);
        ct /= static_cast<double>(n - t);
        tau += ct / c0;
        if (static_cast<double>(t) >= 6.0 * tau)
            break;
    }
    return std::max(tau, 0.5);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidArgument("least squares needs at least two paired points");
    const double mx = ordered_mean(x);
    const double my = ordered_mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw InvalidArgument("least squares needs distinct abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

} // namespace phasecert

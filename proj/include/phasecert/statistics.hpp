#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace phasecert
{

/// Monte Carlo estimate of one observable.
struct MCEstimate
{
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string observable;
};

/// One-sided standard normal quantile for 99.9% confidence.
inline constexpr double kZ999 = 3.090232306167813;

/// Mean of a 0/1 series with the plug-in binomial standard error.
MCEstimate binomial_estimate(std::span<const double> indicators, std::uint64_t seed, std::string observable);

/// Mean with the batch-means standard error (at most `batches` equal batches).
MCEstimate batch_mean_estimate(std::span<const double> series, std::uint64_t seed, std::string observable,
                               std::size_t batches = 100);

/// Compensated mean of a series, summed in index order.
double ordered_mean(std::span<const double> series);

/// Wilson score upper bound for a proportion with n trials at normal quantile z.
double wilson_upper(double proportion, double n, double z = kZ999);

/// Integrated autocorrelation time with Sokal's automatic window (c = 6).
double integrated_autocorrelation_time(std::span<const double> series);

struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x; needs two distinct x values.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

} // namespace phasecert

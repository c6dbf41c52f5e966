#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairshare/rng.hpp"

namespace fairshare {

enum class DistFamily : std::uint8_t { Weibull, GeneralizedPareto, Lognormal };

const char* to_string(DistFamily f);
DistFamily dist_family_from_string(const std::string& name);

// A parameterized distribution from one of the three modeling families.
//   Weibull:            shape (alpha), scale (beta)
//   GeneralizedPareto:  shape (kappa), scale (sigma), location (mu)
//   Lognormal:          location = mean of logs (mu), scale = std of logs (sigma)
struct DistSpec {
    DistFamily family = DistFamily::Weibull;
    double shape = 1.0;
    double scale = 1.0;
    double location = 0.0;

    static DistSpec weibull(double shape, double scale);
    static DistSpec gen_pareto(double shape, double scale, double location);
    static DistSpec lognormal(double log_mean, double log_std);

    void validate() const;  // throws std::invalid_argument on bad parameters
};

struct GofReport {
    double ks = 0.0;    // Kolmogorov-Smirnov sup distance, in [0,1]
    double ad = 0.0;    // Anderson-Darling A^2
    double chi2 = 0.0;  // chi-squared over equal-probability bins
    std::size_t chi2_bins = 0;
};

// Inverse standard normal CDF (Acklam's rational approximation,
// relative error below 1.2e-9). Domain (0,1).
double inverse_normal_cdf(double p);

// Inverse CDF. u must lie in [0,1).
double quantile(const DistSpec& spec, double u);

// Analytic CDF. Values below the support map to 0.
double cdf(const DistSpec& spec, double x);

double sample(const DistSpec& spec, RngStream& rng);

// Maximum-likelihood / moment fit of `family` to `samples`.
// Requires at least 30 samples with nonzero spread.
DistSpec fit(DistFamily family, std::span<const double> samples);

// KS / AD / chi2 statistics of `samples` against `spec` (>= 30 samples).
GofReport gof(std::span<const double> samples, const DistSpec& spec);

// Probability-probability points: for the i-th order statistic x(i),
// ((i - 0.5)/n, cdf(spec, x(i))).
std::vector<std::pair<double, double>> pp_points(std::span<const double> samples,
                                                 const DistSpec& spec);

constexpr std::size_t kMinFitSamples = 30;

}  // namespace fairshare

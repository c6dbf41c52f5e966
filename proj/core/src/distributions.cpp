#include "fairshare/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fairshare {

const char* to_string(DistFamily f) {
    switch (f) {
        case DistFamily::Weibull: return "weibull";
        case DistFamily::GeneralizedPareto: return "genpareto";
        case DistFamily::Lognormal: return "lognormal";
    }
    return "?";
}

DistFamily dist_family_from_string(const std::string& name) {
    if (name == "weibull") return DistFamily::Weibull;
    if (name == "genpareto" || name == "generalized_pareto") return DistFamily::GeneralizedPareto;
    if (name == "lognormal") return DistFamily::Lognormal;
    throw std::invalid_argument("unknown distribution family: " + name +
                                " (expected weibull, genpareto or lognormal)");
}

DistSpec DistSpec::weibull(double shape, double scale) {
    DistSpec s{DistFamily::Weibull, shape, scale, 0.0};
    s.validate();
    return s;
}

DistSpec DistSpec::gen_pareto(double shape, double scale, double location) {
    DistSpec s{DistFamily::GeneralizedPareto, shape, scale, location};
    s.validate();
    return s;
}

DistSpec DistSpec::lognormal(double log_mean, double log_std) {
    DistSpec s{DistFamily::Lognormal, 0.0, log_std, log_mean};
    s.validate();
    return s;
}

void DistSpec::validate() const {
    switch (family) {
        case DistFamily::Weibull:
            if (!(shape > 0.0) || !(scale > 0.0)) {
                throw std::invalid_argument("weibull requires shape > 0 and scale > 0");
            }
            break;
        case DistFamily::GeneralizedPareto:
            if (!(scale > 0.0)) {
                throw std::invalid_argument("genpareto requires scale > 0");
            }
            break;
        case DistFamily::Lognormal:
            if (!(scale >= 0.0)) {
                throw std::invalid_argument("lognormal requires sigma >= 0");
            }
            break;
    }
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
    }

    // Acklam's coefficients.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    constexpr double p_low = 0.02425;
    constexpr double p_high = 1.0 - p_low;

    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > p_high) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double quantile(const DistSpec& spec, double u) {
    spec.validate();
    if (!(u >= 0.0 && u < 1.0)) {
        throw std::domain_error("quantile: u outside [0,1)");
    }
    switch (spec.family) {
        case DistFamily::Weibull:
            return spec.scale * std::pow(-std::log1p(-u), 1.0 / spec.shape);
        case DistFamily::GeneralizedPareto: {
            if (spec.shape == 0.0) {
                return spec.location - spec.scale * std::log1p(-u);
            }
            return spec.location +
                   spec.scale * (std::pow(1.0 - u, -spec.shape) - 1.0) / spec.shape;
        }
        case DistFamily::Lognormal: {
            if (u == 0.0) return 0.0;
            if (spec.scale == 0.0) return std::exp(spec.location);
            return std::exp(spec.location + spec.scale * inverse_normal_cdf(u));
        }
    }
    return 0.0;
}

double cdf(const DistSpec& spec, double x) {
    spec.validate();
    switch (spec.family) {
        case DistFamily::Weibull: {
            if (x <= 0.0) return 0.0;
            return -std::expm1(-std::pow(x / spec.scale, spec.shape));
        }
        case DistFamily::GeneralizedPareto: {
            double y = x - spec.location;
            if (y <= 0.0) return 0.0;
            if (spec.shape == 0.0) {
                return -std::expm1(-y / spec.scale);
            }
            double t = 1.0 + spec.shape * y / spec.scale;
            if (t <= 0.0) return 1.0;  // above the upper endpoint when shape < 0
            return 1.0 - std::pow(t, -1.0 / spec.shape);
        }
        case DistFamily::Lognormal: {
            if (x <= 0.0) return 0.0;
            if (spec.scale == 0.0) return x < std::exp(spec.location) ? 0.0 : 1.0;
            double z = (std::log(x) - spec.location) / spec.scale;
            return 0.5 * std::erfc(-z / std::numbers::sqrt2);
        }
    }
    return 0.0;
}

double sample(const DistSpec& spec, RngStream& rng) {
    return quantile(spec, rng.uniform01());
}

namespace {

void require_fit_samples(std::span<const double> samples) {
    if (samples.size() < kMinFitSamples) {
        throw std::invalid_argument("fit: need at least 30 samples");
    }
    double lo = samples[0], hi = samples[0];
    for (double x : samples) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(hi > lo)) {
        throw std::invalid_argument("fit: degenerate sample set (zero variance)");
    }
}

DistSpec fit_lognormal(std::span<const double> samples) {
    double sum = 0.0;
    for (double x : samples) {
        if (!(x > 0.0)) throw std::invalid_argument("fit: lognormal requires positive samples");
        sum += std::log(x);
    }
    double n = static_cast<double>(samples.size());
    double mu = sum / n;
    double ss = 0.0;
    for (double x : samples) {
        double d = std::log(x) - mu;
        ss += d * d;
    }
    // Population denominator, i.e. the plain MLE.
    double sigma = std::sqrt(ss / n);
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("fit: degenerate sample set (zero variance)");
    }
    return DistSpec::lognormal(mu, sigma);
}

DistSpec fit_weibull(std::span<const double> samples) {
    double mean_log = 0.0;
    for (double x : samples) {
        if (!(x > 0.0)) throw std::invalid_argument("fit: weibull requires positive samples");
        mean_log += std::log(x);
    }
    mean_log /= static_cast<double>(samples.size());

    // Profile likelihood equation for the shape:
    //   g(a) = sum(x^a ln x)/sum(x^a) - 1/a - mean(ln x) = 0,
    // monotone increasing in a, so bisection on a bracket is enough.
    auto g = [&](double a) {
        double sw = 0.0, swl = 0.0;
        for (double x : samples) {
            double w = std::pow(x, a);
            sw += w;
            swl += w * std::log(x);
        }
        return swl / sw - 1.0 / a - mean_log;
    };

    double lo = 1e-3, hi = 1.0;
    while (g(hi) < 0.0 && hi < 1e3) hi *= 2.0;
    if (g(lo) > 0.0 || g(hi) < 0.0) {
        throw std::invalid_argument("fit: weibull shape solve failed to bracket");
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    double shape = 0.5 * (lo + hi);

    double sw = 0.0;
    for (double x : samples) sw += std::pow(x, shape);
    double scale = std::pow(sw / static_cast<double>(samples.size()), 1.0 / shape);
    return DistSpec::weibull(shape, scale);
}

DistSpec fit_gen_pareto(std::span<const double> samples) {
    double mu = *std::min_element(samples.begin(), samples.end());

    std::vector<double> excess;
    excess.reserve(samples.size());
    double ymax = 0.0;
    for (double x : samples) {
        double y = x - mu;
        excess.push_back(y);
        ymax = std::max(ymax, y);
    }
    if (!(ymax > 0.0)) {
        throw std::invalid_argument("fit: degenerate sample set (zero variance)");
    }
    double n = static_cast<double>(excess.size());

    // Profile likelihood over tau = shape/scale. For a given tau,
    //   shape(tau) = mean(log1p(tau * y)),  scale = shape/tau,
    //   loglik(tau) = -n * (log(shape/tau) + shape + 1).
    auto profile = [&](double tau, double& shape_out) {
        double s = 0.0;
        for (double y : excess) {
            double t = 1.0 + tau * y;
            if (t <= 0.0) return -std::numeric_limits<double>::infinity();
        }
        for (double y : excess) s += std::log1p(tau * y);
        double shape = s / n;
        if (!(shape != 0.0)) return -std::numeric_limits<double>::infinity();
        shape_out = shape;
        return -n * (std::log(shape / tau) + shape + 1.0);
    };

    // Log-spaced scan over positive tau plus a scan over the admissible
    // negative range, then golden-section refinement around the best cell.
    double best_tau = 0.0, best_ll = -std::numeric_limits<double>::infinity();
    double sh = 0.0;
    std::vector<double> taus;
    for (int i = -120; i <= 120; ++i) {
        taus.push_back(std::pow(10.0, static_cast<double>(i) / 12.0) / ymax);
    }
    for (int i = 1; i < 64; ++i) {
        taus.push_back(-static_cast<double>(i) / 64.0 * 0.999 / ymax);
    }
    for (double tau : taus) {
        double ll = profile(tau, sh);
        if (ll > best_ll) {
            best_ll = ll;
            best_tau = tau;
        }
    }
    if (!std::isfinite(best_ll)) {
        throw std::invalid_argument("fit: genpareto likelihood degenerate");
    }

    double a = best_tau * 0.5, b = best_tau * 1.5;
    if (a > b) std::swap(a, b);
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double s1, s2;
    double f1 = profile(x1, s1), f2 = profile(x2, s2);
    for (int i = 0; i < 120; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = profile(x2, s2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = profile(x1, s1);
        }
    }
    double tau = 0.5 * (a + b);
    double ll = profile(tau, sh);
    if (ll < best_ll) {
        tau = best_tau;
        profile(tau, sh);
    }
    double shape = sh;
    double scale = shape / tau;
    return DistSpec::gen_pareto(shape, scale, mu);
}

}  // namespace

DistSpec fit(DistFamily family, std::span<const double> samples) {
    require_fit_samples(samples);
    switch (family) {
        case DistFamily::Weibull: return fit_weibull(samples);
        case DistFamily::GeneralizedPareto: return fit_gen_pareto(samples);
        case DistFamily::Lognormal: return fit_lognormal(samples);
    }
    throw std::logic_error("fit: unreachable");
}

GofReport gof(std::span<const double> samples, const DistSpec& spec) {
    if (samples.size() < kMinFitSamples) {
        throw std::invalid_argument("gof: need at least 30 samples");
    }
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    double dn = static_cast<double>(n);

    GofReport rep;

    // KS against the step empirical CDF: at each order statistic the
    // empirical function takes both (i-1)/n and i/n.
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = cdf(spec, xs[i]);
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / dn));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / dn - f));
    }
    rep.ks = ks;

    // Anderson-Darling A^2, with F clamped away from 0 and 1.
    constexpr double eps = 1e-300;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fi = std::clamp(cdf(spec, xs[i]), eps, 1.0 - 1e-16);
        double fj = std::clamp(cdf(spec, xs[n - 1 - i]), eps, 1.0 - 1e-16);
        s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(fi) + std::log1p(-fj));
    }
    rep.ad = std::max(0.0, -dn - s / dn);

    // Chi-squared over equal-probability bins.
    std::size_t k = static_cast<std::size_t>(std::ceil(2.0 * std::pow(dn, 0.4)));
    k = std::max<std::size_t>(k, 2);
    std::vector<double> edges(k - 1);
    for (std::size_t j = 1; j < k; ++j) {
        edges[j - 1] = quantile(spec, static_cast<double>(j) / static_cast<double>(k));
    }
    std::vector<std::size_t> counts(k, 0);
    for (double x : xs) {
        std::size_t bin = static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
        counts[bin]++;
    }
    double expected = dn / static_cast<double>(k);
    double chi2 = 0.0;
    for (std::size_t c : counts) {
        double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    rep.chi2 = chi2;
    rep.chi2_bins = k;
    return rep;
}

std::vector<std::pair<double, double>> pp_points(std::span<const double> samples,
                                                 const DistSpec& spec) {
    if (samples.empty()) {
        throw std::invalid_argument("pp_points: empty sample set");
    }
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    std::vector<std::pair<double, double>> pts;
    pts.reserve(xs.size());
    double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        pts.emplace_back((static_cast<double>(i) + 0.5) / n, cdf(spec, xs[i]));
    }
    return pts;
}

}  // namespace fairshare

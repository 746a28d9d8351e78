#pragma once

// Closed-form transition densities of skew and oscillating Brownian motion,
// joint densities with the local time, one-step transforms of bivariate
// kernels, stationary averages, semigroups and local-time moments.
//
// Every state argument here is threshold-centered (x - r).

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "skewloc/errors.hpp"
#include "skewloc/kernel.hpp"
#include "skewloc/process.hpp"
#include "skewloc/quadrature.hpp"

namespace skewloc {

inline constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)
inline constexpr double sqrt_2pi = 2.50662827463100050241576528481;
inline constexpr double sqrt_2_over_pi = 0.797884560802865355879892119869;

inline double std_normal_pdf(double x) noexcept { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF; relative accuracy is that of erfc, including the far tails.
inline double std_normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x * 0.707106781186547524400844362105);
}

/// Density of N(0, t) at z.
inline double gaussian_density(double t, double z) noexcept {
    return inv_sqrt_2pi / std::sqrt(t) * std::exp(-0.5 * z * z / t);
}

namespace detail {

inline void require_positive_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ConfigError("time argument must be positive and finite, got " + std::to_string(t));
    }
}

inline void require_skewness(double beta) {
    if (!(std::abs(beta) < 1.0)) throw ConfigError("beta must lie in the open interval (-1, 1)");
}

inline double skew_density_unchecked(double beta, double t, double x, double y) noexcept {
    const double s = std::abs(x) + std::abs(y);
    return gaussian_density(t, x - y) + beta * sign_of(y) * gaussian_density(t, s);
}

inline double obm_density_unchecked(const ProcessParams& p, double t, double x, double y) noexcept {
    const double sy = p.sigma(y);
    return skew_density_unchecked(p.beta(), t, x / p.sigma(x), y / sy) / sy;
}

inline double skew_cdf_unchecked(double beta, double t, double x, double y) noexcept {
    const double sd = std::sqrt(t);
    const double ax = std::abs(x);
    const double free = std_normal_cdf((y - x) / sd);
    if (y < 0.0) return free - beta * std_normal_cdf((y - ax) / sd);
    return free - beta * std_normal_cdf(-ax / sd) +
           beta * (std_normal_cdf((ax + y) / sd) - std_normal_cdf(ax / sd));
}

}  // namespace detail

/// Transition density p_beta(t, x, y) of the standard beta-SBM (sgn(0) = 0).
inline double skew_density(double beta, double t, double x, double y) {
    detail::require_skewness(beta);
    detail::require_positive_time(t);
    return detail::skew_density_unchecked(beta, t, x, y);
}

/// Transition density q_sigma(t, x, y) of the standard OBM.
inline double obm_density(const ProcessParams& params, double t, double x, double y) {
    detail::require_positive_time(t);
    return detail::obm_density_unchecked(params, t, x, y);
}

/// p_beta for a skew process, q_sigma for an oscillating one.
inline double transition_density(const ProcessParams& params, double t, double x, double y) {
    detail::require_positive_time(t);
    return params.is_skew() ? detail::skew_density_unchecked(params.beta(), t, x, y)
                            : detail::obm_density_unchecked(params, t, x, y);
}

/// P(X_t <= y | X_0 = x) for the standard beta-SBM, in closed form.
inline double skew_cdf(double beta, double t, double x, double y) {
    detail::require_skewness(beta);
    detail::require_positive_time(t);
    return detail::skew_cdf_unchecked(beta, t, x, y);
}

inline double transition_cdf(const ProcessParams& params, double t, double x, double y) {
    detail::require_positive_time(t);
    if (params.is_skew()) return detail::skew_cdf_unchecked(params.beta(), t, x, y);
    return detail::skew_cdf_unchecked(params.beta(), t, params.to_skew_state(x),
                                      params.to_skew_state(y));
}

/// Joint density of (B_t, L_t(B)) for a standard Brownian motion from 0.
inline double joint_density_bm(double t, double y, double ell) {
    detail::require_positive_time(t);
    if (!(ell > 0.0)) return 0.0;
    const double s = std::abs(y) + ell;
    return s / std::sqrt(2.0 * std::numbers::pi * t * t * t) * std::exp(-0.5 * s * s / t);
}

/// Joint density of (Y_t, L_t(Y)) for a standard OBM from 0; y = 0 is rejected.
inline double joint_density_obm(const ProcessParams& params, double t, double y, double ell) {
    if (y == 0.0) throw ConfigError("joint_density_obm is defined for y != 0 only");
    const double s = params.sigma(y);
    const double scale = (params.sigma_minus() + params.sigma_plus()) /
                         (2.0 * params.sigma_minus() * params.sigma_plus());
    return joint_density_bm(t, y / s, scale * ell) / (s * s);
}

/// Joint density of (X_t, L_t(X)) for a standard SBM from 0: (1 + sgn(y) beta) rho_t(y, ell).
inline double joint_density_skew(double beta, double t, double y, double ell) {
    detail::require_skewness(beta);
    return (1.0 + sign_of(y) * beta) * joint_density_bm(t, y, ell);
}

/**
 * H_{f,w}(x) = int f(x, y) w(y) q(1, x, y) dy (F_{f,w} for a skew process),
 * over |y - x| <= tail_sigmas * max(sigma) with breakpoints at 0 and x.
 */
template <class Weight>
double transform_H(const ProcessParams& params, const BivariateKernel& kernel, Weight&& weight,
                   double x, const QuadratureConfig& quad) {
    const double half = quad.tail_sigmas * params.max_sigma();
    const auto br = make_breaks(x - half, x + half, {0.0, x});
    auto integrand = [&](double y) {
        const double k = kernel.eval(x, y);
        if (k == 0.0) return 0.0;
        const double d = params.is_skew()
                             ? detail::skew_density_unchecked(params.beta(), 1.0, x, y)
                             : detail::obm_density_unchecked(params, 1.0, x, y);
        return k * weight(y) * d;
    };
    return integrate_piecewise(integrand, br, quad, "transform").value;
}

inline double transform_H(const ProcessParams& params, const BivariateKernel& kernel, double x,
                          const QuadratureConfig& quad) {
    return transform_H(params, kernel, [](double) { return 1.0; }, x, quad);
}

/**
 * <lambda_sigma, fn> (or <mu_beta, fn> for a skew process). Integrates
 * outward from the threshold in growing panels; throws DivergenceError when
 * the partial sums exceed `divergence_bound` or fail to settle.
 */
template <class Fn>
double stationary_average(const ProcessParams& params, Fn&& fn, const QuadratureConfig& quad,
                          double divergence_bound = 1e12) {
    auto plus = [&](double x) { return fn(x) * params.stationary_density(x); };
    auto minus = [&](double x) { return fn(x) * params.stationary_density(x); };
    const double panel = 2.0 * params.max_sigma();
    // Both halves start at 0; the plus half owns the threshold.
    const double right =
        integrate_half_line(plus, 0.0, +1, panel, quad, divergence_bound, 400, "stationary").value;
    const double left =
        integrate_half_line(minus, 0.0, -1, panel, quad, divergence_bound, 400, "stationary").value;
    return left + right;
}

/// Q_t fn(x) = int q(t, x, y) fn(y) dy (P^beta_t for a skew process).
template <class Fn>
double semigroup_apply(const ProcessParams& params, double t, Fn&& fn, double x,
                       const QuadratureConfig& quad) {
    detail::require_positive_time(t);
    const double half = quad.tail_sigmas * params.max_sigma() * std::sqrt(t);
    const auto br = make_breaks(x - half, x + half, {0.0, x});
    auto integrand = [&](double y) {
        const double d = params.is_skew() ? detail::skew_density_unchecked(params.beta(), t, x, y)
                                          : detail::obm_density_unchecked(params, t, x, y);
        return d == 0.0 ? 0.0 : d * fn(y);
    };
    return integrate_piecewise(integrand, br, quad, "semigroup").value;
}

/**
 * int_0^inf l^p rho_1(a, l) dl for a >= 0, i.e. the p-th local-time moment
 * density of a standard Brownian motion at W_1 = a. Closed form through the
 * incomplete Gaussian moments J_k(a) = int_a^inf u^k phi(u) du.
 */
inline double bm_localtime_moment_density(int p, double a) {
    const double pdf = std_normal_pdf(a);
    std::vector<double> j(static_cast<std::size_t>(p) + 2);
    j[0] = std_normal_cdf(-a);
    j[1] = pdf;
    for (std::size_t k = 2; k < j.size(); ++k) {
        j[k] = std::pow(a, static_cast<double>(k - 1)) * pdf + static_cast<double>(k - 1) * j[k - 2];
    }
    double sum = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= p; ++i) {
        sum += binom * std::pow(-a, p - i) * j[static_cast<std::size_t>(i) + 1];
        binom = binom * (p - i) / (i + 1);
    }
    return std::max(sum, 0.0);
}

/**
 * E[(L_1)^p fn(s * Z_1)] for the standard process (skew or oscillating)
 * started at the threshold, where (Z_1, L_1) is the position and local time
 * at time 1.
 */
template <class Fn>
double localtime_moment_from_threshold(const ProcessParams& params, Fn&& fn, int p, double s,
                                       const QuadratureConfig& quad) {
    const double half = quad.tail_sigmas + 2.0;
    const auto br = make_breaks(-half, half, {0.0});
    if (params.is_skew()) {
        const double beta = params.beta();
        auto integrand = [&](double w) {
            return bm_localtime_moment_density(p, std::abs(w)) * (1.0 + sign_of(w) * beta) *
                   fn(w * s);
        };
        return integrate_piecewise(integrand, br, quad, "localtime-moment").value;
    }
    const double m = params.localtime_ratio();
    auto integrand = [&](double w) {
        const double sw = params.sigma(w);
        return bm_localtime_moment_density(p, std::abs(w)) / sw * fn(sw * w * s);
    };
    return std::pow(m, p + 1) * integrate_piecewise(integrand, br, quad, "localtime-moment").value;
}

/**
 * E[(L_1)^p fn(Z_1) | Z_0 = x]. For p >= 1 only paths that reach the
 * threshold contribute; the Levy hitting time is integrated in the variable
 * z = a / sqrt(t) with a = |x| / sigma(x), which turns the hitting density
 * into 2 phi(z). p = 0 reduces to the semigroup at time 1.
 */
template <class Fn>
double localtime_moment(const ProcessParams& params, Fn&& fn, int p, double x,
                        const QuadratureConfig& quad) {
    if (p < 0) throw ConfigError("local-time moment order must be >= 0");
    if (p == 0) return semigroup_apply(params, 1.0, fn, x, quad);
    if (x == 0.0) return localtime_moment_from_threshold(params, fn, p, 1.0, quad);
    const double a = std::abs(params.to_skew_state(x));
    const QuadratureConfig inner = quad.inner();
    auto integrand = [&](double z) {
        const double rest = 1.0 - (a * a) / (z * z);  // remaining time after the hit
        if (!(rest > 0.0)) return 0.0;
        return 2.0 * std_normal_pdf(z) * std::pow(rest, 0.5 * p) *
               localtime_moment_from_threshold(params, fn, p, std::sqrt(rest), inner);
    };
    return integrate(integrand, a, a + quad.tail_sigmas, quad, "localtime-moment").value;
}

}  // namespace skewloc

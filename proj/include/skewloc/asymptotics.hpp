#pragma once

// Limit constants c and CLT variance constants K for the high-frequency
// statistics of skew and oscillating Brownian motion.
//
// Everything is assembled in skew coordinates u = x / sigma(x), where the
// semigroup of either process is that of a beta-SBM. A skew process is the
// special case sigma = 1, m = 1 of the same formulas.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "skewloc/analytic.hpp"
#include "skewloc/errors.hpp"
#include "skewloc/kernel.hpp"
#include "skewloc/parallel.hpp"
#include "skewloc/process.hpp"
#include "skewloc/quadrature.hpp"
#include "skewloc/tabulation.hpp"

namespace skewloc {

/**
 * Truncation of sum_j P_j kappa. Explicit terms are summed until
 * |term| < term_tol and the last decay_check_window terms fall off like
 * j^{-3/2} (each ratio within 30%), or until they are all below the
 * quadrature noise floor. The remainder sum_{j > J} is then added in closed
 * form through the heat-kernel tail, which is exact for centered functions.
 */
struct SeriesConfig {
    int j_min = 16;
    double term_tol = 1e-3;
    int decay_check_window = 4;
    int j_max = 4000;
    int chebyshev_order = 16;
    unsigned workers = 0;  // 0 = hardware concurrency

    void validate() const {
        if (j_min < 2) throw ConfigError("series j_min must be >= 2");
        if (!(term_tol > 0.0)) throw ConfigError("series term_tol must be positive");
        if (decay_check_window < 1) throw ConfigError("series decay_check_window must be >= 1");
        if (j_max <= j_min) throw ConfigError("series j_max must exceed j_min");
        if (chebyshev_order < 4) throw ConfigError("series chebyshev_order must be >= 4");
    }

    unsigned resolved_workers() const noexcept { return workers == 0 ? default_workers() : workers; }
};

struct SeriesPoint {
    double value = 0.0;
    int truncation_j = 0;
    double last_term = 0.0;
    /// |S_J + T_J - (S_{J-w} + T_{J-w})|: disagreement of the tail model across the window.
    double error = 0.0;
};

struct AsymptoticReport {
    std::string process;
    std::string kernel;
    double limit_constant = 0.0;
    double clt_constant = 0.0;
    /// The four summands of K, in the order: stationary transforms, squared limit
    /// constant, series-weighted integral, triple integral.
    std::array<double, 4> terms{};
    /// m * (triple integral), the raw quantity behind terms[3] = -2 c m (m I).
    double triple_integral = 0.0;
    int series_j = 0;
    double series_error = 0.0;
    double err_estimate = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

/// w(y) = exp(-y^2/2) - sqrt(2 pi) |y| Phi(-|y|).
inline double excursion_weight(double y) noexcept {
    const double a = std::abs(y);
    return std::exp(-0.5 * a * a) - sqrt_2pi * a * std_normal_cdf(-a);
}

/// States at the threshold are evaluated as right limits (0 belongs to the plus side).
inline double right_limit(double x) noexcept { return x == 0.0 ? 1e-300 : x; }

inline BivariateKernel centering_kernel(const ProcessParams& p) {
    return p.is_skew() ? kernels::g_beta(p.beta()) : kernels::g();
}

inline std::string describe(const ProcessParams& p) {
    char buf[160];
    if (p.is_skew()) {
        std::snprintf(buf, sizeof buf, "skew(beta=%.17g, r=%.17g)", p.beta(), p.threshold());
    } else {
        std::snprintf(buf, sizeof buf, "oscillating(sigma_minus=%.17g, sigma_plus=%.17g, r=%.17g)",
                      p.sigma_minus(), p.sigma_plus(), p.threshold());
    }
    return buf;
}

/// Breakpoints -R, -R+1, ..., R plus `extra`: the panel joints of a SplitTable of radius R.
inline std::vector<double> panel_breaks(double radius, int panels, double extra) {
    std::vector<double> br;
    const double w = radius / panels;
    for (int k = -panels; k <= panels; ++k) br.push_back(k * w);
    if (extra > -radius && extra < radius) br.push_back(extra);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

/**
 * sum_{j >= 0} P^beta_j G(u) for a function G on [-R, R] with zero mean
 * against mu_beta. G is held as a piecewise Chebyshev table.
 */
class SkewSeries {
public:
    template <class G>
    SkewSeries(double beta, G&& g, const SeriesConfig& series, const QuadratureConfig& quad)
        : beta_(beta),
          radius_(quad.tail_sigmas),
          panels_(static_cast<int>(std::ceil(quad.tail_sigmas))),
          series_(series),
          quad_(quad),
          source_(g, quad.tail_sigmas, static_cast<int>(std::ceil(quad.tail_sigmas)),
                  series.chebyshev_order) {}

    /// Tabulated G; zero outside [-R, R].
    double source(double u) const noexcept { return source_(u); }
    double radius() const noexcept { return radius_; }
    int panels() const noexcept { return panels_; }

    /// P^beta_j G(u).
    double term(int j, double u) const {
        const auto br = panel_breaks(radius_, panels_, u);
        const double t = static_cast<double>(j);
        auto f = [&](double v) { return skew_density_unchecked(beta_, t, u, v) * source_(v); };
        return integrate_piecewise(f, br, quad_, "series-term").value;
    }

    /// sum_{j > J} P^beta_j G(u) through the heat-kernel tail D_J.
    double tail(const HeatTailKernel& d, double u) const {
        const auto br = panel_breaks(radius_, panels_, u);
        const double au = std::abs(u);
        auto f = [&](double v) {
            const double gv = source_(v);
            if (gv == 0.0) return 0.0;
            const double refl = v == 0.0 ? 0.0 : beta_ * sign_of(v) * d(au + std::abs(v));
            return (d(u - v) + refl) * gv;
        };
        return integrate_piecewise(f, br, quad_, "series-tail").value;
    }

    /// The series at u, with the j = 0 term given explicitly (`head`).
    SeriesPoint at(double u, double head) const {
        const int w = series_.decay_check_window;
        const double noise = 10.0 * quad_.abs_tol;
        std::vector<double> terms{head};
        std::vector<double> partial{head};
        int stop = -1;
        for (int j = 1; j <= series_.j_max; ++j) {
            const double t = term(j, u);
            terms.push_back(t);
            partial.push_back(partial.back() + t);
            if (j < series_.j_min || j <= w) continue;
            bool decay = true;
            bool quiet = true;
            for (int i = j - w + 1; i <= j; ++i) {
                const double prev = terms[static_cast<std::size_t>(i - 1)];
                const double cur = terms[static_cast<std::size_t>(i)];
                quiet = quiet && std::abs(cur) < noise;
                if (prev == 0.0) {
                    decay = false;
                    continue;
                }
                const double expected = std::pow(static_cast<double>(i - 1) / i, 1.5);
                if (std::abs(cur / prev / expected - 1.0) > 0.3) decay = false;
            }
            if ((std::abs(t) < series_.term_tol && decay) || quiet) {
                stop = j;
                break;
            }
        }
        if (stop < 0) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "terms show no j^-3/2 decay by j = %d at u = %.6g (kernel inadmissible "
                          "or quadrature too coarse)",
                          series_.j_max, u);
            throw SeriesError(buf, std::move(partial));
        }
        const HeatTailKernel d_full(tail_index(stop));
        const HeatTailKernel d_short(tail_index(stop - w));
        SeriesPoint out;
        out.truncation_j = stop;
        out.last_term = terms.back();
        // Keep explicit terms up to the tail index actually used.
        double s_full = partial.back();
        for (int j = stop + 1; j <= d_full.last_explicit_term(); ++j) s_full += term(j, u);
        double s_short = partial[static_cast<std::size_t>(stop - w)];
        for (int j = stop - w + 1; j <= d_short.last_explicit_term(); ++j) s_short += term(j, u);
        out.value = s_full + tail(d_full, u);
        out.error = std::abs(out.value - (s_short + tail(d_short, u)));
        return out;
    }

    SeriesPoint at(double u) const { return at(u, source_(u)); }

    /// Tabulates the series on the same nodes as the source; reports the worst node.
    SplitTable tabulate(int& max_j, double& max_error) const {
        const int order = series_.chebyshev_order;
        const auto minus_pts = ChebyshevTable::sample_points(-radius_, 0.0, panels_, order);
        const auto plus_pts = ChebyshevTable::sample_points(0.0, radius_, panels_, order);
        std::vector<double> pts = minus_pts;
        pts.insert(pts.end(), plus_pts.begin(), plus_pts.end());
        std::vector<SeriesPoint> res(pts.size());
        parallel_for(pts.size(), series_.resolved_workers(),
                     [&](std::size_t i) { res[i] = at(pts[i]); });
        max_j = 0;
        max_error = 0.0;
        std::vector<double> lo_vals;
        std::vector<double> hi_vals;
        for (std::size_t i = 0; i < res.size(); ++i) {
            max_j = std::max(max_j, res[i].truncation_j);
            max_error = std::max(max_error, res[i].error);
            (i < minus_pts.size() ? lo_vals : hi_vals).push_back(res[i].value);
        }
        return SplitTable(ChebyshevTable::from_samples(lo_vals, -radius_, 0.0, panels_, order),
                          ChebyshevTable::from_samples(hi_vals, 0.0, radius_, panels_, order));
    }

private:
    // The tail expansion needs (2R)^2 / (2 (J + 1)) moderate; explicit terms fill the gap.
    int tail_index(int j) const {
        const double z = 2.0 * radius_;
        const int need = static_cast<int>(std::ceil(z * z / 24.0));
        return std::max(j, need);
    }

    double beta_;
    double radius_;
    int panels_;
    SeriesConfig series_;
    QuadratureConfig quad_;
    SplitTable source_;
};

/// Process and kernel with the limit constant c = <stationary, H_h> already computed.
struct CenteredProblem {
    ProcessParams proc;
    BivariateKernel h;
    BivariateKernel g;
    double c = 0.0;
};

inline double limit_constant_of(const ProcessParams& proc, const BivariateKernel& h,
                                const QuadratureConfig& quad) {
    return stationary_average(
        proc, [&](double x) { return transform_H(proc, h, x, quad.inner()); }, quad.scaled(10.0));
}

inline CenteredProblem center(const ProcessParams& proc, const BivariateKernel& h,
                              const QuadratureConfig& quad) {
    return {proc, h, centering_kernel(proc), limit_constant_of(proc, h, quad)};
}

/// kappa in skew coordinates: H_h(sigma(u) u) - c H_g(sigma(u) u).
inline double kappa_u(const CenteredProblem& cp, double u, const QuadratureConfig& quad) {
    const double x = right_limit(cp.proc.from_skew_state(u));
    return transform_H(cp.proc, cp.h, x, quad) - cp.c * transform_H(cp.proc, cp.g, x, quad);
}

inline SkewSeries make_series(const CenteredProblem& cp, const SeriesConfig& series,
                              const QuadratureConfig& quad) {
    const int order = series.chebyshev_order;
    const double radius = quad.tail_sigmas;
    const int panels = static_cast<int>(std::ceil(radius));
    // Tabulate kappa in parallel, then hand the node values to the series.
    const auto lo_pts = ChebyshevTable::sample_points(-radius, 0.0, panels, order);
    const auto hi_pts = ChebyshevTable::sample_points(0.0, radius, panels, order);
    std::vector<double> pts = lo_pts;
    pts.insert(pts.end(), hi_pts.begin(), hi_pts.end());
    std::vector<double> vals(pts.size());
    parallel_for(pts.size(), series.resolved_workers(),
                 [&](std::size_t i) { vals[i] = kappa_u(cp, pts[i], quad); });
    std::size_t next = 0;
    auto lookup = [&](double) { return vals[next++]; };
    return SkewSeries(cp.proc.beta(), lookup, series, quad);
}

/**
 * m * int int int |x| e^{-x^2/2} / sqrt(2 pi) Phi(-|y|) sqrt(1/t - 1)
 *       h(sigma(x) x sqrt(t), sigma(y) y sqrt(1 - t)) nu(dy) dt nu(dx),
 * with nu(du) = du / sigma(u) for OBM and mu_beta(du) for SBM (m = 1).
 * Nested as t outside, then x, then y; t = a^2 on [0, 1/2] and
 * 1 - t = b^2 on [1/2, 1] remove both endpoint singularities.
 */
inline double triple_integral_u(const ProcessParams& proc, const BivariateKernel& h,
                                const QuadratureConfig& quad) {
    const double radius = quad.tail_sigmas;
    const auto br = make_breaks(-radius, radius, {0.0});
    const QuadratureConfig mid_cfg = quad.inner();
    const QuadratureConfig in_cfg = mid_cfg.inner();
    auto density = [&](double u) {
        const double x = proc.from_skew_state(u);
        return proc.sigma(x) * proc.stationary_density(x);
    };
    auto middle = [&](double st, double sc) {
        auto fx = [&](double x) {
            if (x == 0.0) return 0.0;
            const double xs = proc.from_skew_state(x) * st;
            auto fy = [&](double y) {
                return std_normal_cdf(-std::abs(y)) * density(y) *
                       h.eval(xs, proc.from_skew_state(y) * sc);
            };
            const double inner = integrate_piecewise(fy, br, in_cfg, "triple-integral").value;
            return std::abs(x) * std_normal_pdf(x) * density(x) * inner;
        };
        return integrate_piecewise(fx, br, mid_cfg, "triple-integral").value;
    };
    const double half = std::numbers::sqrt2 / 2.0;
    auto near_zero = [&](double a) {
        const double sc = std::sqrt(1.0 - a * a);
        return 2.0 * sc * middle(a, sc);
    };
    auto near_one = [&](double b) {
        const double st = std::sqrt(1.0 - b * b);
        return 2.0 * b * b / st * middle(st, b);
    };
    const double total = integrate(near_zero, 0.0, half, quad, "triple-integral").value +
                         integrate(near_one, 0.0, half, quad, "triple-integral").value;
    return proc.localtime_ratio() * total;
}

/// Assembles K for a centered problem; SBM problems use m = 1 and mu_beta.
inline AsymptoticReport assemble(const CenteredProblem& cp, const SeriesConfig& series,
                                 const QuadratureConfig& quad) {
    const ProcessParams& proc = cp.proc;
    const double m = proc.localtime_ratio();
    const double c = cp.c;
    AsymptoticReport rep;
    rep.process = describe(proc);
    rep.kernel = cp.h.name;
    rep.limit_constant = c;

    const SkewSeries sk = make_series(cp, series, quad);
    const SplitTable q_table = sk.tabulate(rep.series_j, rep.series_error);
    auto q_of_x = [&](double y) { return q_table(proc.to_skew_state(y)); };

    const QuadratureConfig in = quad.inner();
    const QuadratureConfig out = quad.scaled(10.0);
    const double h_sq = stationary_average(
        proc, [&](double x) { return transform_H(proc, kernels::square(cp.h), x, in); }, out);
    const double h_q = stationary_average(
        proc, [&](double x) { return transform_H(proc, cp.h, q_of_x, x, in); }, out);
    rep.terms[0] = h_sq + 2.0 * h_q;

    rep.terms[1] = m * 8.0 / (3.0 * sqrt_2pi) * c * c;

    const double radius = quad.tail_sigmas;
    const auto br = panel_breaks(radius, sk.panels(), 0.0);
    auto wq = [&](double y) {
        const double x = proc.from_skew_state(y);
        return excursion_weight(y) * q_table(y) * proc.sigma(x) * proc.stationary_density(x);
    };
    const double wq_int = integrate_piecewise(wq, br, quad, "series-weighted").value;
    rep.terms[2] = -2.0 * sqrt_2_over_pi * m * c * wq_int;

    rep.triple_integral = c == 0.0 ? 0.0 : triple_integral_u(proc, cp.h, quad);
    rep.terms[3] = -2.0 * c * m * rep.triple_integral;

    rep.clt_constant = rep.terms[0] + rep.terms[1] + rep.terms[2] + rep.terms[3];

    // Propagated series error (|q - q_true| <= series_error) plus quadrature tolerances.
    const double w_mass = sqrt_2pi / 2.0 * 2.0 / std::min(1.0, 1.0 / proc.max_sigma());
    rep.err_estimate = rep.series_error * (2.0 * (std::abs(c) + 1.0) * std::max(1.0, m) +
                                           2.0 * sqrt_2_over_pi * m * std::abs(c) * w_mass) +
                       100.0 * out.abs_tol * (1.0 + std::abs(rep.clt_constant));
    if (rep.clt_constant < 0.0) {
        if (rep.clt_constant < -rep.err_estimate) {
            throw NumericError("assembled K is negative (" + std::to_string(rep.clt_constant) +
                                   "); series or quadrature failed",
                               "assembly", rep.clt_constant);
        }
        rep.warnings.push_back("assembled K slightly negative within error; clamped to 0");
        rep.clt_constant = 0.0;
    }
    return rep;
}

}  // namespace detail

/**
 * Numerical check of h in L_gamma: the envelope bound on a fixed
 * pseudo-random grid, finiteness of int envelope(x) (1 + |x|^gamma) dx, and
 * the claimed class exponent. Returns warnings; never throws on failure.
 */
inline std::vector<std::string> admissibility_warnings(const BivariateKernel& h, double gamma,
                                                       const QuadratureConfig& quad = {}) {
    std::vector<std::string> out;
    if (!(h.gamma > gamma)) {
        out.push_back("kernel " + h.name + " claims class exponent " + std::to_string(h.gamma) +
                      ", need > " + std::to_string(gamma));
    }
    if (!h.envelope) {
        out.push_back("kernel " + h.name + " has no envelope");
        return out;
    }
    // Halton-like deterministic grid on [-12, 12]^2.
    int violations = 0;
    for (int i = 1; i <= 4000; ++i) {
        const double a = std::fmod(i * 0.6180339887498949, 1.0);
        const double b = std::fmod(i * 0.7548776662466927, 1.0);
        const double x = 24.0 * a - 12.0;
        const double y = 24.0 * b - 12.0;
        const double bound = h.envelope(x) * std::exp(h.envelope_rate * std::abs(y - x));
        if (std::abs(h.eval(x, y)) > bound * (1.0 + 1e-12) + 1e-300) ++violations;
    }
    if (violations > 0) {
        out.push_back("kernel " + h.name + " exceeds its envelope at " + std::to_string(violations) +
                      " of 4000 sample points");
    }
    const double g = std::isfinite(gamma) ? gamma : 8.0;
    auto weight = [&](double x) { return h.envelope(x) * (1.0 + std::pow(std::abs(x), g)); };
    try {
        integrate_half_line(weight, 0.0, +1, 2.0, quad, 1e12, 400, "admissibility");
        integrate_half_line(weight, 0.0, -1, 2.0, quad, 1e12, 400, "admissibility");
    } catch (const NumericError&) {
        out.push_back("envelope of " + h.name + " is not integrable against 1 + |x|^" +
                      std::to_string(g));
    }
    return out;
}

/// <lambda_sigma, H_h> for an OBM; <mu_beta, F_f> for an SBM.
inline double limit_constant(const ProcessParams& params, const BivariateKernel& kernel,
                             const QuadratureConfig& quad = {}) {
    quad.validate();
    return detail::limit_constant_of(params, kernel, quad);
}

/**
 * kappa(x) = H_h(x) - <lambda_sigma, H_h> H_g(x) for an OBM, and
 * F_f(x) - <mu_beta, F_f> F_{g_beta}(x) for an SBM. At the threshold the
 * transforms are taken as right limits.
 */
inline double kappa(const ProcessParams& params, const BivariateKernel& kernel, double x,
                    const QuadratureConfig& quad = {}) {
    quad.validate();
    const auto cp = detail::center(params, kernel, quad);
    return detail::kappa_u(cp, params.to_skew_state(x), quad);
}

/**
 * sum_{j >= 0} Q_j kappa (x) for an OBM, P^beta_j for an SBM. The j = 0 term
 * is kappa(x) itself; the others act on a Chebyshev table of kappa.
 */
inline SeriesPoint q_series_point(const ProcessParams& params, const BivariateKernel& kernel,
                                  double x, const SeriesConfig& series = {},
                                  const QuadratureConfig& quad = {}) {
    quad.validate();
    series.validate();
    const auto cp = detail::center(params, kernel, quad);
    const detail::SkewSeries sk = detail::make_series(cp, series, quad);
    const double u = params.to_skew_state(x);
    return sk.at(u, detail::kappa_u(cp, u, quad));
}

inline double q_series(const ProcessParams& params, const BivariateKernel& kernel, double x,
                       const SeriesConfig& series = {}, const QuadratureConfig& quad = {}) {
    return q_series_point(params, kernel, x, series, quad).value;
}

/// m * (triple integral) for an OBM (m = 1 for an SBM).
inline double triple_integral(const ProcessParams& params, const BivariateKernel& kernel,
                              const QuadratureConfig& quad = {}) {
    quad.validate();
    return detail::triple_integral_u(params, kernel, quad);
}

/// c and K of the CLT for the statistic with kernel h on an OBM.
inline AsymptoticReport clt_constant_obm(const ProcessParams& params, const BivariateKernel& kernel,
                                         const SeriesConfig& series = {},
                                         const QuadratureConfig& quad = {}) {
    if (!params.is_oscillating()) throw ConfigError("clt_constant_obm needs an oscillating process");
    quad.validate();
    series.validate();
    auto warnings = admissibility_warnings(kernel, 3.0, quad);
    auto rep = detail::assemble(detail::center(params, kernel, quad), series, quad);
    rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());
    return rep;
}

/**
 * c and K for an SBM, by transport to the OBM with s- = 1 + beta,
 * s+ = 1 - beta and kernel f(x / sigma(x), y / sigma(y)). Since
 * L(Y) = (1 - beta^2) L(X), both constants of the OBM problem are multiplied
 * by m = 1 - beta^2.
 */
inline AsymptoticReport clt_constant_sbm(const ProcessParams& params, const BivariateKernel& kernel,
                                         const SeriesConfig& series = {},
                                         const QuadratureConfig& quad = {}) {
    if (!params.is_skew()) throw ConfigError("clt_constant_sbm needs a skew process");
    quad.validate();
    series.validate();
    const ProcessParams obm = params.canonical_oscillating();
    const BivariateKernel h = kernels::transport_to_oscillating(kernel, obm);
    auto warnings = admissibility_warnings(kernel, 3.0, quad);
    auto rep = detail::assemble(detail::center(obm, h, quad), series, quad);
    const double m = obm.localtime_ratio();
    rep.process = detail::describe(params);
    rep.kernel = kernel.name;
    rep.limit_constant *= m;
    rep.clt_constant *= m;
    for (double& t : rep.terms) t *= m;
    rep.err_estimate *= m;
    rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());
    return rep;
}

inline AsymptoticReport clt_constant_sbm(double beta, const BivariateKernel& kernel,
                                         const SeriesConfig& series = {},
                                         const QuadratureConfig& quad = {}) {
    return clt_constant_sbm(ProcessParams::skew(beta), kernel, series, quad);
}

/// K for an SBM straight from the skew formulas (F, g_beta, mu_beta); a cross-check of
/// clt_constant_sbm.
inline AsymptoticReport clt_constant_sbm_direct(const ProcessParams& params,
                                                const BivariateKernel& kernel,
                                                const SeriesConfig& series = {},
                                                const QuadratureConfig& quad = {}) {
    if (!params.is_skew()) throw ConfigError("clt_constant_sbm_direct needs a skew process");
    quad.validate();
    series.validate();
    return detail::assemble(detail::center(params, kernel, quad), series, quad);
}

/// Result of a dedicated crossing or distance-weighted formula.
struct SpecialFormula {
    double limit_constant = 0.0;
    double clt_constant = 0.0;
    int series_j = 0;
    double series_error = 0.0;
};

/**
 * K for the crossing estimator on an OBM through its dedicated formula
 * (series of the explicit centered function G_sigma), independent of the
 * generic assembly.
 */
inline SpecialFormula crossing_constant_obm(const ProcessParams& params,
                                            const SeriesConfig& series = {},
                                            const QuadratureConfig& quad = {}) {
    if (!params.is_oscillating()) throw ConfigError("crossing_constant_obm needs an oscillating process");
    quad.validate();
    series.validate();
    const double sm = params.sigma_minus();
    const double sp = params.sigma_plus();
    const double sum = sm + sp;
    const double m = params.localtime_ratio();
    auto g_sigma = [&](double u) {
        const double s = params.sigma(u);
        return 2.0 / sum *
               (s * std_normal_cdf(-std::abs(u)) - 2.0 / std::numbers::pi * m * detail::excursion_weight(u));
    };
    const detail::SkewSeries sk(params.beta(), g_sigma, series, quad);
    SpecialFormula out;
    const SplitTable q = sk.tabulate(out.series_j, out.series_error);
    const auto br = detail::panel_breaks(quad.tail_sigmas, sk.panels(), 0.0);
    auto f1 = [&](double u) { return std_normal_cdf(-std::abs(u)) * q(u); };
    auto f2 = [&](double u) { return params.sigma(-u) * detail::excursion_weight(u) * q(u); };
    const double i1 = integrate_piecewise(f1, br, quad, "crossing").value;
    const double i2 = integrate_piecewise(f2, br, quad, "crossing").value;
    const double r = 4.0 * sm * sp / (sum * sum);
    const double bracket = 1.0 + sqrt_2pi * i1 + r * 8.0 / (3.0 * std::numbers::pi) -
                           4.0 / sum * sqrt_2_over_pi * i2 - r;
    out.limit_constant = 2.0 / sum * sqrt_2_over_pi;
    out.clt_constant = 2.0 / sum * sqrt_2_over_pi * bracket;
    return out;
}

/**
 * Centered function of the distance-weighted estimator on an SBM in explicit
 * form: F_{2 h1}(y) - (1 - beta^2) F_{g_beta}(y)
 *   = -2 sgn(y) (1 - sgn(y) beta) beta (2 pi)^{-1/2} w(y),  sgn(0) = 0.
 */
inline double weighted_skew_kappa(double beta, double y) {
    const double s = sign_of(y);
    return -2.0 * s * (1.0 - s * beta) * beta * inv_sqrt_2pi * detail::excursion_weight(y);
}

/// P_beta(x) = sum_j P^beta_j weighted_skew_kappa(x). Vanishes at x = 0 for every beta.
inline SeriesPoint weighted_skew_series(double beta, double x, const SeriesConfig& series = {},
                                        const QuadratureConfig& quad = {}) {
    detail::require_skewness(beta);
    quad.validate();
    series.validate();
    const detail::SkewSeries sk(beta, [beta](double y) { return weighted_skew_kappa(beta, y); },
                                series, quad);
    return sk.at(x, weighted_skew_kappa(beta, x));
}

/**
 * K for the distance-weighted estimator on an SBM from the explicit series:
 * (1 - beta^2) (16 / (3 sqrt(2 pi)) - 4 beta int x Phi(-|x|) P_beta(x) dx
 *               - 4 int p_beta(1, 0, x) P_beta(x) dx).
 * The last integral is zero by symmetry and is reported as `one_step_average`.
 */
struct WeightedSkewFormula {
    double limit_constant = 0.0;
    double clt_constant = 0.0;
    double first_moment_integral = 0.0;  // int x Phi(-|x|) P_beta(x) dx
    double one_step_average = 0.0;       // int p_beta(1, 0, x) P_beta(x) dx
    int series_j = 0;
    double series_error = 0.0;
};

inline WeightedSkewFormula weighted_constant_sbm(double beta, const SeriesConfig& series = {},
                                                 const QuadratureConfig& quad = {}) {
    detail::require_skewness(beta);
    quad.validate();
    series.validate();
    const detail::SkewSeries sk(beta, [beta](double y) { return weighted_skew_kappa(beta, y); },
                                series, quad);
    WeightedSkewFormula out;
    const SplitTable p = sk.tabulate(out.series_j, out.series_error);
    const auto br = detail::panel_breaks(quad.tail_sigmas, sk.panels(), 0.0);
    auto f1 = [&](double x) { return x * std_normal_cdf(-std::abs(x)) * p(x); };
    auto f2 = [&](double x) { return detail::skew_density_unchecked(beta, 1.0, 0.0, x) * p(x); };
    out.first_moment_integral = integrate_piecewise(f1, br, quad, "weighted").value;
    out.one_step_average = integrate_piecewise(f2, br, quad, "weighted").value;
    const double m = 1.0 - beta * beta;
    out.limit_constant = m;
    out.clt_constant = m * (16.0 / (3.0 * sqrt_2pi) - 4.0 * beta * out.first_moment_integral -
                            4.0 * out.one_step_average);
    return out;
}

enum class EstimatorFormula { crossing_obm, crossing_sbm, weighted_obm, weighted_sbm };

struct ClosedForm {
    double limit_constant = 0.0;
    /// Empty when K has no closed form and needs the series assembly.
    std::optional<double> clt_constant;
    std::string note;
};

/**
 * Closed-form constants where they exist. weighted_sbm evaluates its K
 * through the explicit P_beta series; crossing K values are left empty.
 */
inline ClosedForm closed_form_constants(EstimatorFormula kind, const ProcessParams& params,
                                        const SeriesConfig& series = {},
                                        const QuadratureConfig& quad = {}) {
    ClosedForm out;
    switch (kind) {
        case EstimatorFormula::crossing_obm: {
            if (!params.is_oscillating()) throw ConfigError("crossing_obm needs an oscillating process");
            out.limit_constant = 2.0 / (params.sigma_minus() + params.sigma_plus()) * sqrt_2_over_pi;
            out.note = "K has no closed form; use clt_constant_obm with kernel h0";
            break;
        }
        case EstimatorFormula::crossing_sbm: {
            if (!params.is_skew()) throw ConfigError("crossing_sbm needs a skew process");
            const double b = params.beta();
            out.limit_constant = sqrt_2_over_pi * (1.0 - b * b);
            out.note = "K has no closed form; use clt_constant_sbm with kernel h0";
            break;
        }
        case EstimatorFormula::weighted_obm: {
            if (!params.is_oscillating()) throw ConfigError("weighted_obm needs an oscillating process");
            const double sm = params.sigma_minus();
            const double sp = params.sigma_plus();
            out.limit_constant = 1.0;
            out.clt_constant = 16.0 / (3.0 * sqrt_2pi) * (sm * sm + sp * sp) / (sm + sp);
            break;
        }
        case EstimatorFormula::weighted_sbm: {
            if (!params.is_skew()) throw ConfigError("weighted_sbm needs a skew process");
            const auto f = weighted_constant_sbm(params.beta(), series, quad);
            out.limit_constant = f.limit_constant;
            out.clt_constant = f.clt_constant;
            out.note = "K from the P_beta series (J = " + std::to_string(f.series_j) + ")";
            break;
        }
    }
    return out;
}

inline const char* to_string(EstimatorFormula k) {
    switch (k) {
        case EstimatorFormula::crossing_obm: return "crossing_obm";
        case EstimatorFormula::crossing_sbm: return "crossing_sbm";
        case EstimatorFormula::weighted_obm: return "weighted_obm";
        case EstimatorFormula::weighted_sbm: return "weighted_sbm";
    }
    return "?";
}

}  // namespace skewloc

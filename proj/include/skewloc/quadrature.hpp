#pragma once

// Globally adaptive Gauss-Kronrod (21-point) quadrature with absolute and
// relative tolerances, breakpoints, and expanding-panel integration over
// half-lines with divergence detection.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "skewloc/errors.hpp"

namespace skewloc {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Spatial truncation half-width, in units of the relevant standard deviation.
    double tail_sigmas = 10.0;
    int max_subdivisions = 2000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
            throw ConfigError("quadrature tolerances must be positive");
        }
        if (!(tail_sigmas >= 6.0)) throw ConfigError("tail_sigmas must be >= 6");
        if (max_subdivisions < 1) throw ConfigError("max_subdivisions must be >= 1");
    }

    /// Configuration for an integral nested inside another one.
    QuadratureConfig inner(double factor = 0.1) const {
        QuadratureConfig c = *this;
        c.abs_tol *= factor;
        c.rel_tol *= factor;
        return c;
    }

    /// Same tolerances scaled by `factor` (> 1 loosens).
    QuadratureConfig scaled(double factor) const { return inner(factor); }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    int intervals = 0;
};

namespace detail {

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool splittable;
};

struct GaussKronrod21 {
    std::array<double, 11> x{};
    std::array<double, 11> wk{};
    std::array<double, 5> wg{};

    GaussKronrod21() {
        using boost::math::quadrature::gauss;
        using boost::math::quadrature::gauss_kronrod;
        const auto& ka = gauss_kronrod<double, 21>::abscissa();
        const auto& kw = gauss_kronrod<double, 21>::weights();
        const auto& gw = gauss<double, 10>::weights();
        std::copy(ka.begin(), ka.end(), x.begin());
        std::copy(kw.begin(), kw.end(), wk.begin());
        std::copy(gw.begin(), gw.end(), wg.begin());
    }

    static const GaussKronrod21& get() {
        static const GaussKronrod21 rule;
        return rule;
    }
};

template <class F>
Segment gk21(F& f, double a, double b) {
    const auto& rule = GaussKronrod21::get();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<double, 21> fv{};
    fv[0] = f(center);
    for (int i = 1; i < 11; ++i) {
        const double dx = half * rule.x[i];
        fv[2 * i - 1] = f(center - dx);
        fv[2 * i] = f(center + dx);
    }

    double resk = rule.wk[0] * fv[0];
    double resabs = std::abs(resk);
    double resg = 0.0;
    for (int i = 1; i < 11; ++i) {
        const double pair = fv[2 * i - 1] + fv[2 * i];
        resk += rule.wk[i] * pair;
        resabs += rule.wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
        if (i % 2 == 1) resg += rule.wg[i / 2] * pair;
    }
    const double mean = 0.5 * resk;
    double resasc = rule.wk[0] * std::abs(fv[0] - mean);
    for (int i = 1; i < 11; ++i) {
        resasc += rule.wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
    }

    const double value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    if (!std::isfinite(value)) {
        throw QuadratureError("non-finite integrand value on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
    const bool splittable = std::abs(b - a) > 64.0 * eps * std::max(std::abs(a), std::abs(b)) &&
                            std::abs(b - a) > 1e-300;
    return {a, b, value, err, splittable};
}

inline bool heap_less(const Segment& l, const Segment& r) {
    // Unsplittable segments sink to the bottom.
    if (l.splittable != r.splittable) return !l.splittable;
    return l.error < r.error;
}

}  // namespace detail

/**
 * Integrates f over the union of [breaks[i], breaks[i+1]]. Subdivision is
 * global: the segment with the largest error estimate is bisected until the
 * total error drops below max(abs_tol, rel_tol * |I|).
 *
 * Throws QuadratureError (carrying the residual error estimate) when
 * max_subdivisions is exhausted first.
 */
template <class F>
QuadResult integrate_piecewise(F&& f, std::span<const double> breaks, const QuadratureConfig& cfg,
                               const char* term = "quadrature") {
    QuadResult out;
    if (breaks.size() < 2) return out;

    std::vector<detail::Segment> heap;
    heap.reserve(static_cast<std::size_t>(cfg.max_subdivisions) + breaks.size());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] == breaks[i]) continue;
        heap.push_back(detail::gk21(f, breaks[i], breaks[i + 1]));
        out.evaluations += 21;
    }
    std::make_heap(heap.begin(), heap.end(), detail::heap_less);

    auto totals = [&heap]() {
        double v = 0.0;
        double e = 0.0;
        for (const auto& s : heap) {
            v += s.value;
            e += s.error;
        }
        return std::pair{v, e};
    };

    auto [value, error] = totals();
    int splits = 0;
    while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) {
        if (heap.empty() || !heap.front().splittable || splits >= cfg.max_subdivisions) {
            throw QuadratureError("no convergence after " + std::to_string(splits) +
                                      " subdivisions (residual " + std::to_string(error) + ")",
                                  term, error);
        }
        std::pop_heap(heap.begin(), heap.end(), detail::heap_less);
        const detail::Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Segment left = detail::gk21(f, worst.a, mid);
        const detail::Segment right = detail::gk21(f, mid, worst.b);
        out.evaluations += 42;
        ++splits;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), detail::heap_less);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), detail::heap_less);
        if (splits % 64 == 0) std::tie(value, error) = totals();  // curb drift
    }
    std::tie(value, error) = totals();
    out.value = value;
    out.error = error;
    out.intervals = static_cast<int>(heap.size());
    return out;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureConfig& cfg,
                     const char* term = "quadrature") {
    const std::array<double, 2> br{a, b};
    return integrate_piecewise(f, std::span<const double>(br), cfg, term);
}

/// Sorted, de-duplicated breakpoints restricted to [lo, hi], endpoints included.
inline std::vector<double> make_breaks(double lo, double hi, std::initializer_list<double> interior) {
    std::vector<double> br{lo};
    for (double p : interior) {
        if (p > lo && p < hi) br.push_back(p);
    }
    br.push_back(hi);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

/**
 * Integrates f over [start, +inf) (direction = +1) or (-inf, start]
 * (direction = -1) by summing panels of width `panel` until two successive
 * panels contribute less than abs_tol. Throws DivergenceError when the
 * running sum exceeds `divergence_bound` or `max_panels` is reached first.
 */
template <class F>
QuadResult integrate_half_line(F&& f, double start, int direction, double panel,
                               const QuadratureConfig& cfg, double divergence_bound = 1e12,
                               int max_panels = 400, const char* term = "half-line") {
    QuadResult out;
    int quiet = 0;
    double lo = start;
    for (int k = 0; k < max_panels; ++k) {
        const double hi = lo + direction * panel;
        const QuadResult piece = direction > 0 ? integrate(f, lo, hi, cfg, term)
                                               : integrate(f, hi, lo, cfg, term);
        out.value += piece.value;
        out.error += piece.error;
        out.evaluations += piece.evaluations;
        out.intervals += piece.intervals;
        if (!(std::abs(out.value) <= divergence_bound)) {
            throw DivergenceError("partial sums exceeded " + std::to_string(divergence_bound),
                                  term, out.value);
        }
        quiet = std::abs(piece.value) < cfg.abs_tol ? quiet + 1 : 0;
        if (quiet >= 2) return out;
        lo = hi;
        panel *= 1.25;
    }
    throw DivergenceError("no decay after " + std::to_string(max_panels) + " panels", term,
                          out.value);
}

}  // namespace skewloc

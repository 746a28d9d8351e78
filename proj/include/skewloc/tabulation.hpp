#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>

#include "skewloc/errors.hpp"

namespace skewloc {

/**
 * Piecewise Chebyshev interpolant on [lo, hi] with equal-width panels.
 * Sampling uses first-kind nodes, so panel endpoints are never evaluated:
 * at a jump of the tabulated function the interpolant carries the one-sided
 * limits of the panels that meet there.
 */
class ChebyshevTable {
public:
    enum class Outside { zero, clamp };

    ChebyshevTable() = default;

    template <class F>
    ChebyshevTable(F&& f, double lo, double hi, int panels, int order, Outside outside = Outside::zero)
        : ChebyshevTable(lo, hi, panels, order, outside) {
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(panels * order));
        for (double x : sample_points(lo, hi, panels, order)) values.push_back(f(x));
        fit(values);
    }

    /// Builds the table from values already computed at sample_points(lo, hi, panels, order).
    static ChebyshevTable from_samples(const std::vector<double>& values, double lo, double hi,
                                       int panels, int order, Outside outside = Outside::zero) {
        ChebyshevTable t(lo, hi, panels, order, outside);
        if (values.size() != static_cast<std::size_t>(panels * order)) {
            throw ConfigError("ChebyshevTable::from_samples: wrong number of values");
        }
        t.fit(values);
        return t;
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    /// Abscissae at which the constructor samples, in increasing panel order.
    static std::vector<double> sample_points(double lo, double hi, int panels, int order) {
        std::vector<double> pts;
        const double w = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            for (int k = 0; k < order; ++k) {
                pts.push_back(lo + p * w +
                              0.5 * w * (std::cos(std::numbers::pi * (k + 0.5) / order) + 1.0));
            }
        }
        return pts;
    }

    double operator()(double x) const noexcept {
        if (coeffs_.empty()) return 0.0;
        if (x < lo_ || x > hi_) {
            if (outside_ == Outside::zero) return 0.0;
            x = x < lo_ ? lo_ : hi_;
        }
        int p = static_cast<int>((x - lo_) / width_);
        if (p >= panels_) p = panels_ - 1;
        if (p < 0) p = 0;
        const double a = lo_ + p * width_;
        const double t = 2.0 * (x - a) / width_ - 1.0;
        const double* c = coeffs_.data() + static_cast<std::ptrdiff_t>(p) * order_;
        // Clenshaw recurrence.
        double b1 = 0.0;
        double b2 = 0.0;
        for (int j = order_ - 1; j >= 1; --j) {
            const double b0 = 2.0 * t * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c[0];
    }

private:
    ChebyshevTable(double lo, double hi, int panels, int order, Outside outside)
        : lo_(lo), hi_(hi), panels_(panels), order_(order), outside_(outside) {
        if (!(hi > lo) || panels < 1 || order < 2) {
            throw ConfigError("ChebyshevTable needs hi > lo, panels >= 1, order >= 2");
        }
        width_ = (hi - lo) / panels;
    }

    void fit(const std::vector<double>& values) {
        coeffs_.assign(values.size(), 0.0);
        for (int p = 0; p < panels_; ++p) {
            const double* v = values.data() + static_cast<std::ptrdiff_t>(p) * order_;
            for (int j = 0; j < order_; ++j) {
                double s = 0.0;
                for (int k = 0; k < order_; ++k) {
                    s += v[k] * std::cos(std::numbers::pi * j * (k + 0.5) / order_);
                }
                coeffs_[static_cast<std::size_t>(p * order_ + j)] = (j == 0 ? 1.0 : 2.0) * s / order_;
            }
        }
    }

    double lo_ = 0.0;
    double hi_ = 0.0;
    double width_ = 1.0;
    int panels_ = 0;
    int order_ = 0;
    Outside outside_ = Outside::zero;
    std::vector<double> coeffs_;
};

/// A function tabulated separately on [-R, 0) and [0, R]; 0 belongs to the plus side.
class SplitTable {
public:
    SplitTable() = default;

    template <class F>
    SplitTable(F&& f, double radius, int panels_per_side, int order,
               ChebyshevTable::Outside outside = ChebyshevTable::Outside::zero)
        : minus_(f, -radius, 0.0, panels_per_side, order, outside),
          plus_(f, 0.0, radius, panels_per_side, order, outside) {}

    SplitTable(ChebyshevTable minus, ChebyshevTable plus)
        : minus_(std::move(minus)), plus_(std::move(plus)) {}

    double operator()(double x) const noexcept { return x >= 0.0 ? plus_(x) : minus_(x); }

private:
    ChebyshevTable minus_;
    ChebyshevTable plus_;
};

/// Hurwitz zeta function zeta(s, a) for s > 1, a > 0, by Euler-Maclaurin summation.
inline double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0)) throw ConfigError("hurwitz_zeta requires s > 1 and a > 0");
    constexpr int shift = 16;
    constexpr int corrections = 12;
    double sum = 0.0;
    for (int n = 0; n < shift; ++n) sum += std::pow(a + n, -s);
    const double b = a + shift;
    sum += std::pow(b, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(b, -s);
    // sum_k B_2k / (2k)! * s (s+1) ... (s+2k-2) * b^(-s-2k+1)
    double rising = s;                  // s (s+1) ... (s+2k-2)
    double power = std::pow(b, -s - 1.0);
    double factorial = 2.0;             // (2k)!
    for (int k = 1; k <= corrections; ++k) {
        const double term = boost::math::bernoulli_b2n<double>(k) / factorial * rising * power;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        rising *= (s + 2 * k - 1) * (s + 2 * k);
        power /= b * b;
        factorial *= (2 * k + 1) * (2 * k + 2);
    }
    return sum;
}

/**
 * D_J(z) = sum_{j > J} (2 pi j)^{-1/2} (exp(-z^2 / (2 j)) - 1), the tail of
 * the heat-kernel series with its divergent mass term removed. Expanded as
 * (2 pi)^{-1/2} sum_{k >= 1} (-z^2/2)^k / k! zeta(k + 1/2, J + 1).
 */
class HeatTailKernel {
public:
    explicit HeatTailKernel(int last_explicit_term, int max_order = 120)
        : J_(last_explicit_term) {
        if (J_ < 1) throw ConfigError("HeatTailKernel needs J >= 1");
        zeta_.reserve(static_cast<std::size_t>(max_order));
        for (int k = 1; k <= max_order; ++k) {
            zeta_.push_back(hurwitz_zeta(k + 0.5, J_ + 1.0));
        }
    }

    int last_explicit_term() const noexcept { return J_; }

    double operator()(double z) const {
        if (z == 0.0) return 0.0;
        const double x = -0.5 * z * z;
        double coef = 1.0;  // x^k / k!
        double sum = 0.0;
        double largest = 0.0;
        for (std::size_t k = 0; k < zeta_.size(); ++k) {
            coef *= x / static_cast<double>(k + 1);
            const double term = coef * zeta_[k];
            sum += term;
            largest = std::max(largest, std::abs(term));
            if (std::abs(term) < 1e-17 * largest && k > 2) {
                return 0.398942280401432677939946059934 * sum;
            }
        }
        throw NumericError("heat-kernel tail expansion did not converge at z = " +
                               std::to_string(z) + " (raise J)",
                           "series-tail");
    }

private:
    int J_;
    std::vector<double> zeta_;
};

}  // namespace skewloc

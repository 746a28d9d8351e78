#pragma once

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "skewloc/errors.hpp"
#include "skewloc/process.hpp"

namespace skewloc {

/**
 * Test function h(x, y) applied to consecutive rescaled observations, with
 * the envelope |h(x, y)| <= envelope(x) * exp(envelope_rate * |y - x|) that
 * places it in the admissible class with exponent `gamma`.
 */
struct BivariateKernel {
    std::string name;
    std::function<double(double, double)> eval;
    std::function<double(double)> envelope;
    double envelope_rate = 0.0;
    double gamma = 0.0;

    double operator()(double x, double y) const { return eval(x, y); }
};

namespace kernels {

/// 1{xy < 0}: threshold crossing.
inline BivariateKernel h0() {
    return {"h0", [](double x, double y) { return x * y < 0.0 ? 1.0 : 0.0; },
            [](double x) { return std::exp(-std::abs(x)); }, 1.0,
            std::numeric_limits<double>::infinity()};
}

/// |y| 1{xy < 0}.
inline BivariateKernel h1() {
    return {"h1", [](double x, double y) { return x * y < 0.0 ? std::abs(y) : 0.0; },
            [](double x) { return std::exp(-std::abs(x)); }, 1.0,
            std::numeric_limits<double>::infinity()};
}

/// 2 |y| 1{xy < 0}: the kernel of the distance-weighted estimator.
inline BivariateKernel h1x2() {
    return {"h1x2", [](double x, double y) { return x * y < 0.0 ? 2.0 * std::abs(y) : 0.0; },
            [](double x) { return 2.0 * std::exp(-std::abs(x)); }, 1.0,
            std::numeric_limits<double>::infinity()};
}

/// |y| - |x|. Not integrable in x, so outside every admissible class.
inline BivariateKernel g() {
    return {"g", [](double x, double y) { return std::abs(y) - std::abs(x); },
            [](double) { return 1.0; }, 1.0, 0.0};
}

/// The skew counterpart of g:
/// (|y| - (1 + sgn(y) beta) / (1 + sgn(x) beta) |x|) / (1 + sgn(y) beta).
inline BivariateKernel g_beta(double beta) {
    return {"g_beta",
            [beta](double x, double y) {
                const double wy = 1.0 + sign_of(y) * beta;
                const double wx = 1.0 + sign_of(x) * beta;
                return (std::abs(y) - wy / wx * std::abs(x)) / wy;
            },
            [beta](double) { return 2.0 / (1.0 - std::abs(beta)); }, 1.0, 0.0};
}

inline BivariateKernel one() {
    return {"one", [](double, double) { return 1.0; }, [](double) { return 1.0; }, 0.0, 0.0};
}

inline BivariateKernel product(const BivariateKernel& a, const BivariateKernel& b) {
    auto ea = a.eval;
    auto eb = b.eval;
    auto na = a.envelope;
    auto nb = b.envelope;
    return {a.name + "*" + b.name, [ea, eb](double x, double y) { return ea(x, y) * eb(x, y); },
            [na, nb](double x) { return na(x) * nb(x); }, a.envelope_rate + b.envelope_rate,
            std::min(a.gamma, b.gamma)};
}

inline BivariateKernel square(const BivariateKernel& a) {
    BivariateKernel k = product(a, a);
    k.name = a.name + "^2";
    return k;
}

/**
 * Transports an SBM kernel f to the OBM with s- = 1 + beta, s+ = 1 - beta:
 * h(x, y) = f(x / sigma(x), y / sigma(y)).
 */
inline BivariateKernel transport_to_oscillating(const BivariateKernel& f, const ProcessParams& obm) {
    auto fe = f.eval;
    auto fn = f.envelope;
    const double sm = obm.sigma_minus();
    const double sp = obm.sigma_plus();
    auto to_u = [sm, sp](double x) { return x >= 0.0 ? x / sp : x / sm; };
    return {f.name + "@obm", [fe, to_u](double x, double y) { return fe(to_u(x), to_u(y)); },
            [fn, to_u](double x) { return fn(to_u(x)); },
            f.envelope_rate / std::min(sm, sp), f.gamma};
}

/// Looks up a built-in kernel by name: h0, h1, h1x2, g, one.
inline BivariateKernel by_name(const std::string& name) {
    if (name == "h0") return h0();
    if (name == "h1") return h1();
    if (name == "h1x2") return h1x2();
    if (name == "g") return g();
    if (name == "one") return one();
    throw ConfigError("unknown kernel '" + name + "' (expected h0, h1, h1x2, g or one)");
}

}  // namespace kernels
}  // namespace skewloc

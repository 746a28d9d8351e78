#pragma once

// Exact one-step sampling of (X_dt, L_dt) for skew and oscillating Brownian
// motion, and whole paths on a uniform grid.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "skewloc/analytic.hpp"
#include "skewloc/errors.hpp"
#include "skewloc/process.hpp"
#include "skewloc/rng.hpp"

namespace skewloc {

struct MaxwellTriple {
    double abs_pos = 0.0;
    double ell = 0.0;
    int sign = 1;
};

struct Step {
    double y = 0.0;
    double d_ell = 0.0;
};

/// (|B_t|, L_t(B), sgn B_t) for a standard BM from 0; sign is + with probability p_plus.
inline MaxwellTriple sample_maxwell_triple(double t, RandomStream& rng, double p_plus = 0.5) {
    detail::require_positive_time(t);
    const double a = rng.normal();
    const double b = rng.normal();
    const double c = rng.normal();
    const double s = std::sqrt(t * (a * a + b * b + c * c));
    const double ell = rng.uniform() * s;
    const int sign = rng.uniform() < p_plus ? 1 : -1;
    return {s - ell, ell, sign};
}

namespace detail {

/// |G| for a standard normal G conditioned on |G| > c.
inline double abs_normal_beyond(double c, RandomStream& rng) {
    constexpr int cap = 100000;
    if (c < 1.0) {
        for (int i = 0; i < cap; ++i) {
            const double z = std::abs(rng.normal());
            if (z > c) return z;
        }
    } else {
        // Exponential proposal with the optimal rate (Robert 1995).
        const double alpha = 0.5 * (c + std::sqrt(c * c + 4.0));
        for (int i = 0; i < cap; ++i) {
            const double z = c - std::log(rng.uniform()) / alpha;
            const double d = z - alpha;
            if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
        }
    }
    throw NumericError("truncated normal rejection exceeded its iteration cap", "sampler");
}

}  // namespace detail

/**
 * One exact step of the standard beta-SBM from x over dt, with its local
 * time increment at 0.
 *
 * From x != 0 the free Gaussian endpoint decides whether the step touches 0
 * (always when it changes side, with probability exp(-2 x z / dt) otherwise).
 * On a hit, the hitting time is drawn from the Levy law restricted to
 * [0, dt] and the rest of the step restarts from 0 with a Maxwell triple
 * whose sign is + with probability (1 + beta) / 2.
 */
inline Step sbm_step(double beta, double dt, double x, RandomStream& rng) {
    detail::require_skewness(beta);
    detail::require_positive_time(dt);
    const double p_plus = 0.5 * (1.0 + beta);
    double rest = dt;
    if (x != 0.0) {
        const double a = std::abs(x);
        const double z = a + std::sqrt(dt) * rng.normal();
        const double u = rng.uniform();
        if (z > 0.0 && u >= std::exp(-2.0 * a * z / dt)) {
            return {x > 0.0 ? z : -z, 0.0};
        }
        const double g = detail::abs_normal_beyond(a / std::sqrt(dt), rng);
        const double tau = (a * a) / (g * g);
        rest = dt - tau;
        if (!(rest > 0.0)) return {0.0, 0.0};
    }
    const MaxwellTriple m = sample_maxwell_triple(rest, rng, p_plus);
    return {m.sign * m.abs_pos, m.ell};
}

/// One exact step of the standard OBM: an SBM step in x / sigma(x), mapped back.
inline Step obm_step(const ProcessParams& params, double dt, double x, RandomStream& rng) {
    const Step s = sbm_step(params.beta(), dt, params.to_skew_state(x), rng);
    return {params.from_skew_state(s.y), params.localtime_ratio() * s.d_ell};
}

/// One step of either process from a centered state.
inline Step process_step(const ProcessParams& params, double dt, double x, RandomStream& rng) {
    return params.is_skew() ? sbm_step(params.beta(), dt, x, rng) : obm_step(params, dt, x, rng);
}

struct PathSample {
    ProcessParams params;
    double x0 = 0.0;
    double T = 1.0;
    std::int64_t n_steps = 0;
    /// Positions at k T / n, user coordinates (not centered).
    std::vector<double> positions;
    /// Exact local time at the threshold gained over step k -> k + 1.
    std::vector<double> localtime_increments;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    double dt() const noexcept { return T / static_cast<double>(n_steps); }
};

inline void validate_grid(double T, std::int64_t n_steps) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("horizon T must be positive and finite");
    if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
}

/// n_steps exact steps of length T / n_steps from x0. The stream is consumed in place.
inline PathSample simulate_path(const ProcessParams& params, double x0, double T, std::int64_t n_steps,
                                RandomStream& rng) {
    validate_grid(T, n_steps);
    if (!std::isfinite(x0)) throw ConfigError("x0 must be finite");
    PathSample p;
    p.params = params;
    p.x0 = x0;
    p.T = T;
    p.n_steps = n_steps;
    p.seed = rng.seed();
    p.stream_id = rng.stream_id();
    p.positions.resize(static_cast<std::size_t>(n_steps) + 1);
    p.localtime_increments.resize(static_cast<std::size_t>(n_steps));
    const double r = params.threshold();
    const double dt = p.dt();
    double x = x0 - r;
    p.positions[0] = x0;
    for (std::int64_t k = 0; k < n_steps; ++k) {
        const Step s = process_step(params, dt, x, rng);
        x = s.y;
        p.positions[static_cast<std::size_t>(k) + 1] = x + r;
        p.localtime_increments[static_cast<std::size_t>(k)] = s.d_ell;
    }
    return p;
}

inline PathSample simulate_path(const ProcessParams& params, double x0, double T, std::int64_t n_steps,
                                std::uint64_t seed, std::uint64_t stream_id) {
    RandomStream rng(seed, stream_id);
    return simulate_path(params, x0, T, n_steps, rng);
}

/**
 * The SBM path X = Y / sigma(Y) of an OBM path (centered at the threshold),
 * local time divided by 2 s- s+ / (s- + s+). Output params: skew(beta_sigma, r).
 */
inline PathSample sbm_from_obm_path(const PathSample& path) {
    if (!path.params.is_oscillating()) throw ConfigError("sbm_from_obm_path needs an OBM path");
    PathSample out = path;
    const ProcessParams& p = path.params;
    const double r = p.threshold();
    for (double& v : out.positions) v = p.to_skew_state(v - r) + r;
    const double scale = 1.0 / p.localtime_ratio();
    for (double& d : out.localtime_increments) d *= scale;
    out.x0 = out.positions.front();
    out.params = p.associated_skew();
    return out;
}

/// Inverse of sbm_from_obm_path for the OBM `target` whose skewness matches the path's.
inline PathSample obm_from_sbm_path(const PathSample& path, const ProcessParams& target) {
    if (!path.params.is_skew() || !target.is_oscillating()) {
        throw ConfigError("obm_from_sbm_path needs an SBM path and an OBM target");
    }
    if (std::abs(path.params.beta() - target.beta()) > 1e-12 ||
        path.params.threshold() != target.threshold()) {
        throw ConfigError("obm_from_sbm_path: target skewness or threshold does not match the path");
    }
    PathSample out = path;
    const double r = target.threshold();
    for (double& v : out.positions) v = target.from_skew_state(v - r) + r;
    const double scale = target.localtime_ratio();
    for (double& d : out.localtime_increments) d *= scale;
    out.x0 = out.positions.front();
    out.params = target;
    return out;
}

}  // namespace skewloc

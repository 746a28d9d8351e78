#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "skewloc/errors.hpp"

namespace skewloc {

enum class ProcessKind { skew, oscillating };

inline const char* to_string(ProcessKind kind) {
    return kind == ProcessKind::skew ? "skew" : "oscillating";
}

/// sgn with sgn(0) = 0.
inline double sign_of(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/**
 * Parameters of a skew Brownian motion (beta, r) or an oscillating Brownian
 * motion (sigma_minus, sigma_plus, r).
 *
 * All state arguments of the member functions are threshold-centered
 * (x - r). The threshold itself belongs to the plus side: sigma(0) = sigma_plus.
 */
class ProcessParams {
public:
    static ProcessParams skew(double beta, double threshold = 0.0) {
        if (!std::isfinite(beta) || !(std::abs(beta) < 1.0)) {
            throw ConfigError("beta must lie in the open interval (-1, 1), got " +
                              std::to_string(beta));
        }
        check_threshold(threshold);
        ProcessParams p;
        p.kind_ = ProcessKind::skew;
        p.beta_ = beta;
        p.threshold_ = threshold;
        return p;
    }

    static ProcessParams oscillating(double sigma_minus, double sigma_plus, double threshold = 0.0) {
        if (!std::isfinite(sigma_minus) || !(sigma_minus > 0.0)) {
            throw ConfigError("sigma_minus must be positive and finite, got " +
                              std::to_string(sigma_minus));
        }
        if (!std::isfinite(sigma_plus) || !(sigma_plus > 0.0)) {
            throw ConfigError("sigma_plus must be positive and finite, got " +
                              std::to_string(sigma_plus));
        }
        check_threshold(threshold);
        ProcessParams p;
        p.kind_ = ProcessKind::oscillating;
        p.sigma_minus_ = sigma_minus;
        p.sigma_plus_ = sigma_plus;
        p.beta_ = (sigma_minus - sigma_plus) / (sigma_minus + sigma_plus);
        p.threshold_ = threshold;
        return p;
    }

    ProcessKind kind() const noexcept { return kind_; }
    bool is_skew() const noexcept { return kind_ == ProcessKind::skew; }
    bool is_oscillating() const noexcept { return kind_ == ProcessKind::oscillating; }

    /// Skewness: beta for SBM, beta_sigma = (s- - s+)/(s- + s+) for OBM.
    double beta() const noexcept { return beta_; }
    double threshold() const noexcept { return threshold_; }

    /// Volatility levels. A skew process reports unit volatility on both sides.
    double sigma_minus() const noexcept { return sigma_minus_; }
    double sigma_plus() const noexcept { return sigma_plus_; }

    /// sigma(x) for a centered state; 1 for a skew process.
    double sigma(double x) const noexcept { return x >= 0.0 ? sigma_plus_ : sigma_minus_; }

    /// Maps a centered OBM state to the state of the associated SBM (x / sigma(x)).
    double to_skew_state(double x) const noexcept { return x / sigma(x); }
    /// Inverse of to_skew_state.
    double from_skew_state(double u) const noexcept { return sigma(u) * u; }

    /// 2 s- s+ / (s- + s+): L(OBM) = ratio * L(associated SBM). 1 for a skew process.
    double localtime_ratio() const noexcept {
        return 2.0 * sigma_minus_ * sigma_plus_ / (sigma_minus_ + sigma_plus_);
    }

    /// Density of the stationary measure: 1 + sgn(x) beta (SBM), 1 / sigma(x)^2 (OBM).
    double stationary_density(double x) const noexcept {
        if (is_skew()) return 1.0 + sign_of(x) * beta_;
        const double s = sigma(x);
        return 1.0 / (s * s);
    }

    /// Largest volatility level; sets the spatial scale of quadrature domains.
    double max_sigma() const noexcept { return std::max(sigma_minus_, sigma_plus_); }

    /// Skew process with the same skewness (beta_sigma for an OBM) and threshold.
    ProcessParams associated_skew() const { return skew(beta_, threshold_); }

    /// OBM with s- = 1 + beta, s+ = 1 - beta, whose associated SBM is this one.
    ProcessParams canonical_oscillating() const {
        ProcessParams p = oscillating(1.0 + beta_, 1.0 - beta_, threshold_);
        p.beta_ = beta_;  // exact, not the rounded (s- - s+)/(s- + s+)
        return p;
    }

    friend bool operator==(const ProcessParams&, const ProcessParams&) = default;

private:
    static void check_threshold(double r) {
        if (!std::isfinite(r)) throw ConfigError("threshold r must be finite");
    }

    ProcessKind kind_ = ProcessKind::skew;
    double beta_ = 0.0;
    double sigma_minus_ = 1.0;
    double sigma_plus_ = 1.0;
    double threshold_ = 0.0;
};

}  // namespace skewloc

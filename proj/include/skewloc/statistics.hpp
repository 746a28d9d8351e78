#pragma once

// High-frequency statistics eps_{n,t} and the two threshold local-time
// estimators, as cadlag step functions on the observation grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "skewloc/errors.hpp"
#include "skewloc/kernel.hpp"
#include "skewloc/sampler.hpp"

namespace skewloc {

/// Piecewise constant, right-continuous: value(t) = values[k] for grid[k] <= t < grid[k+1].
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(std::vector<double> grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (grid_.size() != values_.size()) throw ConfigError("StepFunction: grid/values size mismatch");
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            if (!(grid_[i] > grid_[i - 1])) throw ConfigError("StepFunction: grid must increase strictly");
        }
    }

    const std::vector<double>& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return grid_.size(); }
    double back() const { return values_.back(); }

    double operator()(double t) const {
        if (grid_.empty()) throw ConfigError("StepFunction is empty");
        if (t < grid_.front()) throw ConfigError("StepFunction evaluated before its first grid time");
        // A relative slack absorbs the rounding of k T / N against t.
        const double slack = 1e-12 * std::max(1.0, std::abs(grid_.back()));
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), t + slack);
        return values_[static_cast<std::size_t>(it - grid_.begin()) - 1];
    }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

namespace detail {

inline std::vector<double> uniform_grid(std::size_t points, double spacing) {
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k) g[k] = static_cast<double>(k) * spacing;
    return g;
}

inline void require_observations(std::span<const double> obs) {
    if (obs.size() < 2) throw ConfigError("need at least two observations");
}

}  // namespace detail

/**
 * eps_{n,t} = n^{-1/2} sum_{k < floor(n t)} kernel(sqrt(n)(X_{k/n} - r), sqrt(n)(X_{(k+1)/n} - r))
 * for observations at spacing 1/n.
 */
inline StepFunction epsilon_stat(std::span<const double> obs, double r, const BivariateKernel& kernel,
                                 double n) {
    detail::require_observations(obs);
    if (!(n >= 1.0)) throw ConfigError("epsilon_stat needs n >= 1");
    const double sn = std::sqrt(n);
    std::vector<double> values(obs.size());
    double sum = 0.0;
    values[0] = 0.0;
    for (std::size_t k = 0; k + 1 < obs.size(); ++k) {
        sum += kernel(sn * (obs[k] - r), sn * (obs[k + 1] - r));
        values[k + 1] = sum / sn;
    }
    return {detail::uniform_grid(obs.size(), 1.0 / n), std::move(values)};
}

namespace detail {
inline void require_estimator_args(std::span<const double> obs, double T, double N) {
    require_observations(obs);
    if (!(N >= 1.0)) throw ConfigError("estimator needs N >= 1");
    if (!(T > 0.0)) throw ConfigError("estimator needs T > 0");
}
}  // namespace detail

/// sqrt(T/N) times the number of strict crossings (xi_i - r)(xi_{i+1} - r) < 0.
inline StepFunction crossing_estimator(std::span<const double> obs, double r, double T, double N) {
    detail::require_estimator_args(obs, T, N);
    const double scale = std::sqrt(T / N);
    std::vector<double> values(obs.size());
    long count = 0;
    for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
        if ((obs[i] - r) * (obs[i + 1] - r) < 0.0) ++count;
        values[i + 1] = scale * static_cast<double>(count);
    }
    return {detail::uniform_grid(obs.size(), T / N), std::move(values)};
}

/// 2 sum 1{crossing} |xi_{i+1} - r|; no sqrt(T/N) prefactor.
inline StepFunction weighted_estimator(std::span<const double> obs, double r, double T, double N) {
    detail::require_estimator_args(obs, T, N);
    std::vector<double> values(obs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
        const double a = obs[i] - r;
        const double b = obs[i + 1] - r;
        if (a * b < 0.0) sum += 2.0 * std::abs(b);
        values[i + 1] = sum;
    }
    return {detail::uniform_grid(obs.size(), T / N), std::move(values)};
}

/// Exact local time of a simulated path accumulated over the steps completed by t.
inline double reference_local_time(const PathSample& path, double t) {
    if (!(t >= 0.0) || t > path.T * (1.0 + 1e-12)) {
        throw ConfigError("reference_local_time: t outside [0, T]");
    }
    const double dt = path.dt();
    auto k = static_cast<std::int64_t>(std::floor(t / dt + 1e-9));
    k = std::min(k, path.n_steps);
    double sum = 0.0;
    for (std::int64_t i = 0; i < k; ++i) sum += path.localtime_increments[static_cast<std::size_t>(i)];
    return sum;
}

/// Cumulative exact local time on the path's grid.
inline StepFunction local_time_path(const PathSample& path) {
    std::vector<double> values(path.positions.size());
    double sum = 0.0;
    values[0] = 0.0;
    for (std::size_t k = 0; k < path.localtime_increments.size(); ++k) {
        sum += path.localtime_increments[k];
        values[k + 1] = sum;
    }
    return {detail::uniform_grid(values.size(), path.dt()), std::move(values)};
}

/// sup over the estimate's grid of |estimate(t) - scale * reference(t)|.
inline double sup_error(const StepFunction& estimate, const std::function<double(double)>& reference,
                        double scale) {
    double worst = 0.0;
    const auto& g = estimate.grid();
    const auto& v = estimate.values();
    for (std::size_t k = 0; k < g.size(); ++k) {
        worst = std::max(worst, std::abs(v[k] - scale * reference(g[k])));
    }
    return worst;
}

}  // namespace skewloc

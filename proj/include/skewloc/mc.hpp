#pragma once

// Monte Carlo experiments for the consistency, the n^{1/4} rate and the
// mixed-normal CLT of the threshold estimators. One random stream per path;
// results are reduced in path order, so they do not depend on the number of
// workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "skewloc/asymptotics.hpp"
#include "skewloc/errors.hpp"
#include "skewloc/kernel.hpp"
#include "skewloc/parallel.hpp"
#include "skewloc/process.hpp"
#include "skewloc/sampler.hpp"

namespace skewloc {

enum class EstimatorKind { crossing, weighted, kernel };
enum class ConstantsSource { closed_form, numeric, supplied };

inline const char* to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::crossing: return "crossing";
        case EstimatorKind::weighted: return "weighted";
        case EstimatorKind::kernel: return "kernel";
    }
    return "?";
}

inline const char* to_string(ConstantsSource s) {
    switch (s) {
        case ConstantsSource::closed_form: return "closed_form";
        case ConstantsSource::numeric: return "numeric";
        case ConstantsSource::supplied: return "supplied";
    }
    return "?";
}

inline EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "crossing") return EstimatorKind::crossing;
    if (s == "weighted") return EstimatorKind::weighted;
    if (s == "kernel") return EstimatorKind::kernel;
    throw ConfigError("unknown estimator '" + s + "' (expected crossing, weighted or kernel)");
}

inline ConstantsSource constants_from_string(const std::string& s) {
    if (s == "closed_form") return ConstantsSource::closed_form;
    if (s == "numeric") return ConstantsSource::numeric;
    if (s == "supplied") return ConstantsSource::supplied;
    throw ConfigError("unknown constants source '" + s + "' (expected closed_form, numeric or supplied)");
}

struct ExperimentConfig {
    ProcessParams params = ProcessParams::oscillating(1.0, 1.0);
    EstimatorKind estimator = EstimatorKind::weighted;
    /// Built-in kernel name, used when estimator == kernel.
    std::string kernel = "h1x2";
    /// Start point in user coordinates; empty means the threshold.
    std::optional<double> x0;
    double T = 1.0;
    double t_eval = 1.0;
    /// Observation frequencies (observations per unit time).
    std::vector<std::int64_t> n{4096};
    std::int64_t n_paths = 2000;
    std::uint64_t seed = 1;
    double localtime_floor = 1e-3;
    ConstantsSource constants = ConstantsSource::closed_form;
    std::optional<double> c;
    std::optional<double> K;
    unsigned workers = 0;

    double start() const noexcept { return x0.value_or(params.threshold()); }
    unsigned resolved_workers() const noexcept { return workers == 0 ? default_workers() : workers; }

    void validate() const {
        if (n.empty()) throw ConfigError("experiment needs at least one n");
        for (auto v : n) {
            if (v < 2) throw ConfigError("experiment n must be >= 2");
        }
        if (n_paths < 2) throw ConfigError("experiment n_paths must be >= 2");
        if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("experiment T must be positive");
        if (!(t_eval > 0.0) || t_eval > T) throw ConfigError("experiment t_eval must lie in (0, T]");
        if (!(localtime_floor >= 0.0)) throw ConfigError("experiment localtime_floor must be >= 0");
        if (x0 && !std::isfinite(*x0)) throw ConfigError("experiment x0 must be finite");
        if (constants == ConstantsSource::supplied && (!c || !K)) {
            throw ConfigError("constants = supplied needs both c and K");
        }
        if (K && !(*K > 0.0)) throw ConfigError("supplied K must be positive");
    }
};

/// Kernel whose eps-statistic the estimator is.
inline BivariateKernel estimator_kernel(const ExperimentConfig& cfg) {
    switch (cfg.estimator) {
        case EstimatorKind::crossing: return kernels::h0();
        case EstimatorKind::weighted: return kernels::h1x2();
        case EstimatorKind::kernel: return kernels::by_name(cfg.kernel);
    }
    return kernels::h0();
}

struct ResolvedConstants {
    double c = 0.0;
    double K = 0.0;
    std::string source;
};

/**
 * c and K for the experiment. closed_form uses the closed expressions where
 * they exist and falls back to the numeric assembly for K otherwise.
 */
inline ResolvedConstants resolve_constants(const ExperimentConfig& cfg, const SeriesConfig& series = {},
                                           const QuadratureConfig& quad = {}) {
    ResolvedConstants out;
    const ProcessParams& p = cfg.params;
    if (cfg.constants == ConstantsSource::supplied) {
        out.c = *cfg.c;
        out.K = *cfg.K;
        out.source = "supplied";
        return out;
    }
    auto numeric = [&]() {
        const BivariateKernel h = estimator_kernel(cfg);
        return p.is_skew() ? clt_constant_sbm(p, h, series, quad) : clt_constant_obm(p, h, series, quad);
    };
    if (cfg.constants == ConstantsSource::closed_form && cfg.estimator != EstimatorKind::kernel) {
        if (cfg.estimator == EstimatorKind::weighted) {
            const auto cf = closed_form_constants(
                p.is_skew() ? EstimatorFormula::weighted_sbm : EstimatorFormula::weighted_obm, p, series, quad);
            out.c = cf.limit_constant;
            out.K = *cf.clt_constant;
            out.source = "closed_form";
        } else {
            const auto cf = closed_form_constants(
                p.is_skew() ? EstimatorFormula::crossing_sbm : EstimatorFormula::crossing_obm, p, series, quad);
            out.c = cf.limit_constant;
            out.K = numeric().clt_constant;
            out.source = "closed_form c, numeric K";
        }
    } else {
        const auto rep = numeric();
        out.c = rep.limit_constant;
        out.K = rep.clt_constant;
        out.source = "numeric";
    }
    if (cfg.c) out.c = *cfg.c;
    if (cfg.K) out.K = *cfg.K;
    return out;
}

/// Sup distance between the empirical CDF of `samples` and `cdf`, both one-sided gaps.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ConfigError("ks_distance needs at least one sample");
    std::sort(samples.begin(), samples.end());
    const double m = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
    }
    return d;
}

namespace detail {

struct PathOutcome {
    double estimate = 0.0;   // estimator at t_eval
    double local_time = 0.0; // exact L at t_eval
    double sup_error = 0.0;  // sup over the grid up to T of |estimate - c L|
};

inline std::int64_t steps_for(double time, std::int64_t n) {
    const double v = time * static_cast<double>(n);
    const auto k = static_cast<std::int64_t>(std::llround(v));
    if (std::abs(v - static_cast<double>(k)) > 1e-9 * std::max(1.0, v)) {
        throw ConfigError("T * n and t_eval * n must be integers");
    }
    return k;
}

/// Simulates one path at frequency n and evaluates the estimator on the fly.
inline PathOutcome run_path(const ExperimentConfig& cfg, const BivariateKernel& kernel, std::int64_t n,
                            std::uint64_t stream_id, double c) {
    RandomStream rng(cfg.seed, stream_id);
    const ProcessParams& p = cfg.params;
    const std::int64_t total = steps_for(cfg.T, n);
    const std::int64_t k_eval = steps_for(cfg.t_eval, n);
    const double dt = 1.0 / static_cast<double>(n);
    const double sn = std::sqrt(static_cast<double>(n));
    double x = cfg.start() - p.threshold();
    long crossings = 0;
    double weighted = 0.0;
    double kernel_sum = 0.0;
    double lt = 0.0;
    PathOutcome out;
    for (std::int64_t k = 1; k <= total; ++k) {
        const Step s = process_step(p, dt, x, rng);
        if (x * s.y < 0.0) {
            ++crossings;
            weighted += 2.0 * std::abs(s.y);
        }
        if (cfg.estimator == EstimatorKind::kernel) kernel_sum += kernel(sn * x, sn * s.y);
        lt += s.d_ell;
        x = s.y;
        double est = 0.0;
        switch (cfg.estimator) {
            case EstimatorKind::crossing: est = static_cast<double>(crossings) / sn; break;
            case EstimatorKind::weighted: est = weighted; break;
            case EstimatorKind::kernel: est = kernel_sum / sn; break;
        }
        out.sup_error = std::max(out.sup_error, std::abs(est - c * lt));
        if (k == k_eval) {
            out.estimate = est;
            out.local_time = lt;
        }
    }
    return out;
}

inline std::vector<PathOutcome> run_paths(const ExperimentConfig& cfg, std::int64_t n, std::size_t n_index,
                                          double c) {
    const BivariateKernel kernel = estimator_kernel(cfg);
    std::vector<PathOutcome> out(static_cast<std::size_t>(cfg.n_paths));
    parallel_for(out.size(), cfg.resolved_workers(), [&](std::size_t i) {
        const std::uint64_t stream = (static_cast<std::uint64_t>(n_index) << 40) | i;
        out[i] = run_path(cfg, kernel, n, stream, c);
    });
    return out;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace detail

struct ZSampleSet {
    std::vector<double> z;
    std::int64_t excluded_count = 0;
    std::int64_t n = 0;
    double c = 0.0;
    double K = 0.0;
};

struct CltResult {
    ZSampleSet samples;
    double ks = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

inline double sample_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

/// z_i = n^{1/4} (eps - c L) / sqrt(K L) at t_eval for n = cfg.n.front().
inline CltResult run_clt_experiment(const ExperimentConfig& cfg, double c, double K) {
    cfg.validate();
    if (!(K > 0.0)) throw ConfigError("CLT experiment needs K > 0");
    const std::int64_t n = cfg.n.front();
    const auto paths = detail::run_paths(cfg, n, 0, c);
    CltResult res;
    res.samples.n = n;
    res.samples.c = c;
    res.samples.K = K;
    const double scale = std::pow(static_cast<double>(n), 0.25);
    for (const auto& p : paths) {
        if (p.local_time < cfg.localtime_floor || !(p.local_time > 0.0)) {
            ++res.samples.excluded_count;
            continue;
        }
        res.samples.z.push_back(scale * (p.estimate - c * p.local_time) / std::sqrt(K * p.local_time));
    }
    if (res.samples.z.size() < 2) {
        throw NumericError("all but " + std::to_string(res.samples.z.size()) +
                               " paths excluded by the local-time floor",
                           "clt");
    }
    res.ks = ks_distance(res.samples.z, std_normal_cdf);
    res.mean = sample_mean(res.samples.z);
    res.variance = sample_variance(res.samples.z);
    return res;
}

inline CltResult run_clt_experiment(const ExperimentConfig& cfg) {
    const auto rc = resolve_constants(cfg);
    return run_clt_experiment(cfg, rc.c, rc.K);
}

struct RateRow {
    std::int64_t n = 0;
    double rmse = 0.0;
    std::int64_t paths = 0;
};

struct RateTable {
    std::vector<RateRow> rows;
    double slope = 0.0;
    double slope_se = 0.0;
};

/// Least-squares slope of log(rmse) on log(n), equal weights.
inline std::pair<double, double> fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& rmse) {
    if (n.size() != rmse.size()) throw ConfigError("fit_loglog_slope: size mismatch");
    std::vector<double> xs;
    for (double v : n) {
        if (std::find(xs.begin(), xs.end(), v) == xs.end()) xs.push_back(v);
    }
    if (xs.size() < 3) throw ConfigError("rate fit needs at least 3 distinct n");
    const std::size_t k = n.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(n[i] > 0.0) || !(rmse[i] > 0.0)) throw NumericError("rate fit needs positive n and rmse", "rate");
        mx += std::log(n[i]);
        my += std::log(rmse[i]);
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double dx = std::log(n[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(rmse[i]) - my);
    }
    const double slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = std::log(rmse[i]) - my - slope * (std::log(n[i]) - mx);
        ssr += r * r;
    }
    const double se = k > 2 ? std::sqrt(ssr / static_cast<double>(k - 2) / sxx) : 0.0;
    return {slope, se};
}

/// RMSE over paths of eps - c L at t_eval for each n, and the log-log slope.
inline RateTable run_rate_experiment(const ExperimentConfig& cfg, double c) {
    cfg.validate();
    std::vector<std::int64_t> ns = cfg.n;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.size() < 3) throw ConfigError("rate experiment needs at least 3 distinct n");
    RateTable t;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const auto paths = detail::run_paths(cfg, ns[j], j, c);
        double s = 0.0;
        for (const auto& p : paths) s += (p.estimate - c * p.local_time) * (p.estimate - c * p.local_time);
        const double rmse = std::sqrt(s / static_cast<double>(paths.size()));
        t.rows.push_back({ns[j], rmse, cfg.n_paths});
        xs.push_back(static_cast<double>(ns[j]));
        ys.push_back(rmse);
    }
    std::tie(t.slope, t.slope_se) = fit_loglog_slope(xs, ys);
    return t;
}

inline RateTable run_rate_experiment(const ExperimentConfig& cfg) {
    return run_rate_experiment(cfg, resolve_constants(cfg).c);
}

struct ConsistencyRow {
    std::int64_t n = 0;
    double median_sup_error = 0.0;
    std::int64_t paths = 0;
};

struct ConsistencyTable {
    std::vector<ConsistencyRow> rows;
    bool strictly_decreasing = false;
};

/// Median over paths of sup_t |estimator - c L| on [0, T], for each n.
inline ConsistencyTable run_consistency_experiment(const ExperimentConfig& cfg, double c) {
    cfg.validate();
    std::vector<std::int64_t> ns = cfg.n;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    ConsistencyTable t;
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const auto paths = detail::run_paths(cfg, ns[j], j, c);
        std::vector<double> errs;
        errs.reserve(paths.size());
        for (const auto& p : paths) errs.push_back(p.sup_error);
        t.rows.push_back({ns[j], detail::median(std::move(errs)), cfg.n_paths});
    }
    t.strictly_decreasing = true;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        if (!(t.rows[i].median_sup_error < t.rows[i - 1].median_sup_error)) t.strictly_decreasing = false;
    }
    return t;
}

inline ConsistencyTable run_consistency_experiment(const ExperimentConfig& cfg) {
    return run_consistency_experiment(cfg, resolve_constants(cfg).c);
}

struct SamplerCheck {
    double ks = 0.0;
    double mean_localtime = 0.0;
    double mean_localtime_sq = 0.0;
    std::int64_t draws = 0;
};

/// One exact step from x0 - r over dt, `draws` times: KS against the transition CDF and local-time moments.
inline SamplerCheck run_sampler_check(const ProcessParams& params, double x0, double dt, std::int64_t draws,
                                      std::uint64_t seed, unsigned workers = 0) {
    if (draws < 1) throw ConfigError("sampler check needs at least one draw");
    detail::require_positive_time(dt);
    const double x = x0 - params.threshold();
    std::vector<double> ys(static_cast<std::size_t>(draws));
    std::vector<double> ls(ys.size());
    parallel_for(ys.size(), workers == 0 ? default_workers() : workers, [&](std::size_t i) {
        RandomStream rng(seed, i);
        const Step s = process_step(params, dt, x, rng);
        ys[i] = s.y;
        ls[i] = s.d_ell;
    });
    SamplerCheck out;
    out.draws = draws;
    out.ks = ks_distance(ys, [&](double y) { return transition_cdf(params, dt, x, y); });
    for (double l : ls) {
        out.mean_localtime += l;
        out.mean_localtime_sq += l * l;
    }
    out.mean_localtime /= static_cast<double>(draws);
    out.mean_localtime_sq /= static_cast<double>(draws);
    return out;
}

}  // namespace skewloc

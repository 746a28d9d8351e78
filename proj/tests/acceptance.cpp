// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every Monte Carlo check uses seed 1 (the preset seed).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "skewloc/skewloc.hpp"

using namespace skewloc;

namespace {

constexpr std::uint64_t seed = 1;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

int failures = 0;

void criterion(int id, double time_limit, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit > 0.0 && secs > time_limit) o.require(false, fmt("runtime over %.0f s", time_limit));
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s  (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string label(const ProcessParams& p) {
    char buf[64];
    if (p.is_skew()) {
        std::snprintf(buf, sizeof buf, "SBM(%g)", p.beta());
    } else {
        std::snprintf(buf, sizeof buf, "OBM(%g,%g)", p.sigma_minus(), p.sigma_plus());
    }
    return buf;
}

const std::vector<std::pair<double, double>> sigma_pairs{{1, 1}, {1, 2}, {2, 3}};

/// Chi-square p-value of draws (u = Y / sigma(Y), ell = L / m) from the threshold at t = 1
/// against cell probabilities of the joint density, split by the sign of Y.
double joint_chi_square(const ProcessParams& p, std::int64_t draws) {
    const std::vector<double> edges{0.0, 0.15, 0.3, 0.5, 0.75, 1.0, 1.4, 2.0, 3.0, 12.0};
    const std::size_t nb = edges.size() - 1;
    std::vector<double> u(static_cast<std::size_t>(draws));
    std::vector<double> l(u.size());
    parallel_for(u.size(), default_workers(), [&](std::size_t i) {
        RandomStream rng(seed, i);
        const Step s = process_step(p, 1.0, 0.0, rng);
        u[i] = p.to_skew_state(s.y);
        l[i] = s.d_ell / p.localtime_ratio();
    });
    auto bin = [&](double v) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), v);
        return std::min<std::size_t>(static_cast<std::size_t>(it - edges.begin()) - 1, nb - 1);
    };
    std::vector<double> observed(2 * nb * nb, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const std::size_t side = u[i] >= 0.0 ? 1 : 0;
        observed[(side * nb + bin(std::abs(u[i]))) * nb + bin(l[i])] += 1.0;
    }
    // Cell probabilities from the library's joint density, in user coordinates.
    const QuadratureConfig q;
    double chi2 = 0.0;
    double total_prob = 0.0;
    const double m = p.localtime_ratio();
    for (std::size_t side = 0; side < 2; ++side) {
        const double sg = side == 1 ? 1.0 : -1.0;
        const double s = p.sigma(sg);
        for (std::size_t a = 0; a < nb; ++a) {
            for (std::size_t b = 0; b < nb; ++b) {
                const double a0 = edges[a];
                const double a1 = a + 1 == nb ? 40.0 : edges[a + 1];
                const double b0 = edges[b];
                const double b1 = b + 1 == nb ? 40.0 : edges[b + 1];
                auto inner = [&](double au) {
                    const double y = sg * s * std::max(au, 1e-300);
                    auto f = [&](double lt) {
                        const double ell = m * lt;
                        const double d = p.is_skew() ? joint_density_skew(p.beta(), 1.0, y, ell)
                                                     : joint_density_obm(p, 1.0, y, ell);
                        return d * s * m;
                    };
                    return integrate(f, b0, b1, q.inner()).value;
                };
                const double prob = integrate(inner, a0, a1, q).value;
                total_prob += prob;
                const double expected = prob * static_cast<double>(draws);
                const double o = observed[(side * nb + a) * nb + b];
                chi2 += (o - expected) * (o - expected) / expected;
            }
        }
    }
    if (std::abs(total_prob - 1.0) > 1e-8) throw NumericError("cell probabilities do not sum to 1", "chi-square");
    const boost::math::chi_squared_distribution<double> dist(static_cast<double>(observed.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, chi2));
}

nlohmann::json clt_record(const RunConfig& cfg) {
    const auto rc = resolve_constants(cfg.experiment, cfg.series, cfg.quadrature);
    const auto r = run_clt_experiment(cfg.experiment, rc.c, rc.K);
    return experiment_record("verify clt", cfg, to_json(r), {{"ks", r.ks, 0.0, 0.06}, {"variance", r.variance, 0.85, 1.15}});
}

}  // namespace

int main() {
    const QuadratureConfig quad;
    const SeriesConfig series;
    std::printf("workers: %u\n", default_workers());

    criterion(1, 1.0, [&] {
        Outcome o;
        for (auto [sm, sp] : sigma_pairs) {
            const auto p = ProcessParams::oscillating(sm, sp);
            const double v = stationary_average(
                p, [&](double x) { return transform_H(p, kernels::g(), x, quad.inner()); }, quad.scaled(10));
            o.require(std::abs(v - 1.0) <= 1e-6, label(p) + " <lambda,H_g> - 1 = " + fmt("%.2e", v - 1.0));
        }
        return o;
    });

    criterion(2, 120.0, [&] {
        Outcome o;
        for (auto [sm, sp] : sigma_pairs) {
            const auto p = ProcessParams::oscillating(sm, sp);
            const double k = clt_constant_obm(p, kernels::h1x2(), series, quad).clt_constant;
            const double closed = 16.0 / (3.0 * sqrt_2pi) * (sm * sm + sp * sp) / (sm + sp);
            o.require(std::abs(k / closed - 1.0) <= 0.01, label(p) + " K = " + fmt("%.6f", k) + " vs " + fmt("%.6f", closed));
            if (sm == sp) o.require(std::abs(k - 2.127693) <= 1e-6, "K(1,1) = " + fmt("%.7f", k));
        }
        return o;
    });

    criterion(3, 60.0, [&] {
        Outcome o;
        double worst = 0.0;
        for (auto [sm, sp] : sigma_pairs) {
            const auto p = ProcessParams::oscillating(sm, sp);
            for (double x = -3.0; x <= 3.0; x += 0.5) worst = std::max(worst, std::abs(q_series(p, kernels::h1x2(), x, series, quad)));
        }
        o.require(worst <= 1e-6, "max |q_series(2h1)| on grid = " + fmt("%.2e", worst));
        for (double b : {-0.5, 0.5}) {
            const double v = weighted_skew_series(b, 0.0, series, quad).value;
            o.require(std::abs(v) <= 1e-4, "P_beta(0) at beta " + fmt("%g", b) + " = " + fmt("%.2e", v));
        }
        return o;
    });

    criterion(4, 0.0, [&] {
        Outcome o;
        const double v = triple_integral(ProcessParams::oscillating(1, 1), kernels::h1x2(), quad);
        o.require(std::abs(v - 0.531923) <= 1e-3, "term (iv) integral = " + fmt("%.7f", v));
        return o;
    });

    criterion(5, 120.0, [&] {
        Outcome o;
        struct Case {
            ProcessParams p;
            double x;
            double dt;
        };
        const std::vector<Case> cases{{ProcessParams::skew(0.5), 0.0, 1.0},
                                      {ProcessParams::skew(-0.7), 1.3, 0.25},
                                      {ProcessParams::skew(0.0), 2.0, 1.0},
                                      {ProcessParams::oscillating(1, 1), 0.3, 1.0},
                                      {ProcessParams::oscillating(1, 2), 0.5, 0.5},
                                      {ProcessParams::oscillating(2, 3), -1.0, 0.7}};
        double worst = 0.0;
        for (const auto& c : cases) {
            worst = std::max(worst, run_sampler_check(c.p, c.x, c.dt, 200000, seed).ks);
        }
        o.require(worst < 0.005, "max one-step KS = " + fmt("%.5f", worst));
        for (const auto& p : {ProcessParams::oscillating(1, 1), ProcessParams::skew(0.5), ProcessParams::oscillating(1, 2)}) {
            const double pv = joint_chi_square(p, 1000000);
            o.require(pv > 0.01, label(p) + " joint chi2 p = " + fmt("%.3f", pv));
        }
        return o;
    });

    criterion(6, 0.0, [&] {
        Outcome o;
        const std::int64_t draws = 200000;
        int checked = 0;
        double worst_z = 0.0;
        for (const auto& p : {ProcessParams::skew(0.5), ProcessParams::oscillating(1, 2)}) {
            for (double x : {0.0, 0.5, 2.0}) {
                const double dt = 0.25;
                std::vector<double> l(static_cast<std::size_t>(draws));
                parallel_for(l.size(), default_workers(), [&](std::size_t i) {
                    RandomStream rng(seed, i);
                    l[i] = process_step(p, dt, x, rng).d_ell;
                });
                const double sd = std::sqrt(dt);
                for (int k : {1, 2}) {
                    double s = 0.0;
                    double s2 = 0.0;
                    for (double v : l) {
                        const double w = std::pow(v, k);
                        s += w;
                        s2 += w * w;
                    }
                    const double mean = s / draws;
                    const double se = std::sqrt(std::max(s2 / draws - mean * mean, 0.0) / draws);
                    const double oracle = std::pow(sd, k) * localtime_moment(p, [](double) { return 1.0; }, k, x / sd, quad);
                    const double z = se > 0.0 ? std::abs(mean - oracle) / se : (mean == oracle ? 0.0 : HUGE_VAL);
                    worst_z = std::max(worst_z, z);
                    ++checked;
                }
            }
        }
        o.require(worst_z <= 3.0, std::to_string(checked) + " moment checks, max |z| = " + fmt("%.2f", worst_z));
        for (double b : {-0.5, 0.0, 0.5}) {
            const auto s = run_sampler_check(ProcessParams::skew(b), 0.0, 1.0, draws, seed + 1);
            const double se = std::sqrt((s.mean_localtime_sq - s.mean_localtime * s.mean_localtime) / draws);
            const double z = (s.mean_localtime - sqrt_2_over_pi) / se;
            o.require(std::abs(z) <= 3.0, "E L_1 at beta " + fmt("%g", b) + " = " + fmt("%.5f", s.mean_localtime) + fmt(" (z %.2f)", z));
        }
        return o;
    });

    criterion(7, 600.0, [&] {
        Outcome o;
        for (const char* name : {"bm-weighted-n4096", "obm12-weighted-n4096", "sbm05-weighted-n4096"}) {
            const RunConfig cfg = preset(name);
            const auto rc = resolve_constants(cfg.experiment, cfg.series, cfg.quadrature);
            const auto r = run_clt_experiment(cfg.experiment, rc.c, rc.K);
            o.require(r.ks <= 0.06 && r.variance >= 0.85 && r.variance <= 1.15,
                      std::string(name) + ": KS " + fmt("%.4f", r.ks) + ", Var " + fmt("%.3f", r.variance) +
                          ", K " + fmt("%.4f", rc.K));
        }
        return o;
    });

    criterion(8, 900.0, [&] {
        Outcome o;
        const RunConfig cfg = preset("obm12-weighted-rate");
        const auto t = run_rate_experiment(cfg.experiment, 1.0);
        o.require(t.slope >= -0.35 && t.slope <= -0.15,
                  "slope " + fmt("%.4f", t.slope) + " +- " + fmt("%.4f", t.slope_se));
        return o;
    });

    criterion(9, 0.0, [&] {
        Outcome o;
        for (const char* name : {"sbm05-crossing-consistency", "obm12-crossing-consistency"}) {
            const RunConfig cfg = preset(name);
            const ProcessParams& p = cfg.experiment.params;
            const double c = p.is_skew() ? sqrt_2_over_pi * (1.0 - p.beta() * p.beta())
                                         : 2.0 / (p.sigma_minus() + p.sigma_plus()) * sqrt_2_over_pi;
            const auto t = run_consistency_experiment(cfg.experiment, c);
            std::string rows;
            for (const auto& r : t.rows) rows += (rows.empty() ? "" : " > ") + fmt("%.4f", r.median_sup_error);
            o.require(t.strictly_decreasing, label(p) + " medians " + rows);
        }
        return o;
    });

    criterion(10, 0.0, [&] {
        Outcome o;
        auto with_workers = [](RunConfig cfg, unsigned w) {
            cfg.experiment.workers = w;
            cfg.series.workers = w;
            return cfg;
        };
        for (const char* name : {"bm-weighted-n4096", "sbm05-weighted-n4096"}) {
            const auto a = clt_record(with_workers(preset(name), 1)).dump(2);
            const auto b = clt_record(with_workers(preset(name), 4)).dump(2);
            const auto c = clt_record(with_workers(preset(name), 16)).dump(2);
            o.require(a == b && b == c, std::string(name) + " records identical for 1/4/16 workers");
        }
        {
            RunConfig cfg = preset("sbm05-crossing-consistency");
            auto rec = [&](unsigned w) {
                const auto x = with_workers(cfg, w);
                const auto t = run_consistency_experiment(x.experiment, resolve_constants(x.experiment).c);
                return experiment_record("verify consistency", x, to_json(t), {}).dump(2);
            };
            o.require(rec(1) == rec(4), "consistency record identical for 1/4 workers");
        }
        return o;
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

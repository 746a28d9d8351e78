// skewloc command line: constants, simulate, estimate, verify.
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 failed check under --strict.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skewloc/manifest.hpp"
#include "skewloc/skewloc.hpp"

using namespace skewloc;
namespace fs = std::filesystem;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_strict = 4;

struct StrictFailure {};

struct CommonOptions {
    std::string config_path;
    std::string preset_name;
    std::string process;
    std::vector<double> sigma;
    std::optional<double> beta;
    std::optional<double> r;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

void add_process_options(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config_path, "Config file")->check(CLI::ExistingFile);
    app->add_option("--process", o.process, "Process kind")->check(CLI::IsMember({"obm", "sbm", "skew"}));
    app->add_option("--sigma", o.sigma, "sigma_minus,sigma_plus")->delimiter(',')->expected(2);
    app->add_option("--beta", o.beta, "Skewness of an SBM");
    app->add_option("--r", o.r, "Threshold");
    app->add_option("--seed", o.seed, "Seed (overrides SKEWLOC_SEED and the config)");
    app->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
}

/// Preset or config file, then SKEWLOC_SEED, then explicit flags.
RunConfig resolve(const CommonOptions& o) {
    RunConfig cfg;
    if (!o.preset_name.empty()) cfg = preset(o.preset_name);
    if (!o.config_path.empty()) {
        if (!o.preset_name.empty()) throw ConfigError("--config and --preset are exclusive");
        cfg = load_config(o.config_path);
    }
    apply_env_overrides(cfg);
    ExperimentConfig& ex = cfg.experiment;
    const double r = o.r.value_or(ex.params.threshold());
    std::string kind = o.process;
    if (kind.empty() && (o.beta || !o.sigma.empty())) kind = o.beta ? "sbm" : "obm";
    if (kind == "sbm" || kind == "skew") {
        if (!o.sigma.empty()) throw ConfigError("--sigma is not valid for an SBM");
        ex.params = ProcessParams::skew(o.beta.value_or(ex.params.is_skew() ? ex.params.beta() : 0.0), r);
    } else if (kind == "obm") {
        if (o.beta) throw ConfigError("--beta is not valid for an OBM; use --sigma");
        if (!o.sigma.empty()) {
            ex.params = ProcessParams::oscillating(o.sigma[0], o.sigma[1], r);
        } else if (ex.params.is_oscillating()) {
            ex.params = ProcessParams::oscillating(ex.params.sigma_minus(), ex.params.sigma_plus(), r);
        } else {
            ex.params = ProcessParams::oscillating(1.0, 1.0, r);
        }
    } else if (o.r) {
        ex.params = ex.params.is_skew()
                        ? ProcessParams::skew(ex.params.beta(), r)
                        : ProcessParams::oscillating(ex.params.sigma_minus(), ex.params.sigma_plus(), r);
    }
    if (o.seed) ex.seed = *o.seed;
    if (o.workers) {
        ex.workers = *o.workers;
        cfg.series.workers = *o.workers;
    }
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

EstimatorFormula formula_for(const ProcessParams& p, const std::string& kernel) {
    if (kernel == "h0") return p.is_skew() ? EstimatorFormula::crossing_sbm : EstimatorFormula::crossing_obm;
    if (kernel == "h1x2") return p.is_skew() ? EstimatorFormula::weighted_sbm : EstimatorFormula::weighted_obm;
    throw ConfigError("no closed form for kernel '" + kernel + "' (only h0 and h1x2)");
}

int cmd_constants(const CommonOptions& o, const std::string& kernel, bool closed, bool compare,
                  const std::string& out_path) {
    const RunConfig cfg = resolve(o);
    const ProcessParams& p = cfg.experiment.params;
    nlohmann::json j;
    auto numeric = [&] {
        const BivariateKernel h = kernels::by_name(kernel);
        return p.is_skew() ? clt_constant_sbm(p, h, cfg.series, cfg.quadrature)
                           : clt_constant_obm(p, h, cfg.series, cfg.quadrature);
    };
    if (compare) {
        const auto cf = closed_form_constants(formula_for(p, kernel), p, cfg.series, cfg.quadrature);
        const auto rep = numeric();
        j = {{"schema", json_schema}, {"numeric", to_json(rep)}, {"closed_form", to_json(cf)}};
        j["closed_form"]["formula"] = to_string(formula_for(p, kernel));
        j["relative_difference"] = {
            {"limit_constant", std::abs(rep.limit_constant - cf.limit_constant) / std::abs(cf.limit_constant)}};
        if (cf.clt_constant) {
            j["relative_difference"]["clt_constant"] =
                std::abs(rep.clt_constant - *cf.clt_constant) / std::abs(*cf.clt_constant);
        }
    } else if (closed) {
        const auto kind = formula_for(p, kernel);
        j = to_json(closed_form_constants(kind, p, cfg.series, cfg.quadrature));
        j["schema"] = json_schema;
        j["formula"] = to_string(kind);
    } else {
        j = to_json(numeric());
    }
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text(out_path, text);
    }
    return 0;
}

struct PathOptions {
    std::int64_t n = 1024;
    double T = 1.0;
    std::optional<double> x0;
    std::uint64_t stream = 0;
    std::string format = "csv";
    std::string out;
    bool manifest = false;
};

PathSample fresh_path(const RunConfig& cfg, const PathOptions& po) {
    const double x0 = po.x0.value_or(cfg.experiment.params.threshold());
    const auto steps = static_cast<std::int64_t>(std::llround(po.T * static_cast<double>(po.n)));
    return simulate_path(cfg.experiment.params, x0, po.T, steps, cfg.experiment.seed, po.stream);
}

int cmd_simulate(const CommonOptions& o, const PathOptions& po) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve(o);
    const PathSample path = fresh_path(cfg, po);
    if (po.out.empty()) {
        if (po.format != "csv") throw ConfigError("binary output needs --out");
        write_path_csv(std::cout, path);
        return 0;
    }
    {
        std::ofstream out(po.out, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + po.out + "'");
        if (po.format == "csv") {
            write_path_csv(out, path);
        } else {
            write_path_binary(out, path);
        }
    }
    if (po.manifest) {
        RunManifest m{"simulate", cfg, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                      {po.out}};
        m.write(po.out + ".manifest.json");
    }
    return 0;
}

PathSample load_path(const std::string& input, const ProcessParams& params) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + input + "'");
    char magic[8] = {};
    in.read(magic, 8);
    in.clear();
    in.seekg(0);
    if (std::string(magic, 8) == "SKWLPATH") return read_path_binary(in);
    return read_path_csv(in, params);
}

int cmd_estimate(const CommonOptions& o, const PathOptions& po, const std::string& estimator,
                 const std::string& kernel, const std::string& input) {
    const RunConfig cfg = resolve(o);
    const PathSample path = input.empty() ? fresh_path(cfg, po) : load_path(input, cfg.experiment.params);
    const double r = path.params.threshold();
    const auto N = static_cast<double>(path.n_steps);
    StepFunction f;
    const EstimatorKind kind = estimator_from_string(estimator);
    switch (kind) {
        case EstimatorKind::crossing: f = crossing_estimator(path.positions, r, path.T, N); break;
        case EstimatorKind::weighted: f = weighted_estimator(path.positions, r, path.T, N); break;
        case EstimatorKind::kernel:
            f = epsilon_stat(path.positions, r, kernels::by_name(kernel), N / path.T);
            break;
    }
    std::ostringstream text;
    write_step_csv(text, f.grid(), f.values(), estimator);
    if (po.out.empty()) {
        std::cout << text.str();
    } else {
        write_text(po.out, text.str());
    }
    std::cerr << estimator << " at T = " << format_double(path.T) << ": " << format_double(f.back()) << '\n';
    return 0;
}

struct VerifyOptions {
    std::string out_dir;
    bool strict = false;
};

int cmd_verify(const std::string& what, const CommonOptions& o, const VerifyOptions& vo) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve(o);
    const ExperimentConfig& ex = cfg.experiment;
    nlohmann::json result;
    std::vector<Check> checks;
    std::string csv;
    std::ostringstream data;
    if (what == "clt") {
        const auto rc = resolve_constants(ex, cfg.series, cfg.quadrature);
        const auto res = run_clt_experiment(ex, rc.c, rc.K);
        result = to_json(res);
        result["constants_source"] = rc.source;
        checks = {{"ks", res.ks, 0.0, 0.06}, {"variance", res.variance, 0.85, 1.15}};
        write_qq_csv(data, res.samples.z);
        csv = "qq.csv";
    } else if (what == "rate") {
        const auto rc = resolve_constants(ex, cfg.series, cfg.quadrature);
        const auto t = run_rate_experiment(ex, rc.c);
        result = to_json(t);
        result["c"] = rc.c;
        checks = {{"slope", t.slope, -0.35, -0.15}};
        write_rate_csv(data, t);
        csv = "rate.csv";
    } else if (what == "consistency") {
        const double c = ex.c ? *ex.c : resolve_constants(ex, cfg.series, cfg.quadrature).c;
        const auto t = run_consistency_experiment(ex, c);
        result = to_json(t);
        result["c"] = c;
        checks = {{"strictly_decreasing", t.strictly_decreasing ? 1.0 : 0.0, 1.0, 1.0}};
        write_consistency_csv(data, t);
        csv = "consistency.csv";
    } else {
        // One step of length T from x0, `paths` draws.
        const auto s = run_sampler_check(ex.params, ex.start(), ex.T, ex.n_paths, ex.seed, ex.resolved_workers());
        result = to_json(s);
        checks = {{"ks", s.ks, 0.0, 0.005}};
    }
    const nlohmann::json record = experiment_record("verify " + what, cfg, result, checks);
    const std::string text = record.dump(2) + "\n";
    if (vo.out_dir.empty()) {
        std::cout << text;
    } else {
        fs::create_directories(vo.out_dir);
        const std::string rec = (fs::path(vo.out_dir) / "record.json").string();
        write_text(rec, text);
        std::vector<std::string> outputs{rec};
        if (!csv.empty()) {
            outputs.push_back((fs::path(vo.out_dir) / csv).string());
            write_text(outputs.back(), data.str());
        }
        RunManifest m{"verify " + what, cfg,
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), outputs};
        m.write((fs::path(vo.out_dir) / "manifest.json").string());
        std::cerr << "wrote " << rec << '\n';
    }
    if (vo.strict && !all_pass(checks)) throw StrictFailure{};
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold local-time estimators for skew and oscillating Brownian motion"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", version);
    std::string check_path;
    app.add_option("--check", check_path, "Verify the checksums in a manifest and exit")->check(CLI::ExistingFile);

    CommonOptions co;
    PathOptions po;

    auto* constants = app.add_subcommand("constants", "Limit and CLT constants as JSON");
    add_process_options(constants, co);
    std::string kernel = "h1x2";
    bool closed = false;
    bool compare = false;
    std::string const_out;
    constants->add_option("--kernel", kernel, "Kernel name")->check(CLI::IsMember({"h0", "h1", "h1x2", "g"}));
    constants->add_flag("--closed-form", closed, "Use closed-form constants where available");
    constants->add_flag("--compare", compare, "Report numeric and closed-form constants");
    constants->add_option("--out", const_out, "Write JSON here instead of stdout");

    auto add_path_options = [&](CLI::App* sub) {
        sub->add_option("--n", po.n, "Observations per unit time")->check(CLI::PositiveNumber);
        sub->add_option("--T", po.T, "Horizon")->check(CLI::PositiveNumber);
        sub->add_option("--x0", po.x0, "Start point (default: the threshold)");
        sub->add_option("--stream", po.stream, "Stream id");
        sub->add_option("--out", po.out, "Output file (default stdout)");
    };

    auto* simulate = app.add_subcommand("simulate", "Simulate one exact path");
    add_process_options(simulate, co);
    add_path_options(simulate);
    simulate->add_option("--format", po.format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));
    simulate->add_flag("--manifest", po.manifest, "Write <out>.manifest.json");

    auto* estimate = app.add_subcommand("estimate", "Estimator path as CSV");
    add_process_options(estimate, co);
    add_path_options(estimate);
    std::string estimator = "crossing";
    std::string input;
    std::string est_kernel = "h1x2";
    estimate->add_option("--estimator", estimator, "crossing, weighted or kernel")
        ->check(CLI::IsMember({"crossing", "weighted", "kernel"}));
    estimate->add_option("--kernel", est_kernel, "Kernel for --estimator kernel")
        ->check(CLI::IsMember({"h0", "h1", "h1x2", "g"}));
    estimate->add_option("--input", input, "Path file (CSV or SKWLPATH); default: simulate one")
        ->check(CLI::ExistingFile);

    auto* verify = app.add_subcommand("verify", "Monte Carlo checks");
    verify->require_subcommand(1);
    VerifyOptions vo;
    std::string verify_what;
    for (const char* name : {"clt", "rate", "consistency", "sampler"}) {
        auto* sub = verify->add_subcommand(name);
        add_process_options(sub, co);
        sub->add_option("--preset", co.preset_name, "Named configuration");
        sub->add_option("--out-dir", vo.out_dir, "Write record.json, CSV and manifest.json here");
        sub->add_flag("--strict", vo.strict, "Exit 4 when a check fails");
        sub->callback([&verify_what, name] { verify_what = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (!check_path.empty()) {
            const auto bad = check_manifest(check_path);
            for (const auto& b : bad) std::cerr << b << '\n';
            if (bad.empty()) std::cerr << "manifest ok\n";
            return bad.empty() ? 0 : exit_strict;
        }
        if (constants->parsed()) return cmd_constants(co, kernel, closed, compare, const_out);
        if (simulate->parsed()) return cmd_simulate(co, po);
        if (estimate->parsed()) return cmd_estimate(co, po, estimator, est_kernel, input);
        if (!verify_what.empty()) return cmd_verify(verify_what, co, vo);
        std::cout << app.help();
        return 0;
    } catch (const StrictFailure&) {
        std::cerr << "check failed\n";
        return exit_strict;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
}

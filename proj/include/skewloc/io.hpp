#pragma once

// Config files, path files (CSV and binary) and JSON records.
//
// Config format: line oriented, '#' starts a comment. A section header
// "[name]" may be followed on the same line by key=value tokens; other lines
// are either "key = value" or several whitespace separated key=value tokens.
// See docs/config-format.md.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "skewloc/asymptotics.hpp"
#include "skewloc/errors.hpp"
#include "skewloc/mc.hpp"
#include "skewloc/process.hpp"
#include "skewloc/quadrature.hpp"
#include "skewloc/sampler.hpp"

namespace skewloc {

inline constexpr const char* version = "0.3.0";
inline constexpr int json_schema = 1;

struct RunConfig {
    ExperimentConfig experiment;
    QuadratureConfig quadrature;
    SeriesConfig series;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string at_line(int line) { return "line " + std::to_string(line) + ": "; }

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

inline double parse_double(const std::string& text, const std::string& key, int line) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || text.empty()) {
        throw ConfigError(at_line(line) + "'" + key + "' expects a number, got '" + text + "'");
    }
    return v;
}

template <class Int>
Int parse_int(const std::string& text, const std::string& key, int line) {
    Int v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || text.empty()) {
        throw ConfigError(at_line(line) + "'" + key + "' expects an integer, got '" + text + "'");
    }
    return v;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

class ConfigReader {
public:
    explicit ConfigReader(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        std::string section;
        while (std::getline(in, raw)) {
            ++line;
            std::string s = raw;
            if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                const auto close = s.find(']');
                if (close == std::string::npos) throw ConfigError(at_line(line) + "unterminated section header");
                section = trim(std::string_view(s).substr(1, close - 1));
                if (section != "process" && section != "kernel" && section != "experiment" &&
                    section != "numerics") {
                    throw ConfigError(at_line(line) + "unknown section [" + section + "]");
                }
                sections_[section];
                s = trim(std::string_view(s).substr(close + 1));
                if (s.empty()) continue;
            }
            if (section.empty()) throw ConfigError(at_line(line) + "key outside of any section");
            const auto eqs = std::count(s.begin(), s.end(), '=');
            if (eqs == 0) throw ConfigError(at_line(line) + "expected key = value, got '" + s + "'");
            if (eqs == 1) {
                const auto eq = s.find('=');
                add(section, trim(std::string_view(s).substr(0, eq)), trim(std::string_view(s).substr(eq + 1)), line);
                continue;
            }
            std::istringstream tokens(s);
            std::string tok;
            while (tokens >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos || eq == 0 || tok.find('=', eq + 1) != std::string::npos) {
                    throw ConfigError(at_line(line) + "expected key=value token, got '" + tok + "'");
                }
                add(section, tok.substr(0, eq), tok.substr(eq + 1), line);
            }
        }
    }

    /// Entries of a section; every one must be consumed by take().
    Section& section(const std::string& name) { return sections_[name]; }

    void check_consumed() const {
        for (const auto& [name, sec] : sections_) {
            for (const auto& [key, entry] : sec) {
                throw ConfigError(at_line(entry.line) + "unknown key '" + key + "' in [" + name + "]");
            }
        }
    }

private:
    void add(const std::string& section, const std::string& key, const std::string& value, int line) {
        if (key.empty()) throw ConfigError(at_line(line) + "empty key");
        if (value.empty()) throw ConfigError(at_line(line) + "empty value for '" + key + "'");
        auto& sec = sections_[section];
        if (const auto it = sec.find(key); it != sec.end()) {
            throw ConfigError("duplicate key '" + key + "' in [" + section + "] at lines " +
                              std::to_string(it->second.line) + " and " + std::to_string(line));
        }
        sec[key] = {value, line};
    }

    std::map<std::string, Section> sections_;
};

inline std::optional<Entry> take(Section& sec, const std::string& key) {
    const auto it = sec.find(key);
    if (it == sec.end()) return std::nullopt;
    Entry e = it->second;
    sec.erase(it);
    return e;
}

template <class F>
auto with_line(int line, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(at_line(line) + e.what());
    }
}

inline ProcessParams parse_process(Section& sec) {
    const auto kind = take(sec, "kind");
    const std::string k = kind ? kind->value : "obm";
    const int kline = kind ? kind->line : 0;
    const auto r = take(sec, "r");
    const double thr = r ? parse_double(r->value, "r", r->line) : 0.0;
    const int rline = r ? r->line : kline;
    if (k == "skew" || k == "sbm") {
        for (const char* bad : {"sigma", "sigma_minus", "sigma_plus"}) {
            if (const auto e = take(sec, bad)) {
                throw ConfigError(at_line(e->line) + "'" + bad + "' is not valid for kind = skew");
            }
        }
        const auto b = take(sec, "beta");
        const double beta = b ? parse_double(b->value, "beta", b->line) : 0.0;
        return with_line(b ? b->line : rline, [&] { return ProcessParams::skew(beta, thr); });
    }
    if (k == "obm" || k == "oscillating") {
        if (const auto e = take(sec, "beta")) {
            throw ConfigError(at_line(e->line) + "'beta' is not valid for kind = obm");
        }
        double sm = 1.0;
        double sp = 1.0;
        int line = rline;
        if (const auto s = take(sec, "sigma")) {
            const auto parts = split_list(s->value);
            if (parts.size() != 2) throw ConfigError(at_line(s->line) + "'sigma' expects sigma_minus,sigma_plus");
            sm = parse_double(parts[0], "sigma", s->line);
            sp = parse_double(parts[1], "sigma", s->line);
            line = s->line;
            for (const char* dup : {"sigma_minus", "sigma_plus"}) {
                if (const auto e = take(sec, dup)) {
                    throw ConfigError(at_line(e->line) + "'" + dup + "' conflicts with 'sigma' at line " +
                                      std::to_string(s->line));
                }
            }
        } else {
            if (const auto e = take(sec, "sigma_minus")) {
                sm = parse_double(e->value, "sigma_minus", e->line);
                line = e->line;
            }
            if (const auto e = take(sec, "sigma_plus")) {
                sp = parse_double(e->value, "sigma_plus", e->line);
                line = e->line;
            }
        }
        return with_line(line, [&] { return ProcessParams::oscillating(sm, sp, thr); });
    }
    throw ConfigError(at_line(kline) + "unknown process kind '" + k + "' (expected skew or obm)");
}

}  // namespace detail

/// Parses and validates a config; every default is filled in.
inline RunConfig parse_config(const std::string& text) {
    using namespace detail;
    ConfigReader reader(text);
    RunConfig cfg;
    ExperimentConfig& ex = cfg.experiment;

    ex.params = parse_process(reader.section("process"));

    Section& ker = reader.section("kernel");
    if (const auto e = take(ker, "name")) {
        with_line(e->line, [&] { return kernels::by_name(e->value); });
        ex.kernel = e->value;
        ex.estimator = EstimatorKind::kernel;
    }
    if (const auto e = take(ker, "estimator")) {
        ex.estimator = with_line(e->line, [&] { return estimator_from_string(e->value); });
    }

    Section& exs = reader.section("experiment");
    int last_line = 0;
    auto num = [&](const char* key, auto& field) {
        if (const auto e = take(exs, key)) {
            last_line = e->line;
            using T = std::decay_t<decltype(field)>;
            if constexpr (std::is_floating_point_v<T>) {
                field = parse_double(e->value, key, e->line);
            } else {
                field = parse_int<T>(e->value, key, e->line);
            }
        }
    };
    if (const auto e = take(exs, "x0")) ex.x0 = parse_double(e->value, "x0", e->line);
    num("T", ex.T);
    num("t_eval", ex.t_eval);
    if (const auto e = take(exs, "n")) {
        ex.n.clear();
        for (const auto& part : split_list(e->value)) ex.n.push_back(parse_int<std::int64_t>(part, "n", e->line));
    }
    num("paths", ex.n_paths);
    num("seed", ex.seed);
    num("localtime_floor", ex.localtime_floor);
    num("workers", ex.workers);
    if (const auto e = take(exs, "constants")) {
        ex.constants = with_line(e->line, [&] { return constants_from_string(e->value); });
    }
    if (const auto e = take(exs, "c")) ex.c = parse_double(e->value, "c", e->line);
    if (const auto e = take(exs, "K")) ex.K = parse_double(e->value, "K", e->line);

    Section& nm = reader.section("numerics");
    auto nnum = [&](const char* key, auto& field) {
        if (const auto e = take(nm, key)) {
            using T = std::decay_t<decltype(field)>;
            if constexpr (std::is_floating_point_v<T>) {
                field = parse_double(e->value, key, e->line);
            } else {
                field = parse_int<T>(e->value, key, e->line);
            }
        }
    };
    nnum("abs_tol", cfg.quadrature.abs_tol);
    nnum("rel_tol", cfg.quadrature.rel_tol);
    nnum("tail_sigmas", cfg.quadrature.tail_sigmas);
    nnum("max_subdivisions", cfg.quadrature.max_subdivisions);
    nnum("j_min", cfg.series.j_min);
    nnum("term_tol", cfg.series.term_tol);
    nnum("decay_check_window", cfg.series.decay_check_window);
    nnum("j_max", cfg.series.j_max);
    nnum("chebyshev_order", cfg.series.chebyshev_order);

    reader.check_consumed();
    (void)last_line;
    ex.validate();
    cfg.quadrature.validate();
    cfg.series.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// SKEWLOC_SEED, when set, replaces the configured seed.
inline void apply_env_overrides(RunConfig& cfg) {
    const char* s = std::getenv("SKEWLOC_SEED");
    if (s == nullptr) return;
    const std::string text = s;
    cfg.experiment.seed = detail::parse_int<std::uint64_t>(text, "SKEWLOC_SEED", 0);
}

/// Canonical text form: every key written, doubles with 17 significant digits.
inline std::string to_config_text(const RunConfig& cfg) {
    const ExperimentConfig& ex = cfg.experiment;
    const ProcessParams& p = ex.params;
    std::ostringstream o;
    o << "[process]\n";
    if (p.is_skew()) {
        o << "kind = skew\nbeta = " << format_double(p.beta()) << '\n';
    } else {
        o << "kind = obm\nsigma_minus = " << format_double(p.sigma_minus())
          << "\nsigma_plus = " << format_double(p.sigma_plus()) << '\n';
    }
    o << "r = " << format_double(p.threshold()) << "\n\n[kernel]\n";
    if (ex.estimator == EstimatorKind::kernel) o << "name = " << ex.kernel << '\n';
    o << "estimator = " << to_string(ex.estimator) << "\n\n[experiment]\n";
    if (ex.x0) o << "x0 = " << format_double(*ex.x0) << '\n';
    o << "T = " << format_double(ex.T) << "\nt_eval = " << format_double(ex.t_eval) << "\nn = ";
    for (std::size_t i = 0; i < ex.n.size(); ++i) o << (i ? ", " : "") << ex.n[i];
    o << "\npaths = " << ex.n_paths << "\nseed = " << ex.seed
      << "\nlocaltime_floor = " << format_double(ex.localtime_floor) << "\nworkers = " << ex.workers
      << "\nconstants = " << to_string(ex.constants) << '\n';
    if (ex.c) o << "c = " << format_double(*ex.c) << '\n';
    if (ex.K) o << "K = " << format_double(*ex.K) << '\n';
    const auto& q = cfg.quadrature;
    const auto& s = cfg.series;
    o << "\n[numerics]\nabs_tol = " << format_double(q.abs_tol) << "\nrel_tol = " << format_double(q.rel_tol)
      << "\ntail_sigmas = " << format_double(q.tail_sigmas) << "\nmax_subdivisions = " << q.max_subdivisions
      << "\nj_min = " << s.j_min << "\nterm_tol = " << format_double(s.term_tol)
      << "\ndecay_check_window = " << s.decay_check_window << "\nj_max = " << s.j_max
      << "\nchebyshev_order = " << s.chebyshev_order << '\n';
    return o.str();
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const ProcessParams& p) {
    nlohmann::json j;
    j["kind"] = p.is_skew() ? "skew" : "obm";
    if (p.is_skew()) {
        j["beta"] = p.beta();
    } else {
        j["sigma_minus"] = p.sigma_minus();
        j["sigma_plus"] = p.sigma_plus();
    }
    j["r"] = p.threshold();
    return j;
}

/// The config as JSON. Worker count is left out: it never changes results.
inline nlohmann::json to_json(const RunConfig& cfg) {
    const ExperimentConfig& ex = cfg.experiment;
    nlohmann::json j;
    j["process"] = to_json(ex.params);
    j["estimator"] = to_string(ex.estimator);
    if (ex.estimator == EstimatorKind::kernel) j["kernel"] = ex.kernel;
    j["x0"] = ex.start();
    j["T"] = ex.T;
    j["t_eval"] = ex.t_eval;
    j["n"] = ex.n;
    j["paths"] = ex.n_paths;
    j["seed"] = ex.seed;
    j["localtime_floor"] = ex.localtime_floor;
    j["constants"] = to_string(ex.constants);
    if (ex.c) j["c"] = *ex.c;
    if (ex.K) j["K"] = *ex.K;
    j["numerics"] = {{"abs_tol", cfg.quadrature.abs_tol},
                     {"rel_tol", cfg.quadrature.rel_tol},
                     {"tail_sigmas", cfg.quadrature.tail_sigmas},
                     {"max_subdivisions", cfg.quadrature.max_subdivisions},
                     {"j_min", cfg.series.j_min},
                     {"term_tol", cfg.series.term_tol},
                     {"decay_check_window", cfg.series.decay_check_window},
                     {"j_max", cfg.series.j_max},
                     {"chebyshev_order", cfg.series.chebyshev_order}};
    return j;
}

inline nlohmann::json to_json(const AsymptoticReport& r) {
    return {{"schema", json_schema},
            {"process", r.process},
            {"kernel", r.kernel},
            {"limit_constant", r.limit_constant},
            {"clt_constant", r.clt_constant},
            {"terms", r.terms},
            {"triple_integral", r.triple_integral},
            {"series_j", r.series_j},
            {"series_error", r.series_error},
            {"err_estimate", r.err_estimate},
            {"warnings", r.warnings}};
}

inline nlohmann::json to_json(const ClosedForm& f) {
    nlohmann::json j{{"limit_constant", f.limit_constant}, {"note", f.note}};
    j["clt_constant"] = f.clt_constant ? nlohmann::json(*f.clt_constant) : nlohmann::json(nullptr);
    return j;
}

struct Check {
    std::string name;
    double value = 0.0;
    double lower = -HUGE_VAL;
    double upper = HUGE_VAL;
    bool pass() const { return value >= lower && value <= upper; }
};

inline nlohmann::json to_json(const std::vector<Check>& checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json j{{"name", c.name}, {"value", c.value}, {"pass", c.pass()}};
        if (std::isfinite(c.lower)) j["lower"] = c.lower;
        if (std::isfinite(c.upper)) j["upper"] = c.upper;
        arr.push_back(j);
    }
    return arr;
}

inline bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

/// Experiment record: command, config, results and checks. No timings, so reruns compare byte for byte.
inline nlohmann::json experiment_record(const std::string& command, const RunConfig& cfg,
                                        nlohmann::json result, const std::vector<Check>& checks) {
    return {{"schema", json_schema}, {"tool_version", version}, {"command", command}, {"config", to_json(cfg)},
            {"result", std::move(result)}, {"checks", to_json(checks)}, {"pass", all_pass(checks)}};
}

inline nlohmann::json to_json(const CltResult& r) {
    return {{"n", r.samples.n},
            {"c", r.samples.c},
            {"K", r.samples.K},
            {"retained", r.samples.z.size()},
            {"excluded", r.samples.excluded_count},
            {"ks", r.ks},
            {"mean", r.mean},
            {"variance", r.variance}};
}

inline nlohmann::json to_json(const RateTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) rows.push_back({{"n", r.n}, {"rmse", r.rmse}, {"paths", r.paths}});
    return {{"rows", rows}, {"slope", t.slope}, {"slope_se", t.slope_se}};
}

inline nlohmann::json to_json(const ConsistencyTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"n", r.n}, {"median_sup_error", r.median_sup_error}, {"paths", r.paths}});
    }
    return {{"rows", rows}, {"strictly_decreasing", t.strictly_decreasing}};
}

inline nlohmann::json to_json(const SamplerCheck& s) {
    return {{"draws", s.draws},
            {"ks", s.ks},
            {"mean_localtime", s.mean_localtime},
            {"mean_localtime_sq", s.mean_localtime_sq}};
}

// ---------------------------------------------------------------------------
// Plot data

/// Sorted z against standard normal quantiles at (i - 1/2) / M.
inline void write_qq_csv(std::ostream& out, std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const boost::math::normal_distribution<double> nd;
    const double m = static_cast<double>(z.size());
    out << "i,normal_quantile,z\n";
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double q = boost::math::quantile(nd, (static_cast<double>(i) + 0.5) / m);
        out << i << ',' << format_double(q) << ',' << format_double(z[i]) << '\n';
    }
}

inline void write_rate_csv(std::ostream& out, const RateTable& t) {
    out << "n,rmse,paths\n";
    for (const auto& r : t.rows) out << r.n << ',' << format_double(r.rmse) << ',' << r.paths << '\n';
}

inline void write_consistency_csv(std::ostream& out, const ConsistencyTable& t) {
    out << "n,median_sup_error,paths\n";
    for (const auto& r : t.rows) out << r.n << ',' << format_double(r.median_sup_error) << ',' << r.paths << '\n';
}

// ---------------------------------------------------------------------------
// Path files

/// Header k,t,position,dL; dL on row k is the local time gained over step k - 1 -> k.
inline void write_path_csv(std::ostream& out, const PathSample& path) {
    out << "k,t,position,dL\n";
    const double dt = path.dt();
    for (std::size_t k = 0; k < path.positions.size(); ++k) {
        const double dl = k == 0 ? 0.0 : path.localtime_increments[k - 1];
        out << k << ',' << format_double(static_cast<double>(k) * dt) << ',' << format_double(path.positions[k])
            << ',' << format_double(dl) << '\n';
    }
}

/// Reads a path CSV; the caller supplies the process it came from.
inline PathSample read_path_csv(std::istream& in, const ProcessParams& params) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "k,t,position,dL") {
        throw ConfigError("path CSV must start with the header k,t,position,dL");
    }
    PathSample p;
    p.params = params;
    std::vector<double> ts;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto f = detail::split_list(line);
        if (f.size() != 4) throw ConfigError(detail::at_line(lineno) + "expected 4 fields");
        const auto k = detail::parse_int<std::int64_t>(f[0], "k", lineno);
        if (k != static_cast<std::int64_t>(p.positions.size())) {
            throw ConfigError(detail::at_line(lineno) + "k must count up from 0");
        }
        ts.push_back(detail::parse_double(f[1], "t", lineno));
        p.positions.push_back(detail::parse_double(f[2], "position", lineno));
        const double dl = detail::parse_double(f[3], "dL", lineno);
        if (k > 0) p.localtime_increments.push_back(dl);
    }
    if (p.positions.size() < 2) throw ConfigError("path CSV needs at least two rows");
    p.n_steps = static_cast<std::int64_t>(p.positions.size()) - 1;
    p.T = ts.back();
    p.x0 = p.positions.front();
    validate_grid(p.T, p.n_steps);
    return p;
}

namespace detail {
inline constexpr char path_magic[8] = {'S', 'K', 'W', 'L', 'P', 'A', 'T', 'H'};

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("truncated binary path file");
    return v;
}
}  // namespace detail

/**
 * Binary layout, host byte order: magic "SKWLPATH", u32 version = 1, u8 kind
 * (0 skew, 1 obm), f64 beta, f64 sigma_minus, f64 sigma_plus, f64 r, f64 x0,
 * f64 T, i64 n_steps, u64 seed, u64 stream_id, f64 positions[n + 1],
 * f64 dL[n].
 */
inline void write_path_binary(std::ostream& out, const PathSample& p) {
    out.write(detail::path_magic, 8);
    detail::put<std::uint32_t>(out, 1);
    detail::put<std::uint8_t>(out, p.params.is_skew() ? 0 : 1);
    detail::put(out, p.params.beta());
    detail::put(out, p.params.sigma_minus());
    detail::put(out, p.params.sigma_plus());
    detail::put(out, p.params.threshold());
    detail::put(out, p.x0);
    detail::put(out, p.T);
    detail::put(out, p.n_steps);
    detail::put(out, p.seed);
    detail::put(out, p.stream_id);
    out.write(reinterpret_cast<const char*>(p.positions.data()),
              static_cast<std::streamsize>(p.positions.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(p.localtime_increments.data()),
              static_cast<std::streamsize>(p.localtime_increments.size() * sizeof(double)));
}

inline PathSample read_path_binary(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, detail::path_magic, 8) != 0) {
        throw ConfigError("not a SKWLPATH file");
    }
    if (detail::get<std::uint32_t>(in) != 1) throw ConfigError("unsupported SKWLPATH version");
    const auto kind = detail::get<std::uint8_t>(in);
    const auto beta = detail::get<double>(in);
    const auto sm = detail::get<double>(in);
    const auto sp = detail::get<double>(in);
    const auto r = detail::get<double>(in);
    PathSample p;
    p.params = kind == 0 ? ProcessParams::skew(beta, r) : ProcessParams::oscillating(sm, sp, r);
    p.x0 = detail::get<double>(in);
    p.T = detail::get<double>(in);
    p.n_steps = detail::get<std::int64_t>(in);
    p.seed = detail::get<std::uint64_t>(in);
    p.stream_id = detail::get<std::uint64_t>(in);
    validate_grid(p.T, p.n_steps);
    p.positions.resize(static_cast<std::size_t>(p.n_steps) + 1);
    p.localtime_increments.resize(static_cast<std::size_t>(p.n_steps));
    for (double& v : p.positions) v = detail::get<double>(in);
    for (double& v : p.localtime_increments) v = detail::get<double>(in);
    return p;
}

/// Writes a step function as t,value with 17 significant digits.
inline void write_step_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<double>& values,
                           const std::string& name) {
    out << "t," << name << '\n';
    for (std::size_t k = 0; k < grid.size(); ++k) out << format_double(grid[k]) << ',' << format_double(values[k]) << '\n';
}

// ---------------------------------------------------------------------------
// Presets used by `verify --preset`.

inline std::vector<std::string> preset_names() {
    return {"bm-weighted-n4096",      "obm12-weighted-n4096",     "sbm05-weighted-n4096",
            "obm12-weighted-rate",    "sbm05-crossing-consistency", "obm12-crossing-consistency",
            "sbm05-sampler",          "obm12-sampler"};
}

inline RunConfig preset(const std::string& name) {
    RunConfig cfg;
    ExperimentConfig& ex = cfg.experiment;
    ex.T = 1.0;
    ex.t_eval = 1.0;
    ex.seed = 1;
    if (name == "bm-weighted-n4096" || name == "obm12-weighted-n4096" || name == "sbm05-weighted-n4096") {
        ex.params = name[0] == 'b'   ? ProcessParams::oscillating(1.0, 1.0)
                    : name[0] == 'o' ? ProcessParams::oscillating(1.0, 2.0)
                                     : ProcessParams::skew(0.5);
        ex.estimator = EstimatorKind::weighted;
        ex.n = {4096};
        ex.n_paths = 2000;
    } else if (name == "obm12-weighted-rate") {
        ex.params = ProcessParams::oscillating(1.0, 2.0);
        ex.estimator = EstimatorKind::weighted;
        ex.n = {256, 1024, 4096, 16384, 65536};
        ex.n_paths = 1000;
    } else if (name == "sbm05-crossing-consistency" || name == "obm12-crossing-consistency") {
        ex.params = name[0] == 's' ? ProcessParams::skew(0.5) : ProcessParams::oscillating(1.0, 2.0);
        ex.estimator = EstimatorKind::crossing;
        ex.n = {256, 1024, 4096};
        ex.n_paths = 1000;
    } else if (name == "sbm05-sampler" || name == "obm12-sampler") {
        ex.params = name[0] == 's' ? ProcessParams::skew(0.5) : ProcessParams::oscillating(1.0, 2.0);
        ex.x0 = 0.3;
        ex.T = 0.5;
        ex.t_eval = 0.5;
        ex.n = {2};
        ex.n_paths = 200000;
    } else {
        std::string all;
        for (const auto& p : preset_names()) all += (all.empty() ? "" : ", ") + p;
        throw ConfigError("unknown preset '" + name + "' (known: " + all + ")");
    }
    return cfg;
}

}  // namespace skewloc

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skewloc/io.hpp"
#include "skewloc/manifest.hpp"
#include "skewloc/statistics.hpp"

using namespace skewloc;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("skewloc_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Config, MinimalInline) {
    const auto c = parse_config("[process] kind=skew beta=0.5 r=0\n");
    EXPECT_TRUE(c.experiment.params.is_skew());
    EXPECT_EQ(c.experiment.params.beta(), 0.5);
    EXPECT_EQ(c.quadrature.abs_tol, QuadratureConfig{}.abs_tol);
    EXPECT_EQ(c.series.j_min, SeriesConfig{}.j_min);
    EXPECT_EQ(c.experiment.n_paths, ExperimentConfig{}.n_paths);
}

TEST(Config, FullFile) {
    const auto c = parse_config(
        "# comment\n"
        "[process]\n"
        "kind = obm\n"
        "sigma = 1, 2\n"
        "r = 0.5   # threshold\n"
        "[kernel]\n"
        "estimator = crossing\n"
        "[experiment]\n"
        "n = 256, 1024, 4096\n"
        "paths = 500\n"
        "seed = 12\n"
        "x0 = 0.25\n"
        "[numerics]\n"
        "term_tol = 1e-4\n");
    const auto& e = c.experiment;
    EXPECT_EQ(e.params.sigma_minus(), 1.0);
    EXPECT_EQ(e.params.sigma_plus(), 2.0);
    EXPECT_EQ(e.params.threshold(), 0.5);
    EXPECT_EQ(e.estimator, EstimatorKind::crossing);
    EXPECT_EQ(e.n, (std::vector<std::int64_t>{256, 1024, 4096}));
    EXPECT_EQ(e.n_paths, 500);
    EXPECT_EQ(e.seed, 12u);
    EXPECT_EQ(e.start(), 0.25);
    EXPECT_EQ(c.series.term_tol, 1e-4);
}

TEST(Config, Errors) {
    const auto beta = error_of("[process]\nkind = skew\nbeta = 1.0\n");
    EXPECT_NE(beta.find("open interval"), std::string::npos) << beta;
    EXPECT_NE(beta.find("line 3"), std::string::npos) << beta;

    const auto dup = error_of("[process]\nkind = skew\nbeta = 0.1\n\nbeta = 0.2\n");
    EXPECT_NE(dup.find("lines 3 and 5"), std::string::npos) << dup;

    EXPECT_NE(error_of("[process]\nkind = skew\ncolour = red\n").find("unknown key 'colour'"), std::string::npos);
    EXPECT_NE(error_of("[plot]\n").find("unknown section"), std::string::npos);
    EXPECT_NE(error_of("[process]\nkind skew\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("beta = 0.1\n").find("outside of any section"), std::string::npos);
    EXPECT_NE(error_of("[experiment]\npaths = many\n").find("expects an integer"), std::string::npos);
    EXPECT_NE(error_of("[process]\nkind = obm\nbeta = 0.2\n").find("not valid"), std::string::npos);
    EXPECT_NE(error_of("[experiment]\nt_eval = 2\n").find("t_eval"), std::string::npos);
    EXPECT_NE(error_of("[kernel]\nname = h7\n").find("line 2"), std::string::npos);
}

TEST(Config, TextRoundTrip) {
    auto c = parse_config("[process] kind=obm sigma_minus=0.3 sigma_plus=1.7 r=-0.1\n"
                          "[experiment] constants=supplied c=0.123456789012345678 K=2.5 n=64,128\n"
                          "[kernel] name=h1\n");
    const std::string text = to_config_text(c);
    const auto again = parse_config(text);
    EXPECT_EQ(to_config_text(again), text);
    EXPECT_EQ(again.experiment.params, c.experiment.params);
    EXPECT_EQ(*again.experiment.c, *c.experiment.c);
    EXPECT_EQ(again.experiment.kernel, "h1");
    EXPECT_EQ(again.experiment.estimator, EstimatorKind::kernel);
}

TEST(Config, SeedFromEnvironment) {
    auto c = parse_config("[experiment] seed=3\n");
    setenv("SKEWLOC_SEED", "77", 1);
    apply_env_overrides(c);
    EXPECT_EQ(c.experiment.seed, 77u);
    setenv("SKEWLOC_SEED", "x", 1);
    EXPECT_THROW(apply_env_overrides(c), ConfigError);
    unsetenv("SKEWLOC_SEED");
}

TEST(PathCsv, RoundTripIsExact) {
    const auto p = ProcessParams::oscillating(1, 2, 0.1);
    const auto path = simulate_path(p, 0.3, 1.0, 200, 5, 1);
    std::stringstream ss;
    write_path_csv(ss, path);
    const std::string first = ss.str();
    EXPECT_EQ(first.substr(0, 16), "k,t,position,dL\n");
    const auto back = read_path_csv(ss, p);
    EXPECT_EQ(back.positions, path.positions);
    EXPECT_EQ(back.localtime_increments, path.localtime_increments);
    EXPECT_EQ(back.T, 1.0);
    std::stringstream again;
    write_path_csv(again, back);
    EXPECT_EQ(again.str(), first);
}

TEST(PathCsv, Fixture) {
    std::ifstream in(std::string(SKEWLOC_TEST_DATA) + "/alternating.csv");
    const auto path = read_path_csv(in, ProcessParams::oscillating(1, 1));
    EXPECT_EQ(path.n_steps, 4);
    EXPECT_DOUBLE_EQ(crossing_estimator(path.positions, 0.0, path.T, 4.0).back(), 2.0);
}

TEST(PathCsv, BadInput) {
    std::stringstream a("k,t,x\n");
    EXPECT_THROW(read_path_csv(a, ProcessParams::skew(0)), ConfigError);
    std::stringstream b("k,t,position,dL\n0,0,1,0\n2,0.5,1,0\n");
    EXPECT_THROW(read_path_csv(b, ProcessParams::skew(0)), ConfigError);
}

TEST(PathBinary, RoundTrip) {
    const auto path = simulate_path(ProcessParams::skew(-0.4, 2.0), 2.0, 0.5, 100, 9, 3);
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    write_path_binary(ss, path);
    const auto back = read_path_binary(ss);
    EXPECT_EQ(back.params, path.params);
    EXPECT_EQ(back.positions, path.positions);
    EXPECT_EQ(back.localtime_increments, path.localtime_increments);
    EXPECT_EQ(back.seed, 9u);
    EXPECT_EQ(back.stream_id, 3u);
    std::stringstream junk("NOTAPATH");
    EXPECT_THROW(read_path_binary(junk), ConfigError);
}

TEST(Json, ReportFields) {
    AsymptoticReport r;
    r.limit_constant = 1.0;
    r.clt_constant = 2.0;
    r.terms = {1, 2, 3, 4};
    const auto j = to_json(r);
    EXPECT_EQ(j["schema"], 1);
    for (const char* k : {"limit_constant", "clt_constant", "terms", "series_j", "err_estimate", "triple_integral"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(j["terms"].size(), 4u);
}

TEST(Json, RecordOmitsWorkers) {
    RunConfig a = preset("bm-weighted-n4096");
    RunConfig b = a;
    b.experiment.workers = 16;
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    const auto rec = experiment_record("verify clt", a, {{"ks", 0.01}}, {{"ks", 0.01, 0.0, 0.06}});
    EXPECT_TRUE(rec["pass"].get<bool>());
    EXPECT_EQ(rec["schema"], 1);
}

TEST(Presets, KnownAndUnknown) {
    for (const auto& name : preset_names()) EXPECT_NO_THROW(preset(name).experiment.validate()) << name;
    EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(Manifest, Sha256AndCheck) {
    const auto dir = scratch_dir("manifest");
    const auto file = (dir / "abc.txt").string();
    {
        std::ofstream(file) << "abc";
    }
    EXPECT_EQ(sha256_file(file), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    RunManifest m{"simulate", RunConfig{}, 0.1, {file}};
    const auto mpath = (dir / "manifest.json").string();
    m.write(mpath);
    EXPECT_TRUE(check_manifest(mpath).empty());
    {
        std::ofstream(file) << "abd";
    }
    EXPECT_EQ(check_manifest(mpath).size(), 1u);
    fs::remove_all(dir);
}

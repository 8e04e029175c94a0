#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "sscl/harness.hpp"
#include "sscl/rng.hpp"

using namespace sscl;

namespace {

ExperimentConfig tiny_config(const std::string& scenario) {
    ExperimentConfig cfg;
    cfg.scenario = scenario;
    cfg.n = 32;
    cfg.noise.kind = NoiseKind::additive;
    cfg.noise.K = 2;
    cfg.noise.amplitude = 0.2;
    cfg.eta = 0.05;
    cfg.t_end = 0.1;
    cfg.snapshot_times = {0.0, 0.05, 0.1};
    cfg.paths = 4;
    cfg.master_seed = 777;
    cfg.init.kind = "sin";
    cfg.init.mean = 0.5;
    cfg.init.amp = 0.25;
    cfg.init_b.kind = "sin";
    cfg.init_b.mean = 0.0;
    cfg.init_b.amp = 0.25;
    cfg.output_dir = (std::filesystem::temp_directory_path() / ("sscl_" + scenario)).string();
    return cfg;
}

}  // namespace

TEST_CASE("config serialization is a fixpoint") {
    ExperimentConfig cfg = tiny_config("roundtrip");
    cfg.experiment.eta_ladder = {0.4, 0.2, 0.1};
    cfg.noise.shape = NoiseShape::rational;
    cfg.noise.kind = NoiseKind::multiplicative;
    const std::string once = serialize_config(cfg);
    const std::string twice = serialize_config(parse_config_json(once));
    CHECK(once == twice);
    CHECK(config_hash(cfg) == config_hash(parse_config_json(once)));

    ExperimentConfig other = cfg;
    other.master_seed += 1;
    CHECK(config_hash(cfg) != config_hash(other));
}

TEST_CASE("monte carlo reduction is associative and order insensitive") {
    std::vector<StatAccumulator> singles(64);
    StatAccumulator direct;
    for (int i = 0; i < 64; ++i) {
        const double x = std::sin(0.7 * i) * 2.0 + 0.1 * i;
        singles[i].add(x);
        direct.add(x);
    }
    const StatAccumulator merged = monte_carlo_reduce(singles);
    CHECK(merged.count == direct.count);
    CHECK(merged.mean() == doctest::Approx(direct.mean()).epsilon(1e-12));
    CHECK(merged.stderror() == doctest::Approx(direct.stderror()).epsilon(1e-12));

    const StatAccumulator ab = monte_carlo_reduce({singles[0], singles[1]});
    const StatAccumulator ba = monte_carlo_reduce({singles[1], singles[0]});
    CHECK(ab.sum == doctest::Approx(ba.sum).epsilon(1e-12));
    CHECK(ab.sumsq == doctest::Approx(ba.sumsq).epsilon(1e-12));

    const StatAccumulator one = monte_carlo_reduce({singles[7]});
    CHECK(one.sum == singles[7].sum);
    CHECK(one.count == 1);
}

TEST_CASE("initial data catalog") {
    const TorusGrid g = build_grid(1, 64);
    InitSpec c;
    c.kind = "constant";
    c.value = -0.3;
    CHECK(initial_field(c, g)(17) == -0.3);

    InitSpec r;
    r.kind = "riemann";
    r.left = 1.0;
    r.right = 0.0;
    r.x0 = 0.5;
    const GridField ur = initial_field(r, g);
    CHECK(ur(0) == 1.0);
    CHECK(ur(32) == 0.0);

    InitSpec f;
    f.kind = "random_fourier";
    f.kmax = 3;
    f.amp = 0.5;
    f.seed = 9;
    const GridField u1 = initial_field(f, g), u2 = initial_field(f, g);
    CHECK(u1.values == u2.values);
    CHECK(field_max(u1) <= f.mean + 0.5 * (1.0 + 0.5 + 1.0 / 3) * 2.0);

    InitSpec bad;
    bad.kind = "wedge";
    CHECK_THROWS_AS(initial_field(bad, g), std::invalid_argument);
}

TEST_CASE("sigma from alpha follows the minimum rule") {
    CHECK(sigma_from_alpha(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sigma_from_alpha(1.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sigma_from_alpha(0.2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("manifest carries the derived path seeds") {
    const ExperimentConfig cfg = tiny_config("manifest");
    const RunManifest m = make_manifest(cfg, {"a.csv"});
    CHECK(m.master_seed == cfg.master_seed);
    CHECK(m.config_hash == config_hash(cfg));
    REQUIRE(m.path_seeds.size() == 4);
    for (int i = 0; i < 4; ++i)
        CHECK(m.path_seeds[i] == derive_path_seed(cfg.master_seed, i));

    const std::string path =
        (std::filesystem::temp_directory_path() / "sscl_manifest.json").string();
    write_manifest(m, path);
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    CHECK(j["status"] == "running");
    CHECK(j["code_version"].get<std::string>().size() > 0);
}

TEST_CASE("contraction experiment on an ordered deterministic pair") {
    ExperimentConfig cfg = tiny_config("contraction_det");
    cfg.noise.kind = NoiseKind::none;
    cfg.noise.K = 0;
    cfg.paths = 1;
    const ExperimentResult res = run_contraction_experiment(cfg);
    CHECK(res.pass);
    // identical initial data stay at exactly zero
    ExperimentConfig same = cfg;
    same.scenario = "contraction_same";
    same.init_b = same.init;
    same.output_dir += "_same";
    const ExperimentResult rs = run_contraction_experiment(same);
    CHECK(rs.pass);
    std::ifstream csv(rs.outputs[0]);
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,mean,stderr");
    double maxv = 0.0;
    while (std::getline(csv, line)) {
        double t, mean, se;
        std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &mean, &se);
        maxv = std::max(maxv, std::abs(mean));
    }
    CHECK(maxv == 0.0);
}

TEST_CASE("experiment smoke runs write manifests and results") {
    ExperimentConfig vis = tiny_config("viscosity");
    vis.experiment.eta_ladder = {0.4, 0.2, 0.1};
    vis.paths = 4;
    const ExperimentResult rv = run_viscosity_experiment(vis);
    CHECK(std::filesystem::exists(vis.output_dir + "/viscosity.csv"));
    CHECK(std::filesystem::exists(vis.output_dir + "/manifest.json"));

    ExperimentConfig reg = tiny_config("regularity");
    const ExperimentResult rr = run_regularity_experiment(reg);
    CHECK(rr.pass);
    CHECK(std::filesystem::exists(reg.output_dir + "/regularity.csv"));

    ExperimentConfig en = tiny_config("energy");
    const ExperimentResult re = run_energy_experiment(en);
    CHECK(re.pass);
    CHECK(std::filesystem::exists(en.output_dir + "/energy.csv"));
    CHECK(std::filesystem::exists(en.output_dir + "/energy_summary.csv"));

    std::ifstream in(en.output_dir + "/manifest.json");
    nlohmann::json j;
    in >> j;
    CHECK(j["status"] == "complete");
}

TEST_CASE("pathrun checkpoints and kinetic exports") {
    ExperimentConfig cfg = tiny_config("checkpoint");
    const SolverConfig scfg = solver_config(cfg);
    const GridField u0 = initial_field(cfg.init, scfg.grid);
    const PathRun run = run_path(scfg, u0, 5);
    std::filesystem::create_directories(cfg.output_dir);
    const std::string jpath = cfg.output_dir + "/pathrun.json";
    write_pathrun_json(run, scfg, jpath);
    std::ifstream in(jpath);
    nlohmann::json j;
    in >> j;
    CHECK(j["format_version"] == 1);
    CHECK(j["grid"]["n"] == 32);
    CHECK(j["snapshots"].size() == run.snapshots.size());
    CHECK(j["ledger"]["l2sq"].size() == run.step_count + 1);

    REQUIRE(run.kinetic.has_value());
    const std::string mpath = cfg.output_dir + "/measure.csv";
    export_kinetic_measure_csv(*run.kinetic, mpath);
    std::ifstream mcsv(mpath);
    std::string header;
    std::getline(mcsv, header);
    CHECK(header == "x_cell,t_bin,xi_bin,weight");
    double total = 0.0;
    std::string line;
    while (std::getline(mcsv, line)) {
        unsigned long x;
        int tb, jb;
        double w;
        std::sscanf(line.c_str(), "%lu,%d,%d,%lf", &x, &tb, &jb, &w);
        total += w;
    }
    CHECK(total == doctest::Approx(run.kinetic->total_mass()).epsilon(1e-12));

    const XiGrid xi = xi_grid_for_range(-1.0, 1.0, 16);
    const std::string fpath = cfg.output_dir + "/f.csv";
    export_kinetic_function_csv(kinetic_function(u0, xi), fpath);
    std::ifstream fcsv(fpath);
    std::getline(fcsv, header);
    CHECK(header == "x,xi,f");
}

TEST_CASE("config files parse from disk and hash deterministically") {
    const ExperimentConfig cfg = tiny_config("file_roundtrip");
    const std::string path =
        (std::filesystem::temp_directory_path() / "sscl_cfg.json").string();
    {
        std::ofstream out(path);
        out << serialize_config(cfg);
    }
    const ExperimentConfig back = parse_config(path);
    CHECK(serialize_config(back) == serialize_config(cfg));
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK_THROWS_AS(parse_config("/nonexistent/cfg.json"), std::runtime_error);
}

TEST_CASE("csv cells round-trip at full precision") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "sscl_prec.csv").string();
    const double value = 0.1 + 0.2;  // not exactly representable pieces
    emit_csv(path, "a,b", {{value, 1.0 / 3.0}});
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    double a = 0.0, b = 0.0;
    std::sscanf(line.c_str(), "%lf,%lf", &a, &b);
    CHECK(a == value);
    CHECK(b == 1.0 / 3.0);
}

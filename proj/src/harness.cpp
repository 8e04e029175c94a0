#include "sscl/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sscl/rng.hpp"
#include "sscl/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sscl {

using nlohmann::json;

namespace {

NoiseKind noise_kind_of(const std::string& s) {
    if (s == "none") return NoiseKind::none;
    if (s == "additive") return NoiseKind::additive;
    if (s == "multiplicative") return NoiseKind::multiplicative;
    throw std::invalid_argument("unknown noise kind '" + s + "'");
}

std::string noise_kind_str(NoiseKind k) {
    switch (k) {
        case NoiseKind::none: return "none";
        case NoiseKind::additive: return "additive";
        case NoiseKind::multiplicative: return "multiplicative";
    }
    return "none";
}

NoiseShape noise_shape_of(const std::string& s) {
    if (s == "unit") return NoiseShape::unit;
    if (s == "sin") return NoiseShape::sine;
    if (s == "rational") return NoiseShape::rational;
    if (s == "clamp") return NoiseShape::clamp;
    throw std::invalid_argument("unknown noise shape '" + s + "'");
}

std::string noise_shape_str(NoiseShape s) {
    switch (s) {
        case NoiseShape::unit: return "unit";
        case NoiseShape::sine: return "sin";
        case NoiseShape::rational: return "rational";
        case NoiseShape::clamp: return "clamp";
    }
    return "sin";
}

InitSpec parse_init(const json& j) {
    InitSpec init;
    init.kind = j.value("kind", init.kind);
    init.mean = j.value("mean", init.mean);
    init.amp = j.value("amp", init.amp);
    init.k = j.value("k", init.k);
    init.value = j.value("value", init.value);
    init.left = j.value("left", init.left);
    init.right = j.value("right", init.right);
    init.x0 = j.value("x0", init.x0);
    init.kmax = j.value("kmax", init.kmax);
    init.seed = j.value("seed", init.seed);
    return init;
}

json init_json(const InitSpec& i) {
    return json{{"kind", i.kind}, {"mean", i.mean},   {"amp", i.amp},
                {"k", i.k},       {"value", i.value}, {"left", i.left},
                {"right", i.right}, {"x0", i.x0},     {"kmax", i.kmax},
                {"seed", i.seed}};
}

}  // namespace

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

ExperimentConfig parse_config_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.scenario = j.value("scenario", cfg.scenario);
    if (j.contains("grid")) {
        cfg.dim = j["grid"].value("dim", cfg.dim);
        cfg.n = j["grid"].value("n", cfg.n);
    }
    if (j.contains("flux")) {
        const json& f = j["flux"];
        cfg.flux_name = f.value("name", cfg.flux_name);
        cfg.flux_param = f.value("param", cfg.flux_param);
        if (f.contains("direction")) {
            cfg.flux_direction[0] = f["direction"].at(0).get<double>();
            cfg.flux_direction[1] = f["direction"].size() > 1
                                        ? f["direction"].at(1).get<double>()
                                        : 0.0;
        }
    }
    if (j.contains("noise")) {
        const json& n = j["noise"];
        cfg.noise.kind = noise_kind_of(n.value("kind", std::string("none")));
        cfg.noise.K = n.value("K", cfg.noise.K);
        cfg.noise.amplitude = n.value("amplitude", cfg.noise.amplitude);
        cfg.noise.decay_q = n.value("decay_q", cfg.noise.decay_q);
        cfg.noise.shape = noise_shape_of(n.value("shape", std::string("sin")));
        cfg.noise.alpha = n.value("alpha", cfg.noise.alpha);
        cfg.noise.clamp_M = n.value("clamp_M", cfg.noise.clamp_M);
        cfg.noise.mean_mode = n.value("mean_mode", cfg.noise.mean_mode);
    }
    cfg.noise.dim = cfg.dim;
    if (j.contains("solver")) {
        const json& s = j["solver"];
        cfg.eta = s.value("eta", cfg.eta);
        cfg.t_end = s.value("t_end", cfg.t_end);
        cfg.cfl_safety = s.value("cfl_safety", cfg.cfl_safety);
        cfg.u_bound = s.value("u_bound", cfg.u_bound);
        cfg.dt_override = s.value("dt_override", cfg.dt_override);
        if (s.contains("snapshots"))
            cfg.snapshot_times = s["snapshots"].get<std::vector<double>>();
    }
    if (j.contains("kinetic")) {
        cfg.accumulate_measure = j["kinetic"].value("accumulate", cfg.accumulate_measure);
        cfg.xi_bins = j["kinetic"].value("xi_bins", cfg.xi_bins);
        cfg.t_bins = j["kinetic"].value("t_bins", cfg.t_bins);
    }
    if (j.contains("init")) cfg.init = parse_init(j["init"]);
    if (j.contains("init_b")) cfg.init_b = parse_init(j["init_b"]);
    if (j.contains("ensemble")) {
        cfg.paths = j["ensemble"].value("paths", cfg.paths);
        cfg.master_seed = j["ensemble"].value("master_seed", cfg.master_seed);
    }
    if (j.contains("experiment")) {
        const json& e = j["experiment"];
        if (e.contains("eta_ladder"))
            cfg.experiment.eta_ladder = e["eta_ladder"].get<std::vector<double>>();
        cfg.experiment.sigma = e.value("sigma", cfg.experiment.sigma);
        cfg.experiment.eps_points = e.value("eps_points", cfg.experiment.eps_points);
        cfg.experiment.delta_points = e.value("delta_points", cfg.experiment.delta_points);
        cfg.experiment.slack_C = e.value("slack_C", cfg.experiment.slack_C);
        cfg.experiment.moment_cap_sup = e.value("moment_cap_sup", 0.0);
        cfg.experiment.moment_cap_diss = e.value("moment_cap_diss", 0.0);
        cfg.experiment.measure_mass_cap = e.value("measure_mass_cap", 0.0);
        cfg.experiment.measure_moment_cap = e.value("measure_moment_cap", 0.0);
        cfg.experiment.measure_moment_sq_cap = e.value("measure_moment_sq_cap", 0.0);
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["scenario"] = cfg.scenario;
    j["grid"] = {{"dim", cfg.dim}, {"n", cfg.n}};
    j["flux"] = {{"name", cfg.flux_name},
                 {"param", cfg.flux_param},
                 {"direction", {cfg.flux_direction[0], cfg.flux_direction[1]}}};
    j["noise"] = {{"kind", noise_kind_str(cfg.noise.kind)},
                  {"K", cfg.noise.K},
                  {"amplitude", cfg.noise.amplitude},
                  {"decay_q", cfg.noise.decay_q},
                  {"shape", noise_shape_str(cfg.noise.shape)},
                  {"alpha", cfg.noise.alpha},
                  {"clamp_M", cfg.noise.clamp_M},
                  {"mean_mode", cfg.noise.mean_mode}};
    j["solver"] = {{"eta", cfg.eta},
                   {"t_end", cfg.t_end},
                   {"cfl_safety", cfg.cfl_safety},
                   {"u_bound", cfg.u_bound},
                   {"dt_override", cfg.dt_override},
                   {"snapshots", cfg.snapshot_times}};
    j["kinetic"] = {{"accumulate", cfg.accumulate_measure},
                    {"xi_bins", cfg.xi_bins},
                    {"t_bins", cfg.t_bins}};
    j["init"] = init_json(cfg.init);
    j["init_b"] = init_json(cfg.init_b);
    j["ensemble"] = {{"paths", cfg.paths}, {"master_seed", cfg.master_seed}};
    json e;
    e["eta_ladder"] = cfg.experiment.eta_ladder;
    e["sigma"] = cfg.experiment.sigma;
    e["eps_points"] = cfg.experiment.eps_points;
    e["delta_points"] = cfg.experiment.delta_points;
    e["slack_C"] = cfg.experiment.slack_C;
    e["moment_cap_sup"] = cfg.experiment.moment_cap_sup;
    e["moment_cap_diss"] = cfg.experiment.moment_cap_diss;
    e["measure_mass_cap"] = cfg.experiment.measure_mass_cap;
    e["measure_moment_cap"] = cfg.experiment.measure_moment_cap;
    e["measure_moment_sq_cap"] = cfg.experiment.measure_moment_sq_cap;
    j["experiment"] = e;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string s = serialize_config(cfg);
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TorusGrid grid_of(const ExperimentConfig& cfg) { return build_grid(cfg.dim, cfg.n); }

SolverConfig solver_config(const ExperimentConfig& cfg) {
    SolverConfig s;
    s.grid = grid_of(cfg);
    s.flux = make_flux(cfg.flux_name, cfg.flux_param, cfg.flux_direction);
    NoiseSpec nspec = cfg.noise;
    nspec.dim = cfg.dim;
    s.noise = build_noise_model(nspec);
    s.eta = cfg.eta;
    s.t_end = cfg.t_end;
    s.cfl_safety = cfg.cfl_safety;
    s.snapshot_times = cfg.snapshot_times;
    s.u_bound = cfg.u_bound;
    s.dt_override = cfg.dt_override;
    s.accumulate_measure = cfg.accumulate_measure;
    s.xi_bins = cfg.xi_bins;
    s.t_bins = cfg.t_bins;
    return s;
}

GridField initial_field(const InitSpec& init, const TorusGrid& grid) {
    GridField u(grid);
    if (init.kind == "constant") {
        for (auto& v : u.values) v = init.value;
    } else if (init.kind == "sin") {
        for (std::size_t s = 0; s < u.size(); ++s) {
            const auto xy = grid.coords(s);
            u.values[s] = init.mean + init.amp * std::sin(2.0 * M_PI * init.k *
                                                          (xy[0] + xy[1]));
        }
    } else if (init.kind == "riemann") {
        for (std::size_t s = 0; s < u.size(); ++s) {
            const auto xy = grid.coords(s);
            u.values[s] = xy[0] < init.x0 ? init.left : init.right;
        }
    } else if (init.kind == "random_fourier") {
        for (int k = 1; k <= init.kmax; ++k) {
            const double ac = init.amp * (2.0 * uniform01(key_hash(init.seed, k, 0)) - 1.0) / k;
            const double as = init.amp * (2.0 * uniform01(key_hash(init.seed, k, 1)) - 1.0) / k;
            for (std::size_t s = 0; s < u.size(); ++s) {
                const auto xy = grid.coords(s);
                u.values[s] += ac * std::cos(2.0 * M_PI * k * xy[0]) +
                               as * std::sin(2.0 * M_PI * k * xy[0]);
            }
        }
        for (auto& v : u.values) v += init.mean;
    } else {
        throw std::invalid_argument("initial_field: unknown kind '" + init.kind + "'");
    }
    return u;
}

RunManifest make_manifest(const ExperimentConfig& cfg,
                          const std::vector<std::string>& outputs) {
    RunManifest m;
    m.config_hash = config_hash(cfg);
    m.master_seed = cfg.master_seed;
    m.code_version = kVersion;
    for (int i = 0; i < cfg.paths; ++i)
        m.path_seeds.push_back(derive_path_seed(cfg.master_seed, i));
    m.outputs = outputs;
    m.started_at = iso_timestamp();
    return m;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    json j;
    j["config_hash"] = m.config_hash;
    j["master_seed"] = m.master_seed;
    j["code_version"] = m.code_version;
    j["path_seeds"] = m.path_seeds;
    j["outputs"] = m.outputs;
    j["status"] = m.status;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

StatAccumulator monte_carlo_reduce(const std::vector<StatAccumulator>& partials) {
    StatAccumulator total;
    for (const auto& p : partials) {
        total.count += p.count;
        total.sum += p.sum;
        total.sumsq += p.sumsq;
    }
    return total;
}

void emit_csv(const std::string& path, const std::string& header,
              const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << header << '\n';
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << buf << (i + 1 < row.size() ? "," : "");
        }
        out << '\n';
    }
}

std::vector<PathRun> run_ensemble(const SolverConfig& scfg, const GridField& u0,
                                  std::uint64_t master_seed, int paths) {
    std::vector<PathRun> runs(paths);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < paths; ++i)
        runs[i] = run_path(scfg, u0, derive_path_seed(master_seed, i));
    return runs;
}

double sigma_from_alpha(double alpha) {
    return std::min(2.0 * alpha / (1.0 + alpha), 0.5);
}

namespace {

std::filesystem::path prepare_output(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

ExperimentResult run_contraction_experiment(const ExperimentConfig& cfg) {
    const auto dir = prepare_output(cfg);
    ExperimentResult res;
    res.outputs = {(dir / "contraction.csv").string(), (dir / "contraction_paths.csv").string()};
    RunManifest manifest = make_manifest(cfg, res.outputs);
    write_manifest(manifest, (dir / "manifest.json").string());

    SolverConfig scfg = solver_config(cfg);
    scfg.accumulate_measure = false;
    const TorusGrid grid = scfg.grid;
    const GridField ua = initial_field(cfg.init, grid);
    const GridField ub = initial_field(cfg.init_b, grid);

    const std::size_t ns = cfg.snapshot_times.size();
    std::vector<std::vector<double>> per_path(cfg.paths, std::vector<double>(ns, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.paths; ++i) {
        const std::uint64_t seed = derive_path_seed(cfg.master_seed, i);
        const PathRun ra = run_path(scfg, ua, seed);
        const PathRun rb = run_path(scfg, ub, seed);
        for (std::size_t s = 0; s < ns; ++s)
            per_path[i][s] = positive_part_l1(ra.snapshots[s].u, rb.snapshots[s].u);
    }

    std::vector<std::vector<double>> rows, path_rows;
    std::vector<double> mean(ns), se(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        StatAccumulator acc;
        for (int i = 0; i < cfg.paths; ++i) acc.add(per_path[i][s]);
        mean[s] = acc.mean();
        se[s] = acc.stderror();
        rows.push_back({cfg.snapshot_times[s], mean[s], se[s]});
    }
    for (int i = 0; i < cfg.paths; ++i)
        for (std::size_t s = 0; s < ns; ++s)
            path_rows.push_back({static_cast<double>(i), cfg.snapshot_times[s], per_path[i][s]});
    emit_csv(res.outputs[0], "t,mean,stderr", rows);
    emit_csv(res.outputs[1], "path,t,value", path_rows);

    const double dt = stable_dt(scfg, scfg.u_bound);
    res.pass = true;
    for (std::size_t s = 0; s + 1 < ns; ++s)
        if (mean[s + 1] > mean[s] + 3.0 * (se[s] + se[s + 1]) + cfg.experiment.slack_C * dt)
            res.pass = false;
    res.summary = "contraction: " + std::string(res.pass ? "nonincreasing" : "VIOLATION");

    manifest.status = res.pass ? "complete" : "complete_failed";
    manifest.finished_at = iso_timestamp();
    write_manifest(manifest, (dir / "manifest.json").string());
    return res;
}

ExperimentResult run_viscosity_experiment(const ExperimentConfig& cfg) {
    const auto dir = prepare_output(cfg);
    ExperimentResult res;
    res.outputs = {(dir / "viscosity.csv").string()};
    RunManifest manifest = make_manifest(cfg, res.outputs);
    write_manifest(manifest, (dir / "manifest.json").string());

    std::vector<double> ladder = cfg.experiment.eta_ladder;
    if (ladder.empty()) throw std::invalid_argument("viscosity experiment needs eta_ladder");
    const int L = static_cast<int>(ladder.size());

    // Common dt pinned by the stiffest member so increments align pathwise.
    SolverConfig base = solver_config(cfg);
    base.accumulate_measure = false;
    double dt_common = base.t_end;
    for (double eta : ladder) {
        SolverConfig c = base;
        c.eta = eta;
        dt_common = std::min(dt_common, stable_dt(c, c.u_bound));
    }
    const GridField u0 = initial_field(cfg.init, base.grid);
    const double cell = std::pow(base.grid.dx, base.grid.dim);

    std::vector<std::vector<double>> per_path(cfg.paths, std::vector<double>(L - 1, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.paths; ++i) {
        const std::uint64_t seed = derive_path_seed(cfg.master_seed, i);
        const auto steps = static_cast<std::size_t>(std::ceil(base.t_end / dt_common - 1e-12));
        const double dt = base.t_end / static_cast<double>(steps);
        std::vector<GridField> u(L, u0);
        std::vector<SolverConfig> cfgs(L, base);
        for (int l = 0; l < L; ++l) cfgs[l].eta = ladder[l];
        std::vector<double> l1(L - 1, 0.0);
        for (std::size_t n = 0; n < steps; ++n) {
            const IncrementBatch inc = sample_increments(base.noise, dt, seed, n);
            for (int l = 0; l + 1 < L; ++l) {
                double d = 0.0;
                for (std::size_t s = 0; s < u0.size(); ++s)
                    d += std::abs(u[l].values[s] - u[l + 1].values[s]);
                l1[l] += d * cell * dt;
            }
            for (int l = 0; l < L; ++l) u[l] = step(u[l], dt, inc, cfgs[l]);
        }
        per_path[i] = l1;
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> mean(L - 1), se(L - 1);
    for (int l = 0; l + 1 < L; ++l) {
        StatAccumulator acc;
        for (int i = 0; i < cfg.paths; ++i) acc.add(per_path[i][l]);
        mean[l] = acc.mean();
        se[l] = acc.stderror();
        rows.push_back({ladder[l], mean[l], se[l]});
    }
    emit_csv(res.outputs[0], "eta,diff_l1_mean,stderr", rows);

    res.pass = true;
    for (int l = 0; l + 2 < L; ++l)
        if (!(mean[l + 1] < mean[l] + 3.0 * (se[l] + se[l + 1]))) res.pass = false;
    res.summary = "viscosity: Cauchy differences " +
                  std::string(res.pass ? "decreasing" : "NOT decreasing");

    manifest.status = res.pass ? "complete" : "complete_failed";
    manifest.finished_at = iso_timestamp();
    write_manifest(manifest, (dir / "manifest.json").string());
    return res;
}

ExperimentResult run_regularity_experiment(const ExperimentConfig& cfg) {
    const auto dir = prepare_output(cfg);
    ExperimentResult res;
    res.outputs = {(dir / "regularity.csv").string(), (dir / "regularity_paths.csv").string()};
    RunManifest manifest = make_manifest(cfg, res.outputs);
    write_manifest(manifest, (dir / "manifest.json").string());

    SolverConfig scfg = solver_config(cfg);
    scfg.accumulate_measure = false;
    const double sigma = cfg.experiment.sigma > 0.0 ? cfg.experiment.sigma
                                                    : sigma_from_alpha(cfg.noise.alpha);
    const GridField u0 = initial_field(cfg.init, scfg.grid);
    const std::size_t ns = cfg.snapshot_times.size();
    const auto ladder = epsilon_ladder(scfg.grid);

    std::vector<std::vector<double>> per_path(cfg.paths, std::vector<double>(ns, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.paths; ++i) {
        const PathRun run = run_path(scfg, u0, derive_path_seed(cfg.master_seed, i));
        for (std::size_t s = 0; s < ns; ++s) {
            const auto table = modulus_table(run.snapshots[s].u);
            per_path[i][s] = seminorm_p_sigma_rho(table, scfg.grid, sigma,
                                                  MollifierKind::triangular, ladder)
                                 .value;
        }
    }

    std::vector<std::vector<double>> rows, path_rows;
    std::vector<double> mean(ns), se(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        StatAccumulator acc;
        for (int i = 0; i < cfg.paths; ++i) acc.add(per_path[i][s]);
        mean[s] = acc.mean();
        se[s] = acc.stderror();
        rows.push_back({cfg.snapshot_times[s], mean[s], se[s]});
    }
    for (int i = 0; i < cfg.paths; ++i)
        for (std::size_t s = 0; s < ns; ++s)
            path_rows.push_back({static_cast<double>(i), cfg.snapshot_times[s], per_path[i][s]});
    emit_csv(res.outputs[0], "t,p_sigma_rho_mean,stderr", rows);
    emit_csv(res.outputs[1], "path,t,value", path_rows);

    // fitted affine envelope C (mean(0) + t)
    double C = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
        const double denom = mean[0] + cfg.snapshot_times[s];
        if (denom > 0.0) C = std::max(C, mean[s] / denom);
    }
    res.pass = std::isfinite(C) && C > 0.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "regularity: sigma=%.4f fitted C=%.6g", sigma, C);
    res.summary = buf;

    manifest.status = res.pass ? "complete" : "complete_failed";
    manifest.finished_at = iso_timestamp();
    write_manifest(manifest, (dir / "manifest.json").string());
    return res;
}

ExperimentResult run_energy_experiment(const ExperimentConfig& cfg) {
    const auto dir = prepare_output(cfg);
    ExperimentResult res;
    res.outputs = {(dir / "energy.csv").string(), (dir / "energy_summary.csv").string()};
    RunManifest manifest = make_manifest(cfg, res.outputs);
    write_manifest(manifest, (dir / "manifest.json").string());

    SolverConfig scfg = solver_config(cfg);
    const GridField u0 = initial_field(cfg.init, scfg.grid);
    const std::vector<PathRun> runs = run_ensemble(scfg, u0, cfg.master_seed, cfg.paths);
    const double dt = runs.front().dt_used;

    const EnergyCheck ec = energy_check(runs);
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < ec.t.size(); ++s)
        rows.push_back({ec.t[s], ec.margin_mean[s], ec.margin_stderr[s]});
    emit_csv(res.outputs[0], "t,margin_mean,stderr", rows);

    res.pass = true;
    for (std::size_t s = 0; s < ec.t.size(); ++s)
        if (ec.margin_mean[s] >
            3.0 * ec.margin_stderr[s] + cfg.experiment.slack_C * dt)
            res.pass = false;

    const MomentReport m4 = moment_check(runs, 4);
    StatAccumulator mass, mom2, mom2sq;
    for (const PathRun& r : runs) {
        if (!r.kinetic) continue;
        mass.add(r.kinetic->total_mass());
        const double m2 = r.kinetic->moment(2.0);
        mom2.add(m2);
        mom2sq.add(m2 * m2);
    }
    const ExperimentSpec& e = cfg.experiment;
    std::vector<std::vector<double>> srows = {
        {0, m4.e_sup_norm, e.moment_cap_sup},
        {1, m4.e_dissipation, e.moment_cap_diss},
        {2, mass.mean(), e.measure_mass_cap},
        {3, mom2.mean(), e.measure_moment_cap},
        {4, mom2sq.mean(), e.measure_moment_sq_cap},
    };
    emit_csv(res.outputs[1], "metric,value,cap", srows);
    if (e.moment_cap_sup > 0.0 && m4.e_sup_norm > e.moment_cap_sup) res.pass = false;
    if (e.moment_cap_diss > 0.0 && m4.e_dissipation > e.moment_cap_diss) res.pass = false;
    if (e.measure_mass_cap > 0.0 && mass.mean() > e.measure_mass_cap) res.pass = false;
    if (e.measure_moment_cap > 0.0 && mom2.mean() > e.measure_moment_cap) res.pass = false;
    if (e.measure_moment_sq_cap > 0.0 && mom2sq.mean() > e.measure_moment_sq_cap)
        res.pass = false;

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "energy: max margin %.3e, E sup|u|_4^4 %.4g, measure mass %.4g",
                  ec.max_margin, m4.e_sup_norm, mass.mean());
    res.summary = buf;

    manifest.status = res.pass ? "complete" : "complete_failed";
    manifest.finished_at = iso_timestamp();
    write_manifest(manifest, (dir / "manifest.json").string());
    return res;
}

void write_pathrun_json(const PathRun& run, const SolverConfig& scfg,
                        const std::string& path) {
    json j;
    j["format_version"] = 1;
    j["grid"] = {{"dim", scfg.grid.dim}, {"n", scfg.grid.n}};
    j["path_seed"] = run.path_seed;
    j["dt"] = run.dt_used;
    j["step_count"] = run.step_count;
    json snaps = json::array();
    for (const Snapshot& s : run.snapshots)
        snaps.push_back({{"t", s.t}, {"step", s.step}, {"values", s.u.values}});
    j["snapshots"] = snaps;
    j["ledger"] = {{"l2sq", run.ledger.l2sq},
                   {"l4", run.ledger.l4},
                   {"diss2_inc", run.ledger.diss2_inc},
                   {"diss4_inc", run.ledger.diss4_inc},
                   {"noise2_inc", run.ledger.noise2_inc}};
    std::ofstream out(path);
    out << j.dump() << '\n';
}

void export_kinetic_measure_csv(const KineticMeasure& m, const std::string& path) {
    std::ofstream out(path);
    out << "x_cell,t_bin,xi_bin,weight\n";
    char buf[64];
    for (std::size_t x = 0; x < m.grid().size(); ++x)
        for (int tb = 0; tb < m.t_bins(); ++tb)
            for (int jb = 0; jb < m.xi().bins; ++jb) {
                const double w = m.weight(x, tb, jb);
                if (w == 0.0) continue;
                std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g\n", x, tb, jb, w);
                out << buf;
            }
}

void export_kinetic_function_csv(const KineticFunction& f, const std::string& path) {
    std::ofstream out(path);
    out << "x,xi,f\n";
    char buf[96];
    for (std::size_t x = 0; x < f.nx(); ++x) {
        const auto xy = f.grid.coords(x);
        for (int j = 0; j < f.xi.bins; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", xy[0], f.xi.center(j),
                          f.at(x, j));
            out << buf;
        }
    }
}

}  // namespace sscl

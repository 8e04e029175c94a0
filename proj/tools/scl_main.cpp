#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "sscl/doubling.hpp"
#include "sscl/harness.hpp"
#include "sscl/oracles.hpp"
#include "sscl/rng.hpp"
#include "sscl/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sscl;

namespace {

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

ExperimentConfig load(const std::string& path, int paths_override,
                      std::uint64_t seed_override, const std::string& out_override) {
    ExperimentConfig cfg = parse_config(path);
    if (paths_override > 0) cfg.paths = paths_override;
    if (seed_override != 0) cfg.master_seed = seed_override;
    if (!out_override.empty()) cfg.output_dir = out_override;
    return cfg;
}

int cmd_simulate(const std::string& config_path, int paths_override,
                 std::uint64_t seed_override, const std::string& out_override) {
    const ExperimentConfig cfg =
        load(config_path, paths_override, seed_override, out_override);
    const SolverConfig scfg = solver_config(cfg);
    const GridField u0 = initial_field(cfg.init, scfg.grid);
    std::filesystem::create_directories(cfg.output_dir);
    const std::filesystem::path dir(cfg.output_dir);

    RunManifest manifest = make_manifest(cfg, {(dir / "pathrun.json").string(),
                                               (dir / "kinetic_measure.csv").string(),
                                               (dir / "kinetic_function.csv").string()});
    write_manifest(manifest, (dir / "manifest.json").string());

    const std::uint64_t seed = derive_path_seed(cfg.master_seed, 0);
    const PathRun run = run_path(scfg, u0, seed);
    write_pathrun_json(run, scfg, (dir / "pathrun.json").string());
    if (run.kinetic)
        export_kinetic_measure_csv(*run.kinetic, (dir / "kinetic_measure.csv").string());
    if (!run.snapshots.empty()) {
        const GridField& uT = run.snapshots.back().u;
        const XiGrid xi = xi_grid_for_range(field_min(uT), field_max(uT), cfg.xi_bins);
        export_kinetic_function_csv(kinetic_function(uT, xi),
                                    (dir / "kinetic_function.csv").string());
    }
    manifest.status = "complete";
    manifest.finished_at = iso_timestamp();
    write_manifest(manifest, (dir / "manifest.json").string());
    std::printf("simulate: %zu steps, dt=%.3e, seed=%llu -> %s\n", run.step_count,
                run.dt_used, static_cast<unsigned long long>(seed),
                cfg.output_dir.c_str());
    return 0;
}

int cmd_experiment(const std::string& which, const std::string& config_path,
                   int paths_override, std::uint64_t seed_override,
                   const std::string& out_override) {
    const ExperimentConfig cfg =
        load(config_path, paths_override, seed_override, out_override);
    ExperimentResult res;
    if (which == "contraction")
        res = run_contraction_experiment(cfg);
    else if (which == "viscosity")
        res = run_viscosity_experiment(cfg);
    else if (which == "regularity")
        res = run_regularity_experiment(cfg);
    else if (which == "energy")
        res = run_energy_experiment(cfg);
    else {
        std::fprintf(stderr, "unknown experiment '%s'\n", which.c_str());
        return 2;
    }
    std::printf("%s [%s]\n", res.summary.c_str(), res.pass ? "PASS" : "FAIL");
    return res.pass ? 0 : 1;
}

int cmd_check(const std::string& which, const std::string& config_path) {
    const ExperimentConfig cfg = parse_config(config_path);
    bool pass = true;
    if (which == "d0d1") {
        NoiseSpec spec = cfg.noise;
        spec.dim = cfg.dim;
        const NoiseModel m = build_noise_model(spec);
        const BoundReport d0 = verify_D0(m, 6.0, 41);
        const BoundReport d1 = verify_D1(m, default_d1_lattice(cfg.dim));
        std::printf("D0: max ratio %.6g vs declared %.6g [%s]\n", d0.max_ratio, m.D0(),
                    d0.pass ? "PASS" : "FAIL");
        std::printf("D1: max ratio %.6g vs declared %.6g [%s]\n", d1.max_ratio, m.D1(),
                    d1.pass ? "PASS" : "FAIL");
        pass = d0.pass && d1.pass;
    } else if (which == "gamma") {
        const FluxModel flux = make_flux(cfg.flux_name, cfg.flux_param, cfg.flux_direction);
        std::vector<double> lattice;
        for (int i = 0; i <= 80; ++i) lattice.push_back(-4.0 + 0.1 * i);
        const GammaReport rep = check_gamma(flux, lattice);
        std::printf("gamma: max ratio %.6g at (%.2f, %.2f) [%s]\n", rep.max_ratio,
                    rep.at_xi, rep.at_zeta, rep.pass ? "PASS" : "FAIL");
        pass = rep.pass;
    } else if (which == "psipair") {
        for (double delta : {1.0, 0.25, 0.0625}) {
            const PsiPair psi = build_psi(delta);
            const bool mass_ok = std::abs(psi.psi1(delta) - 1.0) < 1e-12;
            const bool linear_ok = std::abs(psi.psi2(3.0 * delta) - 3.0 * delta) < 1e-12;
            std::printf("psi(delta=%.4g): psi1(delta)=%.12f  psi2(3d)-3d=%.3e [%s]\n",
                        delta, psi.psi1(delta), psi.psi2(3.0 * delta) - 3.0 * delta,
                        mass_ok && linear_ok ? "PASS" : "FAIL");
            pass = pass && mass_ok && linear_ok;
        }
    } else {
        std::fprintf(stderr, "unknown check '%s'\n", which.c_str());
        return 2;
    }
    return pass ? 0 : 1;
}

int cmd_oracle_collapse(double t, double dt) {
    const StepKineticFunction f0 = StepKineticFunction::from_heavisides(
        {{0.4, -0.5}, {0.3, 0.25}, {0.3, 1.0}});
    const XiGrid xi = make_xi_grid(-1.5, 2.0, 256);
    const StepKineticFunction ft = collapse_exact(f0, t);
    const std::vector<double> fn = collapse_numeric(f0, xi, t, dt);
    double sup = 0.0;
    for (int j = 0; j < xi.bins; ++j)
        sup = std::max(sup, std::abs(fn[j] - ft.eval(xi.center(j))));
    std::printf("collapse: t=%.3f dt=%.2e sup|numeric-exact|=%.6e u0=%.6f\n", t, dt, sup,
                f0.state());
    return 0;
}

int cmd_oracle_riemann(double uL, double uR, double x, double t) {
    std::printf("riemann: u(%.4f, %.4f) = %.6f\n", x, t, burgers_riemann(uL, uR, x, t));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic scalar conservation law laboratory"};
    app.set_version_flag("--version", kVersion);
    int threads = 0, paths = 0;
    std::uint64_t seed = 0;
    std::string out;
    app.add_option("--threads", threads, "OpenMP thread count");
    app.add_option("--paths", paths, "ensemble size override");
    app.add_option("--seed", seed, "master seed override");
    app.add_option("--out", out, "output directory override");

    std::string config_path, which;
    auto* sim = app.add_subcommand("simulate", "run one path and write checkpoints");
    sim->add_option("config", config_path)->required();

    auto* exp = app.add_subcommand("experiment", "run a headline experiment");
    exp->add_option("which", which, "contraction|viscosity|regularity|energy")->required();
    exp->add_option("config", config_path)->required();

    auto* chk = app.add_subcommand("check", "verify structural bounds");
    chk->add_option("which", which, "d0d1|gamma|psipair")->required();
    chk->add_option("config", config_path)->required();

    double o_t = 1.0, o_dt = 1e-3, o_left = 1.0, o_right = 0.0, o_x = 0.0;
    auto* orc = app.add_subcommand("oracle", "closed-form reference solutions");
    orc->add_option("which", which, "collapse|riemann")->required();
    orc->add_option("--t", o_t);
    orc->add_option("--dt", o_dt);
    orc->add_option("--left", o_left);
    orc->add_option("--right", o_right);
    orc->add_option("--x", o_x);

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);
    apply_threads(threads);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, paths, seed, out);
        if (exp->parsed()) return cmd_experiment(which, config_path, paths, seed, out);
        if (chk->parsed()) return cmd_check(which, config_path);
        if (orc->parsed())
            return which == "collapse" ? cmd_oracle_collapse(o_t, o_dt)
                                       : cmd_oracle_riemann(o_left, o_right, o_x, o_t);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}

#ifndef SSCL_HARNESS_HPP
#define SSCL_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sscl/doubling.hpp"
#include "sscl/solver.hpp"

namespace sscl {

struct InitSpec {
    std::string kind = "sin";  // constant | sin | riemann | random_fourier
    double mean = 0.0;
    double amp = 0.25;
    int k = 1;
    double value = 0.0;        // constant
    double left = 1.0, right = 0.0, x0 = 0.5;  // riemann
    int kmax = 4;              // random_fourier
    std::uint64_t seed = 1;
};

struct ExperimentSpec {
    std::vector<double> eta_ladder;
    double sigma = 0.5;              // regularity exponent override (<=0: from alpha)
    int eps_points = 5;
    int delta_points = 5;
    double slack_C = 1.0;            // additive O(dt) slack coefficient
    double moment_cap_sup = 0.0;     // frozen caps; 0 disables the check
    double moment_cap_diss = 0.0;
    double measure_mass_cap = 0.0;
    double measure_moment_cap = 0.0;
    double measure_moment_sq_cap = 0.0;
};

struct ExperimentConfig {
    std::string scenario = "default";
    int dim = 1;
    int n = 128;
    std::string flux_name = "burgers";
    double flux_param = 1.0;
    std::array<double, 2> flux_direction{1.0, 0.0};
    NoiseSpec noise;
    double eta = 0.0625;
    double t_end = 0.5;
    double cfl_safety = 0.4;
    std::vector<double> snapshot_times;
    double u_bound = 2.0;
    double dt_override = 0.0;
    bool accumulate_measure = true;
    int xi_bins = 128;
    int t_bins = 64;
    InitSpec init;
    InitSpec init_b;        // second datum for coupled comparisons
    int paths = 64;
    std::uint64_t master_seed = 20240901;
    ExperimentSpec experiment;
    std::string output_dir = "out";
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);  // FNV-1a over canonical JSON

TorusGrid grid_of(const ExperimentConfig& cfg);
SolverConfig solver_config(const ExperimentConfig& cfg);
GridField initial_field(const InitSpec& init, const TorusGrid& grid);

// Manifest written before any computation; rewritten with final status.
struct RunManifest {
    std::string config_hash;
    std::uint64_t master_seed = 0;
    std::string code_version;
    std::vector<std::uint64_t> path_seeds;
    std::vector<std::string> outputs;
    std::string status = "running";
    std::string started_at;
    std::string finished_at;
};
RunManifest make_manifest(const ExperimentConfig& cfg, const std::vector<std::string>& outputs);
void write_manifest(const RunManifest& m, const std::string& path);
std::string iso_timestamp();

// (count, sum, sum of squares) triple; merging is associative.
struct StatAccumulator {
    std::uint64_t count = 0;
    double sum = 0.0;
    double sumsq = 0.0;

    void add(double x) {
        ++count;
        sum += x;
        sumsq += x * x;
    }
    double mean() const { return count ? sum / count : 0.0; }
    double variance() const {
        if (count < 2) return 0.0;
        const double m = mean();
        return std::max(0.0, sumsq / count - m * m);
    }
    double stderror() const { return count ? std::sqrt(variance() / count) : 0.0; }
};
StatAccumulator monte_carlo_reduce(const std::vector<StatAccumulator>& partials);

// CSV with a fixed header; cells printed with max round-trip precision.
void emit_csv(const std::string& path, const std::string& header,
              const std::vector<std::vector<double>>& rows);

struct ExperimentResult {
    bool pass = true;
    std::string summary;
    std::vector<std::string> outputs;
};

ExperimentResult run_contraction_experiment(const ExperimentConfig& cfg);
ExperimentResult run_viscosity_experiment(const ExperimentConfig& cfg);
ExperimentResult run_regularity_experiment(const ExperimentConfig& cfg);
ExperimentResult run_energy_experiment(const ExperimentConfig& cfg);

// Ensemble of coupled paths; slot i holds seed derive_path_seed(master, i).
// Parallel over paths, deterministic slot order.
std::vector<PathRun> run_ensemble(const SolverConfig& scfg, const GridField& u0,
                                  std::uint64_t master_seed, int paths);

// Regularity exponent from the noise modulus per the minimum rule.
double sigma_from_alpha(double alpha);

// PathRun checkpoint and CSV exports.
void write_pathrun_json(const PathRun& run, const SolverConfig& scfg,
                        const std::string& path);
void export_kinetic_measure_csv(const KineticMeasure& m, const std::string& path);
void export_kinetic_function_csv(const KineticFunction& f, const std::string& path);

}  // namespace sscl

#endif

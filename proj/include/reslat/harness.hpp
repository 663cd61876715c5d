#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "reslat/dynamics.hpp"
#include "reslat/lattice.hpp"
#include "reslat/observables.hpp"
#include "reslat/transport.hpp"

namespace reslat {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

Json lattice_to_json(const LatticeSpec& lattice);
LatticeSpec lattice_from_json(const Json& j);
Json profile_to_json(const TemperatureProfile& profile);
TemperatureProfile profile_from_json(const Json& j, int n_nodes);
PotentialModel model_from_json(const Json& j);

struct ExperimentConfig {
  Json raw;  // resolved configuration, echoed into every report
  LatticeSpec lattice;
  PotentialModel model;
  TemperatureProfile profile;
  SimParams sim;
  int replicas = 4;
  int threads = 0;
  int record_stride = 4;
  double batch_time = 10.0;
  std::string out_dir = "out";
};

ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config_file(const std::string& path);

// ---------------------------------------------------------------------------
// Reports

struct Report {
  std::string name;
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents
  Json summary;
};

// Writes the CSV files plus <name>_summary.json under out_dir.
void write_report(const Report& report, const std::string& out_dir);

std::string format_double(double x);

// ---------------------------------------------------------------------------
// Experiments (typed cores, reused by the CLI and the acceptance suite)

struct AveragingOptions {
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  std::vector<double> checkpoints{0.5, 1.0, 2.0};
  double lambda = 1.0;
  int n_edges = 3;
  PotentialModel model = PotentialModel::quartic();
  TemperatureProfile profile;  // defaults to linear (1, 2) over the chain
  PhaseState initial;          // defaults to u_j = 1
  int replicas = 10000;
  double dt_full = 0.0;  // 0 selects epsilon / 8
  double dt_eff = 0.005;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct AveragingCell {
  double epsilon = 0.0;
  double tau = 0.0;
  std::string observable;
  EstimatorResult full;
  EstimatorResult effective;

  double abs_diff() const { return std::abs(full.mean - effective.mean); }
  double combined_se() const {
    return std::sqrt(full.standard_error * full.standard_error +
                     effective.standard_error * effective.standard_error);
  }
};

std::vector<AveragingCell> averaging_cells(const AveragingOptions& opt);

struct FlowOptions {
  std::vector<double> lambdas{0.05, 0.1, 0.2};
  double epsilon = 0.025;
  double t_k = 2.0;
  double t_j = 1.0;
  PotentialModel model = PotentialModel::quartic();
  double dt = 0.0;  // 0 selects epsilon / 8
  double horizon = 2020.0;
  double burn_in = 20.0;
  int replicas = 8;
  int threads = 0;
  int record_stride = 4;
  double batch_time = 10.0;
  std::uint64_t seed = 0;
  bool include_uniform = true;
};

struct FlowPoint {
  double lambda = 0.0;
  EstimatorResult flow;  // edge flow from the hot node k to j
  EstimatorResult p2_k;  // <p_k^2>
  EstimatorResult p2_j;
};

struct FlowResult {
  std::vector<FlowPoint> points;
  double slope = 0.0;     // least squares of <J> against lambda, through origin
  double slope_se = 0.0;
  double kappa_ref = 0.0;  // closed-form kappa(t_k, t_j), quartic only
  EstimatorResult uniform_flow;  // equal temperatures, expected zero
};

FlowResult flow_vs_lambda(const FlowOptions& opt);

struct StationaryMeasureOptions {
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  double lambda = 0.1;
  int n_edges = 2;
  PotentialModel model = PotentialModel::quartic();
  double t0 = 1.0;
  double t1 = 2.0;
  double dt_full = 0.0;
  double dt_eff = 0.005;
  double horizon = 520.0;
  double burn_in = 20.0;
  int replicas = 4;
  int threads = 0;
  int record_stride = 4;
  double batch_time = 10.0;
  std::uint64_t seed = 0;
};

struct StationaryMoments {
  std::vector<EstimatorResult> action_mean;  // per node
  std::vector<EstimatorResult> action_sq;
  std::vector<EstimatorResult> edge_flow;  // per edge, lo -> hi orientation
  double autocorr_time = 0.0;              // integrated, of I_0
  double burnin_shift = 0.0;  // estimate shift when the burn-in is doubled,
                              // in combined-standard-error units
};

struct StationaryMeasureResult {
  std::vector<std::pair<double, StationaryMoments>> full;  // per epsilon
  StationaryMoments effective;
};

StationaryMeasureResult stationary_measure(const StationaryMeasureOptions& opt);

struct GreenKuboCaseOptions {
  GreenKuboParams params;
  double t_hat = 1.0;
  PotentialModel model = PotentialModel::quartic();
  int n_edges = 4;
  int n_edges_small = 2;
};

struct GreenKuboCaseResult {
  EstimatorResult same_edge;  // edge (1,2) against itself
  EstimatorResult reversed;   // against its reversal
  EstimatorResult disjoint;   // (0,1) against (3,4)
  EstimatorResult total_large;  // kappa_hat on the N-edge chain
  EstimatorResult total_small;  // kappa_hat on the small chain
  double kappa_ref = 0.0;       // closed form kappa_hat(t_hat), quartic only
};

GreenKuboCaseResult green_kubo_case(const GreenKuboCaseOptions& opt);

// ---------------------------------------------------------------------------
// Report-producing runners behind the CLI subcommands

Report run_simulate(const ExperimentConfig& cfg);
Report run_averaging_sweep(const ExperimentConfig& cfg);
Report run_stationary_measure(const ExperimentConfig& cfg);
Report run_flow_vs_lambda(const ExperimentConfig& cfg);
Report run_conductivity(const ExperimentConfig& cfg);
Report run_green_kubo(const ExperimentConfig& cfg);
Report run_fourier(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Validation suite

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationOutcome {
  std::vector<ValidationCheck> checks;
  bool all_pass = true;
  Json to_json() const;
};

ValidationOutcome run_validate(std::uint64_t seed);

}  // namespace reslat

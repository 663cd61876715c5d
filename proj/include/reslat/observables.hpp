#pragma once

#include <vector>

#include "reslat/dynamics.hpp"
#include "reslat/lattice.hpp"
#include "reslat/state.hpp"

namespace reslat {

// Mean with a batch-means standard error. Merging results is associative
// and reproduces the pooled mean exactly.
struct EstimatorResult {
  double mean = 0.0;
  double standard_error = 0.0;
  long long n_samples = 0;
  long long batch_size = 0;
};

EstimatorResult merge(const EstimatorResult& a, const EstimatorResult& b);
EstimatorResult pool(const std::vector<EstimatorResult>& parts);

// Batch-means estimate over a stationary series. Requires at least 20
// complete batches.
EstimatorResult time_average(const std::vector<double>& series,
                             long long batch_size);

// Plain mean and standard error of independent samples.
EstimatorResult mean_of_iid(const std::vector<double>& samples);

// Hamiltonian energy flow from node k to node j (per unit lambda):
// J_kj = p_k dV/dx(q_k, q_j) - p_j dV/dy(q_k, q_j). Antisymmetric in (k, j).
double energy_flow(const PhaseState& state, const LatticeSpec& lattice,
                   const PotentialModel& model, int k, int j);

// Rotation average of the energy flow for one pair of amplitudes.
// Closed form for the quartic model, -3 * Re(i u_k conj(u_j)) |u_j - u_k|^2,
// quadrature otherwise.
double resonant_flow(const PotentialModel& model, Complex u_k, Complex u_j);
double resonant_flow_quadrature(const PotentialModel& model, Complex u_k,
                                Complex u_j, int n_points);

struct StationaryRunSpec {
  SimParams params;      // horizon, burn_in, frame and seed are honored
  int replicas = 8;
  int threads = 0;       // 0 = hardware concurrency
  int record_stride = 4;
  double batch_time = 10.0;  // batch length in slow-time units
};

// Time-and-replica averages of a set of observables along stationary
// trajectories. Replica r uses trajectory index r of the seed's stream;
// results are pooled in replica order, so the output is deterministic.
std::vector<EstimatorResult> stationary_averages(
    const StationaryRunSpec& spec, const LatticeSpec& lattice,
    const PotentialModel& model, const TemperatureProfile& profile,
    const std::vector<Observer>& observers,
    const PhaseState* initial = nullptr);

// Pooled stationary average of the energy flow along edge (k, j).
EstimatorResult stationary_flow(const StationaryRunSpec& spec,
                                const LatticeSpec& lattice,
                                const PotentialModel& model,
                                const TemperatureProfile& profile, int k, int j);

// Runs body(r) for r in [0, replicas), distributed over threads. Each call
// writes only its own slot, keeping the run order-independent.
void parallel_for_replicas(int replicas, int threads,
                           const std::function<void(int)>& body);

// c[l] = (1/(n-l)) sum_t (a[t] - abar)(b[t+l] - bbar) for l = 0..max_lag,
// computed by FFT with zero padding.
std::vector<double> centered_cross_correlation(const std::vector<double>& a,
                                               const std::vector<double>& b,
                                               int max_lag);

// Integrated autocorrelation time of a series sampled at spacing dt, from
// the initial positive part of the autocorrelation function.
double integrated_autocorr_time(const std::vector<double>& series, double dt);

}  // namespace reslat

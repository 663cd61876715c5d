#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "reslat/lattice.hpp"
#include "reslat/observables.hpp"
#include "reslat/state.hpp"

namespace reslat {

// Nodes and weights for the weight function e^{-x^2} (Golub-Welsch).
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussHermiteRule gauss_hermite(int order);

inline constexpr int kGaussHermiteOrder = 24;

// Expectation of f(u_k, u_j) under the product Gaussian with
// Re u_l, Im u_l ~ N(0, T_l), evaluated by tensorized Gauss-Hermite
// quadrature over the 4 real dimensions.
double gaussian_pair_expectation(const std::function<double(Complex, Complex)>& f,
                                 double t_k, double t_j,
                                 int order = kGaussHermiteOrder);

// Closed-form solution of the two-node OU Poisson equation for the quartic
// model: A^{kj} eta = J^res with eta centered under the Gaussian measure.
double quartic_eta(Complex u_k, Complex u_j, double t_k, double t_j);

// Quartic conductivity by Gauss-Hermite quadrature of
// -<mu0, J^res eta> / (T_k T_j).
double kappa_closed_form_quartic(double t_k, double t_j,
                                 int order = kGaussHermiteOrder);

// The coefficient C in kappa = C (T_k + T_j)^2 for the quartic model,
// computed from the closed form at unit temperatures.
double quartic_kappa_coefficient(int order = kGaussHermiteOrder);

enum class ConductivityMethod { ClosedFormQuartic, OuCorrelation };

struct ConductivityQuery {
  double t_k = 1.0;
  double t_j = 1.0;
  PotentialKind model = PotentialKind::Quartic;
  ConductivityMethod method = ConductivityMethod::ClosedFormQuartic;
  double tau_max = 20.0;  // correlation cutoff; mixing makes the tail negligible
  int replicas = 300000;
  double dt = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;

  void validate() const;
};

// Conductivity kappa(T_k, T_j). The closed-form route is deterministic
// (standard error 0); the correlation route samples u(0) from the Gaussian
// measure, evolves the exact two-node OU process and accumulates
// (T_k T_j)^{-1} int_0^{tau_max} E[J^res(u(0)) J^res(u(tau))] dtau.
EstimatorResult conductivity(const ConductivityQuery& query);

// OU generator on two-node observables, by central finite differences with
// step fd_scale * (|u_l| + 1) per coordinate:
//   A f = sum_{l=k,j} [ (T_l/2) (f_pp + f_qq) - (p_l f_p + q_l f_q)/2 ].
double generator_apply(const std::function<double(const PhaseState&)>& f,
                       const PhaseState& u, double t_k, double t_j,
                       double fd_scale = 1e-4);

// Monte-Carlo solution of the OU Poisson equation at a fixed point:
// eta(u) = -int_0^inf E[J^res(u(tau)) | u(0) = u] dtau, truncated at tau_max.
EstimatorResult solve_eta(Complex u_k, Complex u_j, const PotentialModel& model,
                          double t_k, double t_j, double tau_max, int replicas,
                          std::uint64_t seed, double dt = 0.05, int threads = 0);

struct GreenKuboParams {
  double epsilon = 0.025;
  double lambda = 0.005;  // the correlation integral carries an O(lambda)
                          // dephasing bias, so lambda sits well below the
                          // flow experiments' grid
  double dt = 0.0;        // 0 selects epsilon / 8
  double tau_max = 20.0;
  double lag_dt = 0.0;    // flow-averaging bin width; 0 records every step,
                          // which keeps the fast harmonics resolved
  double traj_length = 4000.0;  // per replica, after burn-in
  double burn_in = 20.0;
  int replicas = 10;
  int threads = 0;
  std::uint64_t seed = 0;

  double step() const { return dt > 0.0 ? dt : epsilon / 8.0; }
};

// Directed edge (from, to) of the flow observable.
using DirectedEdge = std::pair<int, int>;

// Centered correlation integral
//   int_0^{tau_max} [ <J_kj(0) J_ml(tau)> - <J_kj><J_ml> ] dtau
// along stationary full-dynamics trajectories. Flows are bin-averaged over
// lag_dt windows, correlations use overlapping windows within each replica
// and the replicas are pooled.
EstimatorResult green_kubo_correlation(int k, int j, int m, int l,
                                       const GreenKuboParams& params,
                                       const LatticeSpec& lattice,
                                       const PotentialModel& model,
                                       const TemperatureProfile& profile);

// Batched version sharing one set of trajectories across observable pairs.
std::vector<EstimatorResult> green_kubo_correlations(
    const std::vector<std::pair<DirectedEdge, DirectedEdge>>& pairs,
    const GreenKuboParams& params, const LatticeSpec& lattice,
    const PotentialModel& model, const TemperatureProfile& profile);

// Green-Kubo estimate of kappa_hat(T_hat) on a uniform-temperature chain:
// (T_hat^2 N)^{-1} times the correlation integral of the summed edge flow.
EstimatorResult green_kubo_total(int n_edges, double t_hat,
                                 const GreenKuboParams& params,
                                 const PotentialModel& model);

struct FourierParams {
  double dt = 0.0;  // 0 selects epsilon / 8
  double horizon = 520.0;
  double burn_in = 20.0;
  int replicas = 4;
  int threads = 0;
  int record_stride = 4;
  double batch_time = 10.0;
  std::uint64_t seed = 0;
  std::vector<double> xs = {0.25, 0.5, 0.75};
};

struct FourierRow {
  int n_edges = 0;
  double x = 0.0;
  int edge_lo = 0;               // flow measured on edge (edge_lo+1 -> edge_lo)
  EstimatorResult scaled_flow;   // (N / lambda) * stationary flow
  double predicted = 0.0;        // kappa_hat(T(x)) * (T1 - T0), quartic only
};

// Scaled stationary flow against the conductivity prediction on a linear
// temperature profile, for each chain length in n_list.
std::vector<FourierRow> fourier_sweep(const std::vector<int>& n_list,
                                      double lambda, double epsilon, double t0,
                                      double t1, const PotentialModel& model,
                                      const FourierParams& fp);

// Low-temperature change of variables: scales the state by sqrt(delta) and
// returns the induced coupling delta^{(degree-2)/2} for a homogeneous
// polynomial interaction of the given degree (>= 3).
std::pair<PhaseState, double> low_temperature_rescale(const PhaseState& state,
                                                      double delta, int degree);

}  // namespace reslat

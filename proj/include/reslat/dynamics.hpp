#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "reslat/lattice.hpp"
#include "reslat/resavg.hpp"
#include "reslat/rng.hpp"
#include "reslat/state.hpp"

namespace reslat {

enum class Frame { Laboratory, Rotating, Effective, OrnsteinUhlenbeck };

Frame frame_from_string(const std::string& name);
const char* to_string(Frame frame);

struct SimParams {
  double epsilon = 0.05;
  double lambda = 1.0;
  double dt = 0.00625;       // step in slow time
  double horizon = 1.0;      // tau_end
  double burn_in = 0.0;
  Frame frame = Frame::Rotating;
  std::uint64_t seed = 0;

  // nu = lambda * epsilon, derived and never stored.
  double nu() const { return lambda * epsilon; }

  // Enforces the type invariants; for the full-dynamics frames the step
  // must resolve the fast phase, dt <= epsilon / 8.
  void validate() const;
};

// Covariance of sqrt(2T) * int_tau^{tau+h} e^{-i s/eps} d beta_s in
// (Re, Im) coordinates, evaluated in closed form:
//   c11 = 2T * int cos^2(s/eps),  c22 = 2T * int sin^2(s/eps),
//   c12 = -2T * int sin(s/eps) cos(s/eps),
// the sign of c12 coming from e^{-i theta} = cos theta - i sin theta.
// The trace is exactly 2*T*h.
Eigen::Matrix2d rotating_noise_covariance(double epsilon, double tau, double h,
                                          double temperature);

// Exact Gaussian increment of the rotating-frame noise over [tau, tau+h],
// built from a pair of standard normals.
Complex rotating_noise_increment(double epsilon, double tau, double h,
                                 double temperature, const Eigen::Vector2d& z);
Complex rotating_noise_increment(double epsilon, double tau, double h,
                                 double temperature, const NoiseStream& rng,
                                 std::uint32_t node, std::uint32_t step);

// a_j = e^{-i tau/eps} u_j and back. Exact mutual inverses; actions are
// preserved.
PhaseState to_lab_frame(const PhaseState& a, double tau, double epsilon);
PhaseState to_rotating_frame(const PhaseState& u, double tau, double epsilon);

// One Euler-Maruyama step of the full system in the rotating frame:
// drift e^{-i theta} P_j(e^{i theta} a) at theta = tau/eps, plus the exact
// rotated noise increment. P_j(u) = lambda sum_k i grad_j V_jk(u) - Re u_j.
PhaseState step_full_rotating(const PhaseState& a, double tau,
                              const SimParams& params,
                              const LatticeSpec& lattice,
                              const PotentialModel& model,
                              const TemperatureProfile& profile,
                              const NoiseStream& rng, std::uint32_t step);

// Exact transition of du_j = -u_j/2 dtau + sqrt(T_j) d(complex BM):
// u_j <- e^{-h/2} u_j + xi_j, with Re xi, Im xi ~ N(0, T_j (1 - e^{-h})).
PhaseState step_ou_exact(const PhaseState& u, double h,
                         const TemperatureProfile& profile,
                         const NoiseStream& rng, std::uint32_t step,
                         std::uint32_t slot = 0);

// Strang step for the effective equation: exact OU half-step, Euler step
// on the resonant drift lambda * i grad H^res, exact OU half-step.
// Consumes noise slots 0 and 1 of the given step index.
PhaseState step_effective(const PhaseState& u, const SimParams& params,
                          const LatticeSpec& lattice,
                          const PotentialModel& model,
                          const TemperatureProfile& profile,
                          const NoiseStream& rng, std::uint32_t step);

// Draw from the product Gaussian measure with Re u_j, Im u_j ~ N(0, T_j).
PhaseState sample_mu0(const TemperatureProfile& profile, const NoiseStream& rng);

struct Observer {
  std::string name;
  std::function<double(const PhaseState&, double)> fn;
};

struct SimulationRecord {
  std::vector<double> times;
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // one row per recorded time, one column per observer
};

using StateSink = std::function<void(double, const PhaseState&)>;

// Advances the frame's stepper from 0 to horizon. Observers are invoked
// every record_stride steps once tau >= burn_in; for the full-dynamics
// frames they see the laboratory state, while the sink receives the
// integration-frame state. Fully deterministic given (params, trajectory).
SimulationRecord simulate(const PhaseState& initial, const SimParams& params,
                          const LatticeSpec& lattice,
                          const PotentialModel& model,
                          const TemperatureProfile& profile,
                          const std::vector<Observer>& observers,
                          std::uint32_t trajectory = 0, int record_stride = 1,
                          const StateSink& sink = {});

}  // namespace reslat

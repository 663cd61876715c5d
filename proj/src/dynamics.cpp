#include "reslat/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace reslat {

Frame frame_from_string(const std::string& name) {
  if (name == "laboratory") return Frame::Laboratory;
  if (name == "rotating") return Frame::Rotating;
  if (name == "effective") return Frame::Effective;
  if (name == "ou") return Frame::OrnsteinUhlenbeck;
  throw std::invalid_argument("unknown frame: " + name);
}

const char* to_string(Frame frame) {
  switch (frame) {
    case Frame::Laboratory: return "laboratory";
    case Frame::Rotating: return "rotating";
    case Frame::Effective: return "effective";
    case Frame::OrnsteinUhlenbeck: return "ou";
  }
  return "unknown";
}

void SimParams::validate() const {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("lambda must lie in [0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (burn_in < 0.0) throw std::invalid_argument("burn_in must be nonnegative");
  if (frame == Frame::Laboratory || frame == Frame::Rotating) {
    if (dt > epsilon / 8.0 + 1e-15)
      throw std::invalid_argument("full-dynamics step must satisfy dt <= epsilon/8");
  }
}

Eigen::Matrix2d rotating_noise_covariance(double epsilon, double tau, double h,
                                          double temperature) {
  if (!(h > 0.0)) throw std::invalid_argument("noise increment needs h > 0");
  if (!(temperature > 0.0))
    throw std::invalid_argument("noise increment needs T > 0");
  const double a = 2.0 * tau / epsilon;
  const double b = 2.0 * (tau + h) / epsilon;
  const double ds = std::sin(b) - std::sin(a);   // sin(2s/eps) difference
  const double dc = std::cos(a) - std::cos(b);   // cos(2s/eps) difference
  const double icc = 0.5 * h + 0.25 * epsilon * ds;
  const double iss = 0.5 * h - 0.25 * epsilon * ds;
  const double isc = 0.25 * epsilon * dc;
  Eigen::Matrix2d c;
  c << 2.0 * temperature * icc, -2.0 * temperature * isc,
      -2.0 * temperature * isc, 2.0 * temperature * iss;
  return c;
}

Complex rotating_noise_increment(double epsilon, double tau, double h,
                                 double temperature, const Eigen::Vector2d& z) {
  const Eigen::Matrix2d c = rotating_noise_covariance(epsilon, tau, h, temperature);
  // 2x2 Cholesky; c(0,0) > 0 whenever h > 0 since cos^2 cannot vanish on an
  // interval.
  const double l00 = std::sqrt(c(0, 0));
  const double l10 = c(1, 0) / l00;
  const double l11 = std::sqrt(std::max(c(1, 1) - l10 * l10, 0.0));
  return {l00 * z[0], l10 * z[0] + l11 * z[1]};
}

Complex rotating_noise_increment(double epsilon, double tau, double h,
                                 double temperature, const NoiseStream& rng,
                                 std::uint32_t node, std::uint32_t step) {
  return rotating_noise_increment(epsilon, tau, h, temperature,
                                  rng.normal_pair(node, step, 0));
}

PhaseState to_lab_frame(const PhaseState& a, double tau, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  return std::polar(1.0, tau / epsilon) * a;
}

PhaseState to_rotating_frame(const PhaseState& u, double tau, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  return std::polar(1.0, -tau / epsilon) * u;
}

PhaseState step_full_rotating(const PhaseState& a, double tau,
                              const SimParams& params,
                              const LatticeSpec& lattice,
                              const PotentialModel& model,
                              const TemperatureProfile& profile,
                              const NoiseStream& rng, std::uint32_t step) {
  const int n = lattice.size();
  if (a.size() != n || profile.size() != n)
    throw std::invalid_argument("step_full_rotating: size mismatch");
  if (params.dt > params.epsilon / 8.0 + 1e-15)
    throw std::invalid_argument("full-dynamics step must satisfy dt <= epsilon/8");

  const double theta = tau / params.epsilon;
  const Complex rot = std::polar(1.0, theta);
  const Complex rot_back = std::conj(rot);
  const PhaseState v = rot * a;  // laboratory state at the step start

  // Shared Cholesky shape of the noise covariance; per node it scales by
  // sqrt(T_j).
  const Eigen::Matrix2d c1 =
      rotating_noise_covariance(params.epsilon, tau, params.dt, 1.0);
  const double l00 = std::sqrt(c1(0, 0));
  const double l10 = c1(1, 0) / l00;
  const double l11 = std::sqrt(std::max(c1(1, 1) - l10 * l10, 0.0));

  PhaseState out(n);
  for (int j = 0; j < n; ++j) {
    double s = -v[j].real();  // P_j's damping part, -Re u_j
    for (int k : lattice.neighbors[j])
      s -= params.lambda * model.d1(v[j].imag(), v[k].imag());
    const Eigen::Vector2d z = rng.normal_pair(j, step, 0);
    const double st = std::sqrt(profile[j]);
    const Complex xi(st * l00 * z[0], st * (l10 * z[0] + l11 * z[1]));
    out[j] = a[j] + params.dt * (rot_back * s) + xi;
  }
  return out;
}

PhaseState step_ou_exact(const PhaseState& u, double h,
                         const TemperatureProfile& profile,
                         const NoiseStream& rng, std::uint32_t step,
                         std::uint32_t slot) {
  if (!(h > 0.0)) throw std::invalid_argument("step_ou_exact: h must be positive");
  if (u.size() != profile.size())
    throw std::invalid_argument("step_ou_exact: size mismatch");
  const double decay = std::exp(-0.5 * h);
  const double var_factor = 1.0 - std::exp(-h);
  PhaseState out(u.size());
  for (int j = 0; j < u.size(); ++j) {
    const Eigen::Vector2d z = rng.normal_pair(j, step, slot);
    const double sigma = std::sqrt(profile[j] * var_factor);
    out[j] = decay * u[j] + Complex(sigma * z[0], sigma * z[1]);
  }
  return out;
}

namespace {

// Exact flow of one edge's resonant interaction over time h. The pair sum
// u_a + u_b is conserved and the difference z rotates with |z| fixed
// (2 lambda for the quadratic model, 3 lambda |z|^2 for the quartic), so
// the map preserves the total action exactly.
void exact_edge_rotation(PhaseState& u, int a, int b, PotentialKind kind,
                         double lambda, double h) {
  const Complex s = u[a] + u[b];
  Complex z = u[a] - u[b];
  const double rate = kind == PotentialKind::Quadratic
                          ? 2.0 * lambda
                          : 3.0 * lambda * std::norm(z);
  z *= std::polar(1.0, rate * h);
  u[a] = 0.5 * (s + z);
  u[b] = 0.5 * (s - z);
}

// Drift substep between the OU half-steps. Built-in models use symmetric
// edge splitting with the exact pair rotations, which is unconditionally
// stable; custom models fall back to a Heun substep (adequate for the
// small couplings they are meant for, and bounded-growth unlike Euler).
void resonant_drift_substep(PhaseState& u, const SimParams& params,
                            const LatticeSpec& lattice,
                            const PotentialModel& model) {
  if (model.has_closed_resonant) {
    const auto& edges = lattice.edges;
    for (std::size_t e = 0; e < edges.size(); ++e)
      exact_edge_rotation(u, edges[e].first, edges[e].second, model.kind,
                          params.lambda, 0.5 * params.dt);
    for (std::size_t e = edges.size(); e-- > 0;)
      exact_edge_rotation(u, edges[e].first, edges[e].second, model.kind,
                          params.lambda, 0.5 * params.dt);
    return;
  }
  const PhaseState k1 =
      resonant_interaction_drift(u, params.lambda, lattice, model);
  const PhaseState k2 = resonant_interaction_drift(
      (u + params.dt * k1).eval(), params.lambda, lattice, model);
  u += 0.5 * params.dt * (k1 + k2);
}

}  // namespace

PhaseState step_effective(const PhaseState& u, const SimParams& params,
                          const LatticeSpec& lattice,
                          const PotentialModel& model,
                          const TemperatureProfile& profile,
                          const NoiseStream& rng, std::uint32_t step) {
  PhaseState w = step_ou_exact(u, 0.5 * params.dt, profile, rng, step, 0);
  if (params.lambda != 0.0) resonant_drift_substep(w, params, lattice, model);
  return step_ou_exact(w, 0.5 * params.dt, profile, rng, step, 1);
}

PhaseState sample_mu0(const TemperatureProfile& profile, const NoiseStream& rng) {
  PhaseState u(profile.size());
  for (int j = 0; j < profile.size(); ++j) {
    const Eigen::Vector2d z = rng.normal_pair(j, NoiseStream::kInitStep, 0);
    const double s = std::sqrt(profile[j]);
    u[j] = Complex(s * z[0], s * z[1]);
  }
  return u;
}

SimulationRecord simulate(const PhaseState& initial, const SimParams& params,
                          const LatticeSpec& lattice,
                          const PotentialModel& model,
                          const TemperatureProfile& profile,
                          const std::vector<Observer>& observers,
                          std::uint32_t trajectory, int record_stride,
                          const StateSink& sink) {
  params.validate();
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  if (params.burn_in >= params.horizon)
    throw std::invalid_argument("burn_in must be smaller than the horizon");
  if (initial.size() != lattice.size() || profile.size() != lattice.size())
    throw std::invalid_argument("simulate: size mismatch");

  const NoiseStream rng(params.seed, trajectory);
  const auto n_steps = static_cast<std::int64_t>(std::llround(params.horizon / params.dt));
  const bool full_dynamics =
      params.frame == Frame::Laboratory || params.frame == Frame::Rotating;

  SimulationRecord rec;
  rec.names.reserve(observers.size());
  for (const auto& o : observers) rec.names.push_back(o.name);

  std::vector<double> flat;
  PhaseState state = initial;
  const double record_from = params.burn_in - 1e-12;

  auto record = [&](double tau) {
    PhaseState lab;
    const PhaseState* obs_state = &state;
    if (full_dynamics) {
      lab = to_lab_frame(state, tau, params.epsilon);
      obs_state = &lab;
    }
    if (sink) sink(tau, params.frame == Frame::Laboratory ? *obs_state : state);
    rec.times.push_back(tau);
    for (const auto& o : observers) flat.push_back(o.fn(*obs_state, tau));
  };

  for (std::int64_t s = 0; s <= n_steps; ++s) {
    const double tau = s * params.dt;
    if (s % record_stride == 0 && tau >= record_from) record(tau);
    if (s == n_steps) break;
    const auto step_index = static_cast<std::uint32_t>(s);
    switch (params.frame) {
      case Frame::Laboratory:
      case Frame::Rotating:
        state = step_full_rotating(state, tau, params, lattice, model, profile,
                                   rng, step_index);
        break;
      case Frame::Effective:
        state = step_effective(state, params, lattice, model, profile, rng,
                               step_index);
        break;
      case Frame::OrnsteinUhlenbeck:
        state = step_ou_exact(state, params.dt, profile, rng, step_index);
        break;
    }
  }

  const auto rows = static_cast<Eigen::Index>(rec.times.size());
  const auto cols = static_cast<Eigen::Index>(observers.size());
  rec.values.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      rec.values(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  return rec;
}

}  // namespace reslat

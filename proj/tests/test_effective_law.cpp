#include <doctest.h>

#include <cmath>

#include "reslat/harness.hpp"

using namespace reslat;

// A common rotation of the initial data leaves the law of the actions of the
// effective dynamics unchanged.
TEST_CASE("effective dynamics is rotation equivariant in law") {
  const LatticeSpec lat = build_chain(2);
  const TemperatureProfile prof = linear_temperature_profile(1.0, 2.0, 2);
  const PotentialModel quartic = PotentialModel::quartic();
  const int n_reps = 8000;

  auto moments = [&](Complex phase, std::uint32_t offset) {
    SimParams p;
    p.lambda = 0.5;
    p.dt = 0.005;
    p.horizon = 1.0;
    p.frame = Frame::Effective;
    p.seed = 606;
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    Eigen::Vector2d acc_sq = Eigen::Vector2d::Zero();
    for (int r = 0; r < n_reps; ++r) {
      const NoiseStream rng(p.seed, offset + static_cast<std::uint32_t>(r));
      PhaseState u = phase * PhaseState::Constant(3, Complex(1.0, 0.0));
      const auto n = static_cast<long long>(std::llround(p.horizon / p.dt));
      for (long long s = 0; s < n; ++s)
        u = step_effective(u, p, lat, quartic, prof, rng,
                           static_cast<std::uint32_t>(s));
      const double i0 = action(u[0]);
      const double i2 = action(u[2]);
      acc += Eigen::Vector2d(i0, i2);
      acc_sq += Eigen::Vector2d(i0 * i0, i2 * i2);
    }
    acc /= n_reps;
    acc_sq /= n_reps;
    const Eigen::Vector2d se =
        ((acc_sq - acc.cwiseProduct(acc)) / n_reps).cwiseSqrt();
    return std::pair<Eigen::Vector2d, Eigen::Vector2d>{acc, se};
  };

  const auto [m_base, se_base] = moments(Complex(1.0, 0.0), 0u);
  const auto [m_rot, se_rot] = moments(std::polar(1.0, 1.234), 1u << 24);
  for (int c = 0; c < 2; ++c) {
    const double se =
        std::sqrt(se_base[c] * se_base[c] + se_rot[c] * se_rot[c]);
    INFO("component ", c, ": ", m_base[c], " vs ", m_rot[c], " se ", se);
    CHECK(std::abs(m_base[c] - m_rot[c]) <= 4.0 * se);
  }
}

// At uniform temperature the Gaussian product measure is stationary for the
// effective equation at every coupling (the resonant drift is tangent to its
// level sets), so the mean actions equal the thermostat temperature.
TEST_CASE("effective stationary actions at uniform temperature") {
  const LatticeSpec lat = build_chain(1);
  const TemperatureProfile prof = uniform_temperature_profile(1.0, 2);
  StationaryRunSpec spec;
  spec.params.lambda = 0.1;
  spec.params.dt = 0.01;
  spec.params.horizon = 2020.0;
  spec.params.burn_in = 20.0;
  spec.params.frame = Frame::Effective;
  spec.params.seed = 707;
  spec.replicas = 6;
  spec.threads = 2;
  std::vector<Observer> obs{
      {"I0", [](const PhaseState& u, double) { return action(u[0]); }},
      {"I1", [](const PhaseState& u, double) { return action(u[1]); }}};
  const auto res =
      stationary_averages(spec, lat, PotentialModel::quartic(), prof, obs);
  for (const auto& r : res) {
    INFO("mean ", r.mean, " se ", r.standard_error);
    CHECK(std::abs(r.mean - 1.0) <= 3.0 * r.standard_error);
  }
}

// Full dynamics with the interaction switched off: stationary actions match
// the thermostats.
TEST_CASE("uncoupled full dynamics equilibrates to the thermostats") {
  const LatticeSpec lat = build_chain(1);
  Eigen::VectorXd temps(2);
  temps << 2.0, 1.0;
  const TemperatureProfile prof = make_profile(temps);
  StationaryRunSpec spec;
  spec.params.epsilon = 0.05;
  spec.params.lambda = 0.0;
  spec.params.dt = 0.05 / 8.0;
  spec.params.horizon = 1020.0;
  spec.params.burn_in = 20.0;
  spec.params.frame = Frame::Rotating;
  spec.params.seed = 808;
  spec.replicas = 4;
  spec.threads = 2;
  std::vector<Observer> obs{
      {"I0", [](const PhaseState& u, double) { return action(u[0]); }},
      {"I1", [](const PhaseState& u, double) { return action(u[1]); }},
      {"p0sq", [](const PhaseState& u, double) { return u[0].real() * u[0].real(); }}};
  const auto res =
      stationary_averages(spec, lat, PotentialModel::quartic(), prof, obs);
  CHECK(std::abs(res[0].mean - 2.0) <= 4.0 * res[0].standard_error);
  CHECK(std::abs(res[1].mean - 1.0) <= 4.0 * res[1].standard_error);
  CHECK(std::abs(res[2].mean - 2.0) <= 4.0 * res[2].standard_error);
}

// Heat moves from the hot node to the cold one for every coupling in a grid.
TEST_CASE("flow direction follows the temperature gradient") {
  FlowOptions opt;
  opt.lambdas = {0.05, 0.1, 0.2};
  opt.epsilon = 0.05;
  opt.t_k = 2.0;
  opt.t_j = 1.0;
  opt.horizon = 520.0;
  opt.burn_in = 20.0;
  opt.replicas = 4;
  opt.threads = 2;
  opt.seed = 909;
  opt.include_uniform = false;
  const FlowResult flow = flow_vs_lambda(opt);
  for (const auto& p : flow.points) {
    INFO("lambda ", p.lambda, " flow ", p.flow.mean, " se ",
         p.flow.standard_error);
    CHECK(p.flow.mean > 3.0 * p.flow.standard_error);
  }
}

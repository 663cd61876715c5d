#include <doctest.h>

#include <cmath>

#include "reslat/resavg.hpp"
#include "reslat/rng.hpp"

using namespace reslat;

namespace {

PhaseState random_state(const NoiseStream& rng, int n, std::uint32_t tag,
                        double scale = 1.0) {
  PhaseState u(n);
  for (int j = 0; j < n; ++j) {
    const auto z = rng.normal_pair(j, tag, 0);
    u[j] = scale * Complex(z[0], z[1]);
  }
  return u;
}

}  // namespace

TEST_CASE("resonant average of invariants and pure harmonics") {
  const NoiseStream rng(11, 0);
  const PhaseState u = random_state(rng, 2, 0);

  auto act0 = [](const PhaseState& v) { return action(v[0]); };
  for (int n : {4, 16, 64})
    CHECK(resonant_average(act0, u, n) == doctest::Approx(action(u[0])).epsilon(1e-14));

  auto q0 = [](const PhaseState& v) { return v[0].imag(); };
  CHECK(std::abs(resonant_average(q0, u, 2)) < 1e-14);
  CHECK(std::abs(resonant_average(q0, u, 16)) < 1e-14);

  CHECK_THROWS_AS(resonant_average(act0, u, 0), std::invalid_argument);
}

TEST_CASE("resonant potential closed forms") {
  const PotentialModel quartic = PotentialModel::quartic();
  const PotentialModel quadratic = PotentialModel::quadratic();

  // unit separation
  CHECK(resonant_potential(quartic, Complex(1, 0), Complex(0, 0)) ==
        doctest::Approx(0.375).epsilon(1e-14));
  CHECK(resonant_potential(quadratic, Complex(1, 0), Complex(0, 0)) ==
        doctest::Approx(0.5).epsilon(1e-14));

  // 16-point quadrature reproduces the quartic value exactly
  auto vq = [&](const PhaseState& v) {
    return quartic.value(v[0].imag(), v[1].imag());
  };
  PhaseState pair(2);
  pair << Complex(1, 0), Complex(0, 0);
  CHECK(resonant_average(vq, pair, 16) == doctest::Approx(0.375).epsilon(1e-13));

  // identical arguments
  CHECK(resonant_potential(quartic, Complex(0.3, -1.2), Complex(0.3, -1.2)) ==
        doctest::Approx(0.0));
}

TEST_CASE("custom potentials run through quadrature and match the built-in") {
  const PotentialModel quadratic = PotentialModel::quadratic();
  const PotentialModel custom = PotentialModel::custom(
      [](double x, double y) { return (x - y) * (x - y); },
      [](double x, double y) { return 2.0 * (x - y); });
  const ResonantPotential rp = ResonantPotential::for_model(custom);
  CHECK(rp.mode == ResonantPotential::Mode::Quadrature);
  const ResonantPotential rb = ResonantPotential::for_model(quadratic);
  CHECK(rb.mode == ResonantPotential::Mode::ClosedForm);

  const NoiseStream rng(12, 0);
  for (std::uint32_t i = 0; i < 50; ++i) {
    const PhaseState u = random_state(rng, 2, i);
    CHECK(rp.value(u[0], u[1]) ==
          doctest::Approx(rb.value(u[0], u[1])).epsilon(1e-12));
    CHECK(std::abs(rp.grad_j(u[0], u[1]) - rb.grad_j(u[0], u[1])) < 1e-12);
    CHECK(std::abs(rp.grad_k(u[0], u[1]) - rb.grad_k(u[0], u[1])) < 1e-12);
  }
}

TEST_CASE("effective drift routes agree and lambda=0 is pure damping") {
  const LatticeSpec chain = build_chain(2);
  const PotentialModel quartic = PotentialModel::quartic();
  const NoiseStream rng(13, 0);

  const PhaseState u = random_state(rng, 3, 0);
  const PhaseState d0 = effective_drift(u, 0.0, chain, quartic);
  CHECK((d0 + 0.5 * u).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  for (std::uint32_t i = 0; i < 100; ++i) {
    const PhaseState v = random_state(rng, 3, i + 1);
    const PhaseState closed = effective_drift(v, 0.8, chain, quartic);
    const PhaseState quad = effective_drift_quadrature(v, 0.8, chain, quartic, 64);
    CHECK((closed - quad).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("angle derivative basics") {
  PhaseState u(2);
  u << Complex(1.0, 0.0), Complex(0.4, -0.3);

  auto act0 = [](const PhaseState& v) { return action(v[0]); };
  CHECK(std::abs(angle_derivative(act0, u, 0)) < 1e-9);

  auto q0 = [](const PhaseState& v) { return v[0].imag(); };
  CHECK(angle_derivative(q0, u, 0) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(angle_derivative(q0, u, 5), std::invalid_argument);
}

TEST_CASE("averaging commutes with angle derivatives on polynomials") {
  const NoiseStream rng(14, 0);
  auto f = [](const PhaseState& v) {
    const double d = v[0].imag() - v[1].imag();
    return d * d * d * d + v[0].real() * v[1].imag();
  };
  for (std::uint32_t i = 0; i < 20; ++i) {
    const PhaseState u = random_state(rng, 2, i);
    const double lhs = resonant_average(
        [&](const PhaseState& v) { return angle_derivative(f, v, 1); }, u, 64);
    const double rhs = angle_derivative(
        [&](const PhaseState& v) { return resonant_average(f, v, 64); }, u, 1);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

#include <doctest.h>

#include "reslat/lattice.hpp"
#include "reslat/rng.hpp"

using namespace reslat;

TEST_CASE("build_chain geometry") {
  const LatticeSpec minimal = build_chain(1);
  CHECK(minimal.size() == 2);
  CHECK(minimal.edges.size() == 1);

  const LatticeSpec chain = build_chain(3);
  CHECK(chain.size() == 4);
  REQUIRE(chain.edges.size() == 3);
  CHECK(chain.edges[0] == std::pair<int, int>{0, 1});
  CHECK(chain.edges[1] == std::pair<int, int>{1, 2});
  CHECK(chain.edges[2] == std::pair<int, int>{2, 3});

  const LatticeSpec big = build_chain(10);
  CHECK(big.size() == 11);
  CHECK(big.edges.size() == 10);
  for (const auto& [a, b] : big.edges)
    CHECK((big.nodes[a] - big.nodes[b]).cwiseAbs().sum() == 1);

  CHECK_THROWS_AS(build_chain(0), std::invalid_argument);
}

TEST_CASE("general lattices derive edges from the l1 relation") {
  std::vector<Eigen::VectorXi> nodes;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      Eigen::VectorXi c(2);
      c << x, y;
      nodes.push_back(c);
    }
  const LatticeSpec square = make_lattice(2, nodes);
  CHECK(square.size() == 4);
  CHECK(square.edges.size() == 4);  // unit square, no diagonals
  CHECK(square.adjacent(0, 1));
  CHECK_FALSE(square.adjacent(0, 3));

  nodes.push_back(nodes.front());
  CHECK_THROWS_AS(make_lattice(2, nodes), std::invalid_argument);
}

TEST_CASE("linear temperature profile") {
  const TemperatureProfile flat = linear_temperature_profile(1.0, 1.0, 4);
  for (int j = 0; j <= 4; ++j) CHECK(flat[j] == doctest::Approx(1.0));

  const TemperatureProfile mid = linear_temperature_profile(1.0, 2.0, 2);
  CHECK(mid[0] == doctest::Approx(1.0));
  CHECK(mid[1] == doctest::Approx(1.5));
  CHECK(mid[2] == doctest::Approx(2.0));

  const TemperatureProfile down = linear_temperature_profile(2.0, 1.0, 4);
  for (int j = 0; j < 4; ++j) CHECK(down[j] > down[j + 1]);

  CHECK_THROWS_AS(linear_temperature_profile(0.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(linear_temperature_profile(1.0, -2.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_profile(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("hamiltonian and local energy") {
  const LatticeSpec pair = build_chain(1);
  const PotentialModel quad = PotentialModel::quadratic();

  const PhaseState zero = PhaseState::Zero(2);
  CHECK(hamiltonian(zero, pair, quad, 0.7) == doctest::Approx(0.0));

  PhaseState p_only(2);
  p_only << Complex(1.0, 0.0), Complex(0.0, 0.0);
  CHECK(hamiltonian(p_only, pair, quad, 0.0) == doctest::Approx(0.5));

  PhaseState q_only(2);
  q_only << Complex(0.0, 1.0), Complex(0.0, 0.0);
  CHECK(hamiltonian(q_only, pair, quad, 0.1) == doctest::Approx(0.6));

  CHECK_THROWS_AS(hamiltonian(PhaseState::Zero(3), pair, quad, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(local_energy(zero, pair, quad, 0.0, 5), std::invalid_argument);
}

TEST_CASE("local energies sum to the Hamiltonian") {
  const LatticeSpec chain = build_chain(4);
  const PotentialModel quartic = PotentialModel::quartic();
  const NoiseStream rng(21, 0);

  // nu = 0 reduces the local energy to the action, and interior nodes carry
  // two interaction terms against one at the boundary.
  PhaseState u(chain.size());
  for (int j = 0; j < chain.size(); ++j) {
    const auto z = rng.normal_pair(j, 0, 0);
    u[j] = Complex(z[0], z[1]);
  }
  CHECK(local_energy(u, chain, quartic, 0.0, 2) == doctest::Approx(action(u[2])));

  for (int trial = 0; trial < 50; ++trial) {
    for (int j = 0; j < chain.size(); ++j) {
      const auto z = rng.normal_pair(j, trial + 1, 0);
      u[j] = Complex(z[0], z[1]);
    }
    double sum = 0.0;
    for (int j = 0; j < chain.size(); ++j)
      sum += local_energy(u, chain, quartic, 0.4, j);
    const double h = hamiltonian(u, chain, quartic, 0.4);
    CHECK(std::abs(sum - h) <= 1e-12 * std::abs(h));
  }
}

TEST_CASE("phase-state views") {
  Eigen::VectorXd p(3), q(3);
  p << 1.0, -0.5, 0.0;
  q << 0.25, 2.0, 0.0;
  const PhaseState u = from_parts(p, q);
  CHECK((momenta(u) - p).cwiseAbs().maxCoeff() == 0.0);    // exact round trip
  CHECK((positions(u) - q).cwiseAbs().maxCoeff() == 0.0);
  CHECK(actions(u)[0] == doctest::Approx(0.5 * (1.0 + 0.0625)));
  CHECK(action(u[2]) == 0.0);
  const Eigen::VectorXd phi = angles(u);
  CHECK(phi[0] == doctest::Approx(std::atan2(0.25, 1.0)));
  CHECK(phi[2] == 0.0);  // arg 0 := 0
  CHECK_THROWS_AS(from_parts(p, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("custom potentials require both callbacks") {
  CHECK_THROWS_AS(PotentialModel::custom(nullptr, nullptr), std::invalid_argument);
  const PotentialModel m = PotentialModel::custom(
      [](double x, double y) { return (x - y) * (x - y); },
      [](double x, double y) { return 2.0 * (x - y); });
  CHECK(m.kind == PotentialKind::Custom);
  CHECK_FALSE(m.has_closed_resonant);
  CHECK(m.d2(1.0, 3.0) == doctest::Approx(4.0));  // dV/dy by symmetry
}

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "reslat/state.hpp"

namespace reslat {

// Finite subset of Z^d with nearest-neighbour edges (l1 distance 1).
// Immutable after construction; safe to share across trajectory workers.
struct LatticeSpec {
  int dimension = 1;
  std::vector<Eigen::VectorXi> nodes;
  std::vector<std::pair<int, int>> edges;  // unordered pairs, stored lo < hi
  std::vector<std::vector<int>> neighbors;

  int size() const { return static_cast<int>(nodes.size()); }
  bool adjacent(int a, int b) const;
};

// Builds the lattice from an explicit node list; edges are derived
// exhaustively from the l1-distance-1 relation. Throws on duplicate nodes
// or inconsistent coordinate dimension.
LatticeSpec make_lattice(int dimension, std::vector<Eigen::VectorXi> nodes);

// 1-d chain {0,...,N}: N+1 nodes, N edges. N >= 1.
LatticeSpec build_chain(int n_edges);

// Per-node thermostat temperatures, strictly positive.
struct TemperatureProfile {
  Eigen::VectorXd values;

  double max() const { return values.maxCoeff(); }
  double operator[](int j) const { return values[j]; }
  int size() const { return static_cast<int>(values.size()); }
};

TemperatureProfile make_profile(Eigen::VectorXd values);
TemperatureProfile uniform_temperature_profile(double t, int n_nodes);

// T_j = T1 * (j/N) + T0 * (1 - j/N), j = 0..N.
TemperatureProfile linear_temperature_profile(double t0, double t1, int n_edges);

enum class PotentialKind { Quadratic, Quartic, Custom };

const char* to_string(PotentialKind kind);

// Symmetric pair potential V(x, y) with analytic partial derivatives.
// The pinning potential is fixed to q^2/2 and is not configurable.
struct PotentialModel {
  PotentialKind kind = PotentialKind::Quadratic;
  std::function<double(double, double)> value;
  std::function<double(double, double)> d1;   // dV/dx
  std::function<double(double, double)> d11;  // d2V/dx2
  std::function<double(double, double)> d12;  // d2V/dxdy
  bool has_closed_resonant = false;

  double d2(double x, double y) const { return d1(y, x); }  // dV/dy by symmetry

  static PotentialModel quadratic();  // (x - y)^2
  static PotentialModel quartic();    // (x - y)^4
  static PotentialModel custom(std::function<double(double, double)> value,
                               std::function<double(double, double)> d1);
};

// Sum over nodes of (p^2 + q^2)/2 plus (nu/2) * sum over both edge
// orientations of V(q_j, q_k). Equals the sum of the local energies.
double hamiltonian(const PhaseState& state, const LatticeSpec& lattice,
                   const PotentialModel& model, double nu);

// (p_j^2 + q_j^2)/2 + (nu/2) * sum over neighbours k of V(q_j, q_k).
double local_energy(const PhaseState& state, const LatticeSpec& lattice,
                    const PotentialModel& model, double nu, int node);

}  // namespace reslat

#include "reslat/lattice.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace reslat {

Eigen::VectorXd angles(const PhaseState& u) {
  Eigen::VectorXd phi(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) phi[j] = angle(u[j]);
  return phi;
}

PhaseState from_parts(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("from_parts: size mismatch");
  PhaseState u(p.size());
  u.real() = p;
  u.imag() = q;
  return u;
}

bool LatticeSpec::adjacent(int a, int b) const {
  if (a < 0 || b < 0 || a >= size() || b >= size()) return false;
  for (int n : neighbors[a])
    if (n == b) return true;
  return false;
}

namespace {

int l1_distance(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  return (a - b).cwiseAbs().sum();
}

}  // namespace

LatticeSpec make_lattice(int dimension, std::vector<Eigen::VectorXi> nodes) {
  if (dimension < 1) throw std::invalid_argument("lattice dimension must be >= 1");
  if (nodes.empty()) throw std::invalid_argument("lattice needs at least one node");

  std::set<std::vector<int>> seen;
  for (const auto& n : nodes) {
    if (n.size() != dimension)
      throw std::invalid_argument("node coordinate dimension mismatch");
    std::vector<int> key(n.data(), n.data() + n.size());
    if (!seen.insert(key).second)
      throw std::invalid_argument("duplicate lattice node");
  }

  LatticeSpec lat;
  lat.dimension = dimension;
  lat.nodes = std::move(nodes);
  lat.neighbors.assign(lat.nodes.size(), {});
  for (int a = 0; a < lat.size(); ++a)
    for (int b = a + 1; b < lat.size(); ++b)
      if (l1_distance(lat.nodes[a], lat.nodes[b]) == 1) {
        lat.edges.emplace_back(a, b);
        lat.neighbors[a].push_back(b);
        lat.neighbors[b].push_back(a);
      }
  return lat;
}

LatticeSpec build_chain(int n_edges) {
  if (n_edges < 1)
    throw std::invalid_argument("build_chain: N must be >= 1, a chain with no edge carries no flow");
  std::vector<Eigen::VectorXi> nodes;
  nodes.reserve(n_edges + 1);
  for (int j = 0; j <= n_edges; ++j) {
    Eigen::VectorXi c(1);
    c[0] = j;
    nodes.push_back(c);
  }
  return make_lattice(1, std::move(nodes));
}

TemperatureProfile make_profile(Eigen::VectorXd values) {
  if (values.size() == 0)
    throw std::invalid_argument("temperature profile must be non-empty");
  for (Eigen::Index j = 0; j < values.size(); ++j)
    if (!(values[j] > 0.0) || !std::isfinite(values[j]))
      throw std::invalid_argument("temperatures must be positive and finite");
  return TemperatureProfile{std::move(values)};
}

TemperatureProfile uniform_temperature_profile(double t, int n_nodes) {
  return make_profile(Eigen::VectorXd::Constant(n_nodes, t));
}

TemperatureProfile linear_temperature_profile(double t0, double t1, int n_edges) {
  if (!(t0 > 0.0) || !(t1 > 0.0))
    throw std::invalid_argument("profile endpoints must be positive");
  if (n_edges < 1) throw std::invalid_argument("profile needs N >= 1");
  Eigen::VectorXd t(n_edges + 1);
  for (int j = 0; j <= n_edges; ++j) {
    const double x = static_cast<double>(j) / n_edges;
    t[j] = t1 * x + t0 * (1.0 - x);
  }
  return make_profile(std::move(t));
}

const char* to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Quadratic: return "quadratic";
    case PotentialKind::Quartic: return "quartic";
    case PotentialKind::Custom: return "custom";
  }
  return "unknown";
}

PotentialModel PotentialModel::quadratic() {
  PotentialModel m;
  m.kind = PotentialKind::Quadratic;
  m.value = [](double x, double y) { const double d = x - y; return d * d; };
  m.d1 = [](double x, double y) { return 2.0 * (x - y); };
  m.d11 = [](double, double) { return 2.0; };
  m.d12 = [](double, double) { return -2.0; };
  m.has_closed_resonant = true;
  return m;
}

PotentialModel PotentialModel::quartic() {
  PotentialModel m;
  m.kind = PotentialKind::Quartic;
  m.value = [](double x, double y) {
    const double d = x - y;
    return d * d * d * d;
  };
  m.d1 = [](double x, double y) {
    const double d = x - y;
    return 4.0 * d * d * d;
  };
  m.d11 = [](double x, double y) {
    const double d = x - y;
    return 12.0 * d * d;
  };
  m.d12 = [](double x, double y) {
    const double d = x - y;
    return -12.0 * d * d;
  };
  m.has_closed_resonant = true;
  return m;
}

PotentialModel PotentialModel::custom(std::function<double(double, double)> value,
                                      std::function<double(double, double)> d1) {
  if (!value || !d1)
    throw std::invalid_argument("custom potential requires value and d1 callbacks");
  PotentialModel m;
  m.kind = PotentialKind::Custom;
  m.value = std::move(value);
  m.d1 = std::move(d1);
  m.has_closed_resonant = false;
  return m;
}

double hamiltonian(const PhaseState& state, const LatticeSpec& lattice,
                   const PotentialModel& model, double nu) {
  if (state.size() != lattice.size())
    throw std::invalid_argument("hamiltonian: state/lattice size mismatch");
  double h = 0.5 * state.cwiseAbs2().sum();
  if (nu != 0.0) {
    // Each unordered edge appears twice in the double sum, prefactor nu/2.
    for (const auto& [a, b] : lattice.edges)
      h += nu * model.value(state[a].imag(), state[b].imag());
  }
  return h;
}

double local_energy(const PhaseState& state, const LatticeSpec& lattice,
                    const PotentialModel& model, double nu, int node) {
  if (state.size() != lattice.size())
    throw std::invalid_argument("local_energy: state/lattice size mismatch");
  if (node < 0 || node >= lattice.size())
    throw std::invalid_argument("local_energy: node not in lattice");
  double e = 0.5 * std::norm(state[node]);
  for (int k : lattice.neighbors[node])
    e += 0.5 * nu * model.value(state[node].imag(), state[k].imag());
  return e;
}

}  // namespace reslat

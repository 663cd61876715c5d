#include "reslat/resavg.hpp"

#include <cmath>
#include <stdexcept>

namespace reslat {

double resonant_average(const std::function<double(const PhaseState&)>& f,
                        const PhaseState& u, int n_points) {
  if (n_points < 1) throw std::invalid_argument("resonant_average: n_points >= 1");
  double acc = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double theta = 2.0 * M_PI * i / n_points;
    acc += f(std::polar(1.0, theta) * u);
  }
  return acc / n_points;
}

namespace {

double pair_average(const std::function<double(Complex, Complex)>& f,
                    Complex u_j, Complex u_k, int n_points) {
  double acc = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const Complex w = std::polar(1.0, 2.0 * M_PI * i / n_points);
    acc += f(w * u_j, w * u_k);
  }
  return acc / n_points;
}

}  // namespace

double resonant_potential_quadrature(const PotentialModel& model, Complex u_j,
                                     Complex u_k, int n_points) {
  return pair_average(
      [&](Complex a, Complex b) { return model.value(a.imag(), b.imag()); },
      u_j, u_k, n_points);
}

double resonant_potential(const PotentialModel& model, Complex u_j, Complex u_k) {
  const Complex d = u_j - u_k;
  switch (model.kind) {
    case PotentialKind::Quadratic:
      return 0.5 * std::norm(d);
    case PotentialKind::Quartic:
      return 0.375 * std::norm(d) * std::norm(d);
    case PotentialKind::Custom:
      return resonant_potential_quadrature(model, u_j, u_k, kDefaultResonantPoints);
  }
  return 0.0;
}

Complex resonant_potential_grad_quadrature(const PotentialModel& model,
                                           Complex u_j, Complex u_k,
                                           int n_points) {
  // Rotation average of e^{-i theta} * i grad_j V(e^{i theta} u), where
  // i grad_j V is the real number -dV/dx(Im u_j, Im u_k). Dividing the
  // averaged drift by i recovers grad_j of the resonant potential.
  Complex acc(0.0, 0.0);
  for (int i = 0; i < n_points; ++i) {
    const double theta = 2.0 * M_PI * i / n_points;
    const Complex w = std::polar(1.0, theta);
    const double s = -model.d1((w * u_j).imag(), (w * u_k).imag());
    acc += std::polar(1.0, -theta) * s;
  }
  acc /= static_cast<double>(n_points);
  return acc / Complex(0.0, 1.0);
}

Complex resonant_potential_grad(const PotentialModel& model, Complex u_j,
                                Complex u_k) {
  const Complex d = u_j - u_k;
  switch (model.kind) {
    case PotentialKind::Quadratic:
      return d;
    case PotentialKind::Quartic:
      return 1.5 * std::norm(d) * d;
    case PotentialKind::Custom:
      return resonant_potential_grad_quadrature(model, u_j, u_k,
                                                kDefaultResonantPoints);
  }
  return {};
}

ResonantPotential ResonantPotential::for_model(const PotentialModel& model,
                                               int n_points) {
  ResonantPotential r;
  r.source = model.kind;
  r.n_points = n_points;
  if (model.has_closed_resonant) {
    r.mode = Mode::ClosedForm;
    r.value = [model](Complex a, Complex b) {
      return resonant_potential(model, a, b);
    };
    r.grad_j = [model](Complex a, Complex b) {
      return resonant_potential_grad(model, a, b);
    };
  } else {
    r.mode = Mode::Quadrature;
    r.value = [model, n_points](Complex a, Complex b) {
      return resonant_potential_quadrature(model, a, b, n_points);
    };
    r.grad_j = [model, n_points](Complex a, Complex b) {
      return resonant_potential_grad_quadrature(model, a, b, n_points);
    };
  }
  // V is symmetric in its arguments, so grad_k(a, b) = grad_j(b, a).
  auto gj = r.grad_j;
  r.grad_k = [gj](Complex a, Complex b) { return gj(b, a); };
  return r;
}

PhaseState resonant_interaction_drift(const PhaseState& u, double lambda,
                                      const LatticeSpec& lattice,
                                      const PotentialModel& model) {
  if (u.size() != lattice.size())
    throw std::invalid_argument("drift: state/lattice size mismatch");
  PhaseState drift = PhaseState::Zero(u.size());
  if (lambda == 0.0) return drift;
  const Complex i_unit(0.0, 1.0);
  for (const auto& [a, b] : lattice.edges) {
    const Complex g = resonant_potential_grad(model, u[a], u[b]);
    drift[a] += lambda * i_unit * g;
    drift[b] += lambda * i_unit * resonant_potential_grad(model, u[b], u[a]);
  }
  return drift;
}

PhaseState effective_drift(const PhaseState& u, double lambda,
                           const LatticeSpec& lattice,
                           const PotentialModel& model) {
  PhaseState drift = resonant_interaction_drift(u, lambda, lattice, model);
  drift -= 0.5 * u;
  return drift;
}

PhaseState effective_drift_quadrature(const PhaseState& u, double lambda,
                                      const LatticeSpec& lattice,
                                      const PotentialModel& model,
                                      int n_points) {
  if (u.size() != lattice.size())
    throw std::invalid_argument("drift: state/lattice size mismatch");
  PhaseState drift = PhaseState::Zero(u.size());
  for (int i = 0; i < n_points; ++i) {
    const double theta = 2.0 * M_PI * i / n_points;
    const Complex w = std::polar(1.0, theta);
    const Complex wbar = std::conj(w);
    const PhaseState v = w * u;
    for (int j = 0; j < lattice.size(); ++j) {
      double s = -v[j].real();
      for (int k : lattice.neighbors[j])
        s -= lambda * model.d1(v[j].imag(), v[k].imag());
      drift[j] += wbar * s;
    }
  }
  return drift / static_cast<double>(n_points);
}

double angle_derivative(const std::function<double(const PhaseState&)>& f,
                        const PhaseState& u, int node, double step) {
  if (node < 0 || node >= u.size())
    throw std::invalid_argument("angle_derivative: node out of range");
  PhaseState v = u;
  v[node] = std::polar(1.0, step) * u[node];
  const double fp = f(v);
  v[node] = std::polar(1.0, -step) * u[node];
  const double fm = f(v);
  return (fp - fm) / (2.0 * step);
}

}  // namespace reslat

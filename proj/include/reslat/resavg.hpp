#pragma once

#include <functional>

#include "reslat/lattice.hpp"
#include "reslat/state.hpp"

namespace reslat {

inline constexpr int kDefaultResonantPoints = 64;

// Average of f over simultaneous rotation of all phases by a common angle:
// the mean of f(e^{i theta} u) on an equispaced theta grid. Exact for
// trigonometric polynomials in theta of degree < n_points.
double resonant_average(const std::function<double(const PhaseState&)>& f,
                        const PhaseState& u, int n_points);

// Rotation average of the pair potential V(Im u_j, Im u_k).
// Closed form for the built-ins (quadratic |u_j-u_k|^2/2, quartic
// (3/8)|u_j-u_k|^4), equispaced quadrature otherwise.
double resonant_potential(const PotentialModel& model, Complex u_j, Complex u_k);
double resonant_potential_quadrature(const PotentialModel& model, Complex u_j,
                                     Complex u_k, int n_points);

// Gradient of the resonant potential in u_j (2 d/d(conj u_j)).
Complex resonant_potential_grad(const PotentialModel& model, Complex u_j,
                                Complex u_k);
Complex resonant_potential_grad_quadrature(const PotentialModel& model,
                                           Complex u_j, Complex u_k,
                                           int n_points);

// Bound evaluator for one pair interaction, carrying its evaluation mode.
struct ResonantPotential {
  enum class Mode { ClosedForm, Quadrature };

  PotentialKind source = PotentialKind::Quadratic;
  Mode mode = Mode::ClosedForm;
  int n_points = kDefaultResonantPoints;
  std::function<double(Complex, Complex)> value;
  std::function<Complex(Complex, Complex)> grad_j;
  std::function<Complex(Complex, Complex)> grad_k;

  static ResonantPotential for_model(const PotentialModel& model,
                                     int n_points = kDefaultResonantPoints);
};

// Hamiltonian part of the effective drift, lambda * i grad_j H^res.
PhaseState resonant_interaction_drift(const PhaseState& u, double lambda,
                                      const LatticeSpec& lattice,
                                      const PotentialModel& model);

// Full effective drift R_j = lambda * i grad_j H^res - u_j / 2.
PhaseState effective_drift(const PhaseState& u, double lambda,
                           const LatticeSpec& lattice,
                           const PotentialModel& model);

// Same drift through the independent route: the rotation average of
// e^{-i theta} P_j(e^{i theta} u) by quadrature.
PhaseState effective_drift_quadrature(const PhaseState& u, double lambda,
                                      const LatticeSpec& lattice,
                                      const PotentialModel& model,
                                      int n_points = kDefaultResonantPoints);

// Derivative of theta -> f(u with u_j replaced by e^{i theta} u_j) at 0,
// by central differences along the rotation orbit.
double angle_derivative(const std::function<double(const PhaseState&)>& f,
                        const PhaseState& u, int node,
                        double step = 1e-5);

}  // namespace reslat

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace reslat {

using Complex = std::complex<double>;

// One complex amplitude u_j = p_j + i q_j per lattice node. The node index
// is the insertion order of the lattice node list.
using PhaseState = Eigen::VectorXcd;

inline Eigen::VectorXd momenta(const PhaseState& u) { return u.real(); }

inline Eigen::VectorXd positions(const PhaseState& u) { return u.imag(); }

inline double action(Complex u) { return 0.5 * std::norm(u); }

template <typename Derived>
auto actions(const Eigen::MatrixBase<Derived>& u) {
  return (0.5 * u.cwiseAbs2()).eval();
}

// arg u_j, with arg 0 := 0.
inline double angle(Complex u) {
  return (u == Complex(0.0, 0.0)) ? 0.0 : std::arg(u);
}

Eigen::VectorXd angles(const PhaseState& u);

PhaseState from_parts(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace reslat

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "hyperspec/nuclear.hpp"

// Effective spin Hamiltonian of one CF level: H_s = B.M.I + I.Q.I, with M and
// Q diagonal in a common principal frame sharing the C2 (z) axis:
//   M = R diag(g1, g2, g3) R^T        [MHz/T]
//   Q = R diag(E - D/3, -E - D/3, 2D/3) R^T   [MHz]
//   R = R_z(angle): one principal axis is the C2 axis, the transverse axes
//   are rotated by a single angle about it.

namespace hyperspec {

struct SpinHamiltonianParams {
  double D_MHz = 0.0;
  double E_MHz = 0.0;
  std::array<double, 3> g_MHz_per_T{0.0, 0.0, 0.0};
  double angle_rad = 0.0;  // transverse rotation about the C2 axis
};

namespace spinham {

inline Eigen::Matrix3d rz(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
  return r;
}

inline Eigen::Matrix3d zeeman_tensor(const SpinHamiltonianParams& p) {
  const Eigen::Matrix3d r = rz(p.angle_rad);
  return r * Eigen::Vector3d(p.g_MHz_per_T[0], p.g_MHz_per_T[1], p.g_MHz_per_T[2]).asDiagonal() *
         r.transpose();
}

inline Eigen::Matrix3d quadrupole_tensor(const SpinHamiltonianParams& p) {
  const Eigen::Matrix3d r = rz(p.angle_rad);
  const Eigen::Vector3d diag(p.E_MHz - p.D_MHz / 3.0, -p.E_MHz - p.D_MHz / 3.0,
                             2.0 * p.D_MHz / 3.0);
  return r * diag.asDiagonal() * r.transpose();
}

/// H_s on the 2I+1 nuclear space, MHz.
inline Eigen::MatrixXcd hamiltonian(const SpinHamiltonianParams& p, const MagneticField& b,
                                    HalfInt I) {
  const auto icart = nuclear::cartesian(I);
  const Eigen::Matrix3d m = zeeman_tensor(p);
  const Eigen::Matrix3d q = quadrupole_tensor(p);
  const auto bvec = b.vector_T();
  const int nd = I.twice + 1;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(nd, nd);
  for (int i = 0; i < 3; ++i) {
    std::complex<double> bm = 0.0;
    for (int j = 0; j < 3; ++j) {
      bm += bvec[j] * m(j, i);
      if (q(i, j) != 0.0) h += q(i, j) * (icart[i] * icart[j]);
    }
    h += bm * icart[i];
  }
  return h;
}

/// Eigenvalues of H_s, ascending (MHz).
inline std::vector<double> levels(const SpinHamiltonianParams& p, const MagneticField& b,
                                  HalfInt I) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(p, b, I));
  std::vector<double> e(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(e.begin(), e.end());
  return e;
}

/// Observable used by the sphere fit: adjacent level gaps of the ascending
/// spectrum, sorted ascending (offset-free and ordering-stable).
inline std::vector<double> sorted_gaps(const std::vector<double>& ascending_levels) {
  std::vector<double> g;
  for (size_t i = 0; i + 1 < ascending_levels.size(); ++i)
    g.push_back(ascending_levels[i + 1] - ascending_levels[i]);
  std::sort(g.begin(), g.end());
  return g;
}

/// Canonical reporting form under the standard D/E convention: the principal
/// value of largest magnitude defines D, so 0 <= |E| <= |D|/3; g magnitudes
/// ascending. The re-expression permutes principal axes only, so H_s
/// eigenvalues are untouched.
struct CanonicalSpinHam {
  double D_MHz = 0.0;
  double abs_E_MHz = 0.0;
  std::array<double, 3> abs_g_sorted{0.0, 0.0, 0.0};
  int d_axis = 2;              // principal axis carrying 2D/3 (2 = the C2 axis)
  bool sign_ambiguous = true;  // splittings fix neither the overall sign (time
                               // reversal) nor individual g signs
};

inline CanonicalSpinHam canonicalize(const SpinHamiltonianParams& p) {
  CanonicalSpinHam out;
  const std::array<double, 3> v{p.E_MHz - p.D_MHz / 3.0, -p.E_MHz - p.D_MHz / 3.0,
                                2.0 * p.D_MHz / 3.0};
  int c = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[c])) c = i;
  const int a = (c + 1) % 3, b = (c + 2) % 3;
  out.D_MHz = 1.5 * v[c];
  out.abs_E_MHz = std::abs(0.5 * (v[a] - v[b]));
  out.d_axis = c;
  out.abs_g_sorted = {std::abs(p.g_MHz_per_T[0]), std::abs(p.g_MHz_per_T[1]),
                      std::abs(p.g_MHz_per_T[2])};
  std::sort(out.abs_g_sorted.begin(), out.abs_g_sorted.end());
  return out;
}

/// A parameter set already in canonical form maps to itself.
inline SpinHamiltonianParams canonical_params(const CanonicalSpinHam& c) {
  SpinHamiltonianParams p;
  p.D_MHz = c.D_MHz;
  p.E_MHz = c.abs_E_MHz;
  p.g_MHz_per_T = c.abs_g_sorted;
  return p;
}

}  // namespace spinham
}  // namespace hyperspec

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hyperspec/tensor_ops.hpp"

namespace hyperspec {

/// Free-ion parameters for the f^2 configuration. Energies in cm^-1.
/// F2, F4, F6 are the direct Slater integrals F^(k); alpha/beta/gamma are the
/// two-body (Trees) corrections multiplying L(L+1), G(G2) and G(R7).
struct FreeIonParams {
  double F2 = 0.0;
  double F4 = 0.0;
  double F6 = 0.0;
  double zeta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::string configuration = "f2";

  /// Physicality warnings (never fatal): expect F2 >= F4 >= F6 >= 0, zeta >= 0.
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (!(F2 >= F4 && F4 >= F6 && F6 >= 0))
      w.push_back("free-ion Slater integrals do not satisfy F2 >= F4 >= F6 >= 0");
    if (zeta < 0) w.push_back("negative spin-orbit constant zeta");
    return w;
  }
};

namespace f2 {

/// Coulomb angular coefficient f_k(L): <(ll)L| C^k(1).C^k(2) |(ll)L>.
inline double coulomb_fk(int L, int k) {
  const HalfInt l = HalfInt::from_int(kOrbitalL);
  const double red = detail::single_Ck_rme(k);
  const double sixj = wigner6j(l, l, HalfInt::from_int(k), l, l, HalfInt::from_int(L));
  const int phase = (L % 2 == 0) ? 1 : -1;
  return phase * red * red * sixj;
}

/// Casimir eigenvalues G(G2) and G(R7) for the f^2 terms, indexed by L.
inline double casimir_g2(int L) {
  // (00):1S, (11):3P/3H, (20):1D/1G/1I, (10):3F
  static const double g[7] = {0.0, 1.0, 7.0 / 6.0, 0.5, 7.0 / 6.0, 1.0, 7.0 / 6.0};
  return g[L];
}

inline double casimir_r7(int L) {
  static const double g[7] = {0.0, 1.0, 7.0 / 5.0, 1.0, 7.0 / 5.0, 1.0, 7.0 / 5.0};
  return g[L];
}

/// Term Coulomb energy (common F0 shift omitted) plus two-body corrections.
inline double term_energy(const FreeIonParams& p, int L) {
  double e = 0.0;
  const double fk[3] = {p.F2, p.F4, p.F6};
  const int ks[3] = {2, 4, 6};
  for (int i = 0; i < 3; ++i) e += fk[i] * coulomb_fk(L, ks[i]);
  e += p.alpha * L * (L + 1.0) + p.beta * casimir_g2(L) + p.gamma * casimir_r7(L);
  return e;
}

/// Free-ion Hamiltonian H_FI on the 91-state basis, cm^-1. Diagonal Coulomb
/// part plus zeta * sum_i s(i).l(i), which mixes terms of equal J.
inline Eigen::MatrixXd free_ion_hamiltonian(const FreeIonParams& p) {
  const auto& b = basis();
  const int n = static_cast<int>(b.size());
  Eigen::MatrixXd h = p.zeta * ops::spin_orbit();
  for (int i = 0; i < n; ++i) h(i, i) += term_energy(p, terms()[b[i].term].L);
  return h;
}

}  // namespace f2
}  // namespace hyperspec

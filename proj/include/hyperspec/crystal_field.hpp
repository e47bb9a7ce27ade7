#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>

#include "hyperspec/tensor_ops.hpp"

namespace hyperspec {

/// Crystal-field parameter set B_kq (cm^-1, Wybourne normalization,
/// H_CF = sum_kq B_kq C^k_q). The quantization z axis is the site symmetry
/// axis (the C2 axis for the C2 site of Y2O3). Hermiticity requires
/// B_{k,-q} = (-1)^q conj(B_kq); set() maintains it automatically.
struct CrystalFieldParams {
  std::map<std::pair<int, int>, std::complex<double>> b;
  std::string site_symmetry = "C2";

  static bool q_allowed(const std::string& symmetry, int q) {
    if (symmetry == "C1") return true;
    if (symmetry == "C2") return q % 2 == 0;
    if (symmetry == "C3i") return q % 3 == 0;
    throw std::invalid_argument("unknown site symmetry tag: " + symmetry);
  }

  void set(int k, int q, std::complex<double> value) {
    if (k != 2 && k != 4 && k != 6) throw std::invalid_argument("B_kq rank k must be 2, 4 or 6");
    if (std::abs(q) > k) throw std::invalid_argument("B_kq component |q| must be <= k");
    if (!q_allowed(site_symmetry, q))
      throw std::invalid_argument("B_" + std::to_string(k) + std::to_string(q) +
                                  " not allowed for site symmetry " + site_symmetry);
    b[{k, q}] = value;
    const double phase = (q % 2 == 0) ? 1.0 : -1.0;
    b[{k, -q}] = phase * std::conj(value);
  }

  bool is_zero() const {
    for (const auto& [kq, v] : b)
      if (std::abs(v) != 0.0) return false;
    return true;
  }

  /// Validates the stored set: ranks, symmetry-allowed q, Hermiticity pairing.
  void validate() const {
    for (const auto& [kq, v] : b) {
      const auto [k, q] = kq;
      if (k != 2 && k != 4 && k != 6) throw std::invalid_argument("B_kq rank k must be 2, 4 or 6");
      if (std::abs(q) > k) throw std::invalid_argument("B_kq component |q| must be <= k");
      if (!q_allowed(site_symmetry, q))
        throw std::invalid_argument("B_" + std::to_string(k) + "," + std::to_string(q) +
                                    " not allowed for site symmetry " + site_symmetry);
      const double phase = (q % 2 == 0) ? 1.0 : -1.0;
      auto it = b.find({k, -q});
      const std::complex<double> partner = it == b.end() ? std::complex<double>(0) : it->second;
      if (std::abs(partner - phase * std::conj(v)) > 1e-9 * (1.0 + std::abs(v)))
        throw std::invalid_argument("Hermiticity violated: B_{k,-q} != (-1)^q conj(B_kq) for k=" +
                                    std::to_string(k) + ", q=" + std::to_string(q));
    }
  }
};

namespace f2 {

/// Crystal-field Hamiltonian H_CF = sum_kq B_kq C^k_q on the 91-state basis, cm^-1.
inline Eigen::MatrixXcd crystal_field_hamiltonian(const CrystalFieldParams& cf) {
  cf.validate();
  const int n = static_cast<int>(basis().size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [kq, v] : cf.b) {
    if (v == std::complex<double>(0)) continue;
    const auto [k, q] = kq;
    h += v * ops::spherical_Ck(k, q).cast<std::complex<double>>();
  }
  return h;
}

}  // namespace f2
}  // namespace hyperspec

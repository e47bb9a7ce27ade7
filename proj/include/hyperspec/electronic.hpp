#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "hyperspec/crystal_field.hpp"
#include "hyperspec/free_ion.hpp"

namespace hyperspec {

/// Crystal-field levels of the electronic Hamiltonian H_FI + H_CF.
/// Energies ascend from 0; eigenvector columns live on the canonical
/// |SLJM> basis.
struct CfLevelSet {
  std::vector<double> energies_cm;                // relative to the lowest level
  double offset_cm = 0.0;                         // absolute energy of level 0
  Eigen::MatrixXcd eigenvectors;                  // column i <-> energies_cm[i]
  std::vector<int> multiplet;                     // dominant multiplet per level
  std::vector<std::vector<int>> degenerate_groups;
  double degeneracy_tol_cm = 0.0;

  /// Levels assigned to a multiplet (by name, e.g. "3H4"), ascending in energy.
  std::vector<int> levels_of(const std::string& multiplet_name) const {
    const int idx = f2::multiplet_index(multiplet_name);
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(multiplet.size()); ++i)
      if (multiplet[i] == idx) out.push_back(i);
    return out;
  }
};

namespace f2 {

/// H = H_FI + H_CF on the 91-state |SLJM> basis, cm^-1.
inline Eigen::MatrixXcd electronic_hamiltonian(const FreeIonParams& fi,
                                               const CrystalFieldParams& cf) {
  Eigen::MatrixXcd h = free_ion_hamiltonian(fi).cast<std::complex<double>>();
  if (!cf.b.empty()) h += crystal_field_hamiltonian(cf);
  return h;
}

/// Diagonalizes a Hermitian electronic Hamiltonian. Throws when the input is
/// not Hermitian within 1e-10 * ||H||.
inline CfLevelSet diagonalize_electronic(const Eigen::MatrixXcd& h,
                                         double degeneracy_tol_cm = 0.01) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double herm_err = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-10 * scale)
    throw std::invalid_argument("electronic Hamiltonian is not Hermitian within tolerance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("electronic eigensolver failed to converge");

  CfLevelSet out;
  const int n = static_cast<int>(h.rows());
  out.offset_cm = solver.eigenvalues()(0);
  out.energies_cm.resize(n);
  for (int i = 0; i < n; ++i) out.energies_cm[i] = solver.eigenvalues()(i) - out.offset_cm;
  out.eigenvectors = solver.eigenvectors();
  out.degeneracy_tol_cm = degeneracy_tol_cm;

  // Dominant-multiplet assignment by squared weight.
  const auto& mps = multiplets();
  out.multiplet.resize(n);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_w = -1.0;
    for (int m = 0; m < static_cast<int>(mps.size()); ++m) {
      const double w = out.eigenvectors.col(i).segment(mps[m].offset, mps[m].size).squaredNorm();
      if (w > best_w) {
        best_w = w;
        best = m;
      }
    }
    out.multiplet[i] = best;
  }

  // Group near-degenerate levels (gap below tolerance).
  for (int i = 0; i < n;) {
    std::vector<int> group{i};
    int j = i + 1;
    while (j < n && out.energies_cm[j] - out.energies_cm[j - 1] < degeneracy_tol_cm) {
      group.push_back(j);
      ++j;
    }
    out.degenerate_groups.push_back(std::move(group));
    i = j;
  }
  return out;
}

}  // namespace f2
}  // namespace hyperspec

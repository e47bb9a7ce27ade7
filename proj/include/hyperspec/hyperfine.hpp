#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperspec/constants.hpp"
#include "hyperspec/electronic.hpp"
#include "hyperspec/nuclear.hpp"
#include "hyperspec/parallel.hpp"

// Total-Hamiltonian hyperfine stage: the electronic-nuclear Hamiltonian
// H_HF + H_Q + H_Z + H_z is assembled on (selected CF levels) x (2I+1)
// nuclear states, with the CF energies on the diagonal.
//
//   H_HF = a1 N.I           N = sum_i [l(i) - sqrt(10) [s^1(i) (x) C^2(i)]^1]
//   H_Q  = a2 H2 + a3 H3    H2 = sum_q (-1)^q [sum_i C^2_q(i)] T^2_-q(I)
//                           H3 = sum_q (-1)^q B_2q[MHz] T^2_-q(I)
//   H_Z  = mu_B B.(L + g_e S)
//   H_z  = -g_n mu_n B.I
//
// a1, a2 carry MHz; a3 is dimensionless (the rank-2 CF parameters inside H3
// supply the energy scale). Scalar products of rank-k tensors use
// P.T = sum_q (-1)^q P_q T_-q.

namespace hyperspec {

/// Fitted hyperfine interaction constants.
struct HyperfineParams {
  double a1_MHz = 0.0;
  double a2_MHz = 0.0;
  double a3 = 0.0;
};

/// Term toggles and conventions for the hyperfine build.
struct HyperfineOptions {
  bool hyperfine = true;           // a1 H1
  bool quadrupole_4f = true;       // a2 H2
  bool quadrupole_lattice = true;  // a3 H3
  bool electron_zeeman = true;     // H_Z
  bool nuclear_zeeman = true;      // H_z
  double g_e = constants::kElectronG;
  double doublet_tol_MHz = 1e-5;   // 10 Hz zero-field pairing tolerance
};

/// Electronic window: CF levels of one multiplet with all needed operators
/// projected onto the CF eigenvectors.
struct HyperfineWindow {
  std::vector<int> cf_levels;             // indices into the source CfLevelSet
  std::vector<double> energies_MHz;       // CF energies relative to window minimum
  std::vector<Eigen::MatrixXcd> n_sph;    // N_q projections, q = -1,0,1
  std::vector<Eigen::MatrixXcd> c2_sph;   // sum_i C^2_q projections, q = -2..2
  std::array<Eigen::MatrixXcd, 3> l_cart; // L_x, L_y, L_z projections
  std::array<Eigen::MatrixXcd, 3> s_cart; // S_x, S_y, S_z projections
  std::array<std::complex<double>, 5> b2q_MHz{};  // lattice B_2q, q = -2..2, in MHz
  NuclearParams nuc;

  int nlev() const { return static_cast<int>(energies_MHz.size()); }
  int dim() const { return nlev() * nuc.dim(); }
};

namespace hyperfine {

/// Projects the full-basis electronic operators onto the chosen CF levels.
inline HyperfineWindow make_window(const CfLevelSet& levels, const CrystalFieldParams& cf,
                                   const NuclearParams& nuc, const std::vector<int>& cf_level_ids,
                                   bool allow_mixed_multiplets = false) {
  if (cf_level_ids.empty()) throw std::invalid_argument("hyperfine window is empty");
  nuc.validate();
  for (int id : cf_level_ids)
    if (id < 0 || id >= static_cast<int>(levels.energies_cm.size()))
      throw std::invalid_argument("CF level index out of range");
  if (!allow_mixed_multiplets) {
    const int m0 = levels.multiplet[cf_level_ids.front()];
    for (int id : cf_level_ids)
      if (levels.multiplet[id] != m0)
        throw std::invalid_argument(
            "window mixes CF levels of different multiplets (pass allow_mixed_multiplets)");
  }

  HyperfineWindow w;
  w.cf_levels = cf_level_ids;
  w.nuc = nuc;
  const int n = static_cast<int>(cf_level_ids.size());

  double emin = levels.energies_cm[cf_level_ids[0]];
  for (int id : cf_level_ids) emin = std::min(emin, levels.energies_cm[id]);
  for (int id : cf_level_ids)
    w.energies_MHz.push_back((levels.energies_cm[id] - emin) * constants::kMHzPerInvCm);

  Eigen::MatrixXcd sel(levels.eigenvectors.rows(), n);
  for (int i = 0; i < n; ++i) sel.col(i) = levels.eigenvectors.col(cf_level_ids[i]);

  auto project = [&](const Eigen::MatrixXcd& op) -> Eigen::MatrixXcd {
    return sel.adjoint() * op * sel;
  };

  for (int q = -1; q <= 1; ++q)
    w.n_sph.push_back(project(f2::ops::hyperfine_N(q).cast<std::complex<double>>()));
  for (int q = -2; q <= 2; ++q)
    w.c2_sph.push_back(project(f2::ops::spherical_Ck(2, q).cast<std::complex<double>>()));
  const auto l3 = f2::ops::cartesian_vector([](int q) { return f2::ops::orbital_L(q); });
  const auto s3 = f2::ops::cartesian_vector([](int q) { return f2::ops::spin_S(q); });
  for (int a = 0; a < 3; ++a) {
    w.l_cart[a] = project(l3[a]);
    w.s_cart[a] = project(s3[a]);
  }
  for (int q = -2; q <= 2; ++q) {
    auto it = cf.b.find({2, q});
    w.b2q_MHz[q + 2] =
        it == cf.b.end() ? std::complex<double>(0) : it->second * constants::kMHzPerInvCm;
  }
  return w;
}

/// Window over all CF levels assigned to one multiplet (e.g. "3H4").
inline HyperfineWindow make_window(const CfLevelSet& levels, const CrystalFieldParams& cf,
                                   const NuclearParams& nuc, const std::string& multiplet) {
  return make_window(levels, cf, nuc, levels.levels_of(multiplet));
}

/// Rescales CF gaps within the window (used by the second-order consistency
/// checks: full diagonalization and the perturbative route must converge as
/// gaps grow).
inline HyperfineWindow scale_cf_gaps(HyperfineWindow w, double factor) {
  for (double& e : w.energies_MHz) e *= factor;
  return w;
}

/// Lattice quadrupole H3 on the nuclear space (before the a3 scale), MHz.
inline Eigen::MatrixXcd lattice_quadrupole(const HyperfineWindow& w) {
  const int nd = w.nuc.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(nd, nd);
  for (int q = -2; q <= 2; ++q) {
    const auto b = w.b2q_MHz[q + 2];
    if (b == std::complex<double>(0)) continue;
    const double phase = (q % 2 == 0) ? 1.0 : -1.0;
    h += phase * b * nuclear::t2(w.nuc.I, -q);
  }
  return h;
}

/// Full electronic (x) nuclear Hamiltonian on the window, MHz.
/// Index layout: (cf level a, nuclear m) -> a * (2I+1) + m.
inline Eigen::MatrixXcd build_total_hamiltonian(const HyperfineWindow& w,
                                                const HyperfineParams& p, const MagneticField& b,
                                                const HyperfineOptions& opt = {}) {
  const int nl = w.nlev();
  const int nd = w.nuc.dim();
  const int dim = nl * nd;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const auto bvec = b.vector_T();

  // nuclear-only pieces (diagonal in the electronic index)
  Eigen::MatrixXcd hn = Eigen::MatrixXcd::Zero(nd, nd);
  if (opt.quadrupole_lattice && p.a3 != 0.0) hn += p.a3 * lattice_quadrupole(w);
  if (opt.nuclear_zeeman && b.magnitude_T > 0) {
    const auto icart = nuclear::cartesian(w.nuc.I);
    for (int a = 0; a < 3; ++a)
      hn -= w.nuc.g_n * constants::kNuclearMagnetonMHzPerT * bvec[a] * icart[a];
  }

  std::vector<Eigen::MatrixXcd> isph;
  for (int q = -1; q <= 1; ++q) isph.push_back(nuclear::spherical(w.nuc.I, q));
  std::vector<Eigen::MatrixXcd> t2q;
  for (int q = -2; q <= 2; ++q) t2q.push_back(nuclear::t2(w.nuc.I, q));

  for (int a = 0; a < nl; ++a) {
    for (int c = 0; c < nl; ++c) {
      Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(nd, nd);
      if (a == c) {
        block += w.energies_MHz[a] * Eigen::MatrixXcd::Identity(nd, nd);
        block += hn;
      }
      if (opt.hyperfine && p.a1_MHz != 0.0) {
        for (int q = -1; q <= 1; ++q) {
          const auto me = w.n_sph[q + 1](a, c);
          if (me == std::complex<double>(0)) continue;
          const double phase = (q % 2 == 0) ? 1.0 : -1.0;
          block += p.a1_MHz * phase * me * isph[-q + 1];
        }
      }
      if (opt.quadrupole_4f && p.a2_MHz != 0.0) {
        for (int q = -2; q <= 2; ++q) {
          const auto me = w.c2_sph[q + 2](a, c);
          if (me == std::complex<double>(0)) continue;
          const double phase = (q % 2 == 0) ? 1.0 : -1.0;
          block += p.a2_MHz * phase * me * t2q[-q + 2];
        }
      }
      if (opt.electron_zeeman && b.magnitude_T > 0) {
        std::complex<double> zme = 0.0;
        for (int ax = 0; ax < 3; ++ax)
          zme += bvec[ax] * (w.l_cart[ax](a, c) + opt.g_e * w.s_cart[ax](a, c));
        block += constants::kBohrMagnetonMHzPerT * zme * Eigen::MatrixXcd::Identity(nd, nd);
      }
      h.block(a * nd, c * nd, nd, nd) = block;
    }
  }
  return h;
}

/// Hyperfine structure of one CF level: its 2I+1 sublevels and the
/// doublet-gap splittings.
struct HyperfineLevelSet {
  int target_level = 0;                    // window-local CF level index
  std::vector<double> energies_MHz;        // 2I+1 sublevels relative to the lowest
  std::vector<double> splittings_MHz;      // gaps between doublet centers, ascending
  bool doubly_degenerate = false;          // every sublevel paired within tolerance
};

namespace detail {

/// Diagonalizes and collects the sublevels belonging to one CF level,
/// assigned by eigenvector weight.
inline std::vector<double> sublevels_of(const Eigen::MatrixXcd& h, int nlev, int nd, int target) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hyperfine eigensolver failed");
  std::vector<double> out;
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    int best = 0;
    double best_w = -1.0;
    for (int a = 0; a < nlev; ++a) {
      const double wgt = solver.eigenvectors().col(i).segment(a * nd, nd).squaredNorm();
      if (wgt > best_w) {
        best_w = wgt;
        best = a;
      }
    }
    if (best == target) out.push_back(solver.eigenvalues()(i));
  }
  if (static_cast<int>(out.size()) != nd)
    throw std::runtime_error("could not attribute exactly 2I+1 sublevels to the target CF level");
  std::sort(out.begin(), out.end());
  return out;
}

inline HyperfineLevelSet levels_from_energies(std::vector<double> e, int target, double tol) {
  HyperfineLevelSet out;
  out.target_level = target;
  const double e0 = e.front();
  for (double& x : e) x -= e0;
  out.energies_MHz = e;

  // zero-field pairing: adjacent pairs within tolerance
  out.doubly_degenerate = true;
  std::vector<double> centers;
  for (size_t i = 0; i + 1 < e.size(); i += 2) {
    if (e[i + 1] - e[i] > tol) out.doubly_degenerate = false;
    centers.push_back(0.5 * (e[i] + e[i + 1]));
  }
  if (out.doubly_degenerate) {
    for (size_t i = 0; i + 1 < centers.size(); ++i)
      out.splittings_MHz.push_back(centers[i + 1] - centers[i]);
    std::sort(out.splittings_MHz.begin(), out.splittings_MHz.end());
  }
  return out;
}

}  // namespace detail

/// Zero-field hyperfine splittings of one CF level (window-local index).
inline HyperfineLevelSet zero_field_splittings(const HyperfineWindow& w, const HyperfineParams& p,
                                               int target_level = 0,
                                               const HyperfineOptions& opt = {}) {
  const auto h = build_total_hamiltonian(w, p, MagneticField::zero(), opt);
  auto e = detail::sublevels_of(h, w.nlev(), w.nuc.dim(), target_level);
  return detail::levels_from_energies(std::move(e), target_level, opt.doublet_tol_MHz);
}

/// Sublevel energies (relative to the lowest of the target CF level) for a set
/// of field directions at fixed magnitude. Directions evaluate independently;
/// results are ordered by direction index for any worker count.
inline std::vector<std::vector<double>> splittings_vs_field(
    const HyperfineWindow& w, const HyperfineParams& p,
    const std::vector<std::array<double, 3>>& directions, double magnitude_T,
    int target_level = 0, const HyperfineOptions& opt = {}, int threads = 1) {
  if (directions.empty()) throw std::invalid_argument("no field directions given");
  std::vector<std::vector<double>> out(directions.size());
  parallel_for(static_cast<int>(directions.size()), threads, [&](int i) {
    const auto b = MagneticField::along(magnitude_T, directions[i]);
    const auto h = build_total_hamiltonian(w, p, b, opt);
    auto e = detail::sublevels_of(h, w.nlev(), w.nuc.dim(), target_level);
    const double e0 = e.front();
    for (double& x : e) x -= e0;
    out[i] = std::move(e);
  });
  return out;
}

/// Per-term contribution breakdown: splittings with one term disabled and
/// with only that term enabled, plus the signed deltas against the full model.
struct ContributionReport {
  std::vector<double> full_splittings_MHz;
  struct Entry {
    std::string term;
    std::vector<double> splittings_without_MHz;
    std::vector<double> splittings_only_MHz;
    std::vector<double> delta_MHz;  // full - without
  };
  std::vector<Entry> entries;
};

inline ContributionReport contribution_analysis(const HyperfineWindow& w, const HyperfineParams& p,
                                                int target_level = 0,
                                                const MagneticField& b = MagneticField::zero(),
                                                const HyperfineOptions& base = {}) {
  auto level_energies = [&](const HyperfineOptions& o) {
    const auto h = build_total_hamiltonian(w, p, b, o);
    auto e = detail::sublevels_of(h, w.nlev(), w.nuc.dim(), target_level);
    return detail::levels_from_energies(std::move(e), target_level, o.doublet_tol_MHz);
  };

  ContributionReport rep;
  rep.full_splittings_MHz = level_energies(base).splittings_MHz;

  const std::vector<std::pair<std::string, bool HyperfineOptions::*>> toggles = {
      {"H1", &HyperfineOptions::hyperfine},
      {"a2H2", &HyperfineOptions::quadrupole_4f},
      {"a3H3", &HyperfineOptions::quadrupole_lattice},
      {"HZ", &HyperfineOptions::electron_zeeman},
      {"Hz", &HyperfineOptions::nuclear_zeeman},
  };
  for (const auto& [name, member] : toggles) {
    ContributionReport::Entry e;
    e.term = name;
    HyperfineOptions off = base;
    off.*member = false;
    e.splittings_without_MHz = level_energies(off).splittings_MHz;

    HyperfineOptions only = base;
    only.hyperfine = only.quadrupole_4f = only.quadrupole_lattice = false;
    only.electron_zeeman = only.nuclear_zeeman = false;
    only.*member = true;
    e.splittings_only_MHz = level_energies(only).splittings_MHz;

    for (size_t i = 0; i < rep.full_splittings_MHz.size(); ++i)
      e.delta_MHz.push_back(rep.full_splittings_MHz[i] -
                            (i < e.splittings_without_MHz.size() ? e.splittings_without_MHz[i] : 0.0));
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

/// Pseudoquadrupole second-order estimate for an isolated CF singlet:
///   H_eff = first-order terms + sum_{a != t} V_ta V_at / (E_t - E_a),
/// with V the hyperfine-plus-electron-Zeeman coupling. Serves as an
/// independent cross-check of the full diagonalization.
inline HyperfineLevelSet second_order_oracle(const HyperfineWindow& w, const HyperfineParams& p,
                                             int target_level = 0,
                                             const MagneticField& b = MagneticField::zero(),
                                             const HyperfineOptions& opt = {},
                                             double min_gap_MHz = 1e4) {
  const int nl = w.nlev();
  const int nd = w.nuc.dim();
  const int t = target_level;
  const auto bvec = b.vector_T();

  std::vector<Eigen::MatrixXcd> isph;
  for (int q = -1; q <= 1; ++q) isph.push_back(nuclear::spherical(w.nuc.I, q));

  // nuclear-space coupling operator between CF levels a and c
  auto v_block = [&](int a, int c) {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(nd, nd);
    if (opt.hyperfine && p.a1_MHz != 0.0)
      for (int q = -1; q <= 1; ++q) {
        const double phase = (q % 2 == 0) ? 1.0 : -1.0;
        v += p.a1_MHz * phase * w.n_sph[q + 1](a, c) * isph[-q + 1];
      }
    if (opt.electron_zeeman && b.magnitude_T > 0) {
      std::complex<double> zme = 0.0;
      for (int ax = 0; ax < 3; ++ax)
        zme += bvec[ax] * (w.l_cart[ax](a, c) + opt.g_e * w.s_cart[ax](a, c));
      v += constants::kBohrMagnetonMHzPerT * zme * Eigen::MatrixXcd::Identity(nd, nd);
    }
    return v;
  };

  Eigen::MatrixXcd heff = v_block(t, t);  // first-order hyperfine + Zeeman diagonal
  if (opt.quadrupole_4f && p.a2_MHz != 0.0)
    for (int q = -2; q <= 2; ++q) {
      const double phase = (q % 2 == 0) ? 1.0 : -1.0;
      heff += p.a2_MHz * phase * w.c2_sph[q + 2](t, t) * nuclear::t2(w.nuc.I, -q);
    }
  if (opt.quadrupole_lattice && p.a3 != 0.0) heff += p.a3 * lattice_quadrupole(w);
  if (opt.nuclear_zeeman && b.magnitude_T > 0) {
    const auto icart = nuclear::cartesian(w.nuc.I);
    for (int ax = 0; ax < 3; ++ax)
      heff -= w.nuc.g_n * constants::kNuclearMagnetonMHzPerT * bvec[ax] * icart[ax];
  }

  for (int a = 0; a < nl; ++a) {
    if (a == t) continue;
    const double gap = w.energies_MHz[t] - w.energies_MHz[a];
    if (std::abs(gap) < min_gap_MHz)
      throw std::runtime_error("second-order oracle: CF level nearly degenerate with target");
    heff += (v_block(t, a) * v_block(a, t)) / gap;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(heff);
  std::vector<double> e(solver.eigenvalues().data(),
                        solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(e.begin(), e.end());
  return detail::levels_from_energies(std::move(e), t, opt.doublet_tol_MHz);
}

}  // namespace hyperfine
}  // namespace hyperspec

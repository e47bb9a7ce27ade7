#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hyperspec/hyperfine.hpp"
#include "hyperspec/levmar.hpp"
#include "hyperspec/parallel.hpp"
#include "hyperspec/spin_hamiltonian.hpp"

// Parameter estimation: (a1, a2, a3) against measured splittings, and the
// effective spin Hamiltonian against full-model splittings computed over a
// sphere of field directions.

namespace hyperspec {

struct FitReport {
  Eigen::VectorXd parameters;
  std::vector<std::string> parameter_names;
  Eigen::VectorXd residuals;
  double residual_norm = 0.0;
  Eigen::MatrixXd covariance;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

namespace spinfit {

/// Deterministic quasi-uniform sphere coverage: the three CF axes (both
/// signs) followed by a Fibonacci lattice. n >= 6.
inline std::vector<std::array<double, 3>> sample_sphere(int n) {
  if (n < 6) throw std::invalid_argument("sample_sphere needs n >= 6 directions");
  std::vector<std::array<double, 3>> dirs = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                             {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  const int m = n - 6;
  const double golden_angle = constants::kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < m; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / m;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return dirs;
}

/// Splitting observations over a sphere of directions at fixed |B|.
/// The sorted gap magnitudes are invariant under the simultaneous sign flip
/// (D, E) -> (-D, -E) (composed with time reversal), so the sign of D is only
/// fixed by the zero-field doublet-gap ordering carried alongside.
struct SphereData {
  std::vector<std::array<double, 3>> directions;
  std::vector<std::vector<double>> gaps;  // sorted adjacent level gaps per direction
  std::vector<double> zero_field_gaps;    // doublet-center gaps in level order (optional)
  double magnitude_T = 5e-3;
  HalfInt I = HalfInt(5);
};

namespace detail {

inline std::vector<double> doublet_center_gaps(const std::vector<double>& ascending_levels) {
  std::vector<double> centers;
  for (size_t i = 0; i + 1 < ascending_levels.size(); i += 2)
    centers.push_back(0.5 * (ascending_levels[i] + ascending_levels[i + 1]));
  std::vector<double> gaps;
  for (size_t i = 0; i + 1 < centers.size(); ++i) gaps.push_back(centers[i + 1] - centers[i]);
  return gaps;
}

}  // namespace detail

/// Observations from the effective spin Hamiltonian (synthetic data).
inline SphereData sphere_data_from_spinham(const SpinHamiltonianParams& p,
                                           const std::vector<std::array<double, 3>>& dirs,
                                           double magnitude_T, HalfInt I) {
  SphereData d;
  d.directions = dirs;
  d.magnitude_T = magnitude_T;
  d.I = I;
  for (const auto& dir : dirs)
    d.gaps.push_back(
        spinham::sorted_gaps(spinham::levels(p, MagneticField::along(magnitude_T, dir), I)));
  d.zero_field_gaps = detail::doublet_center_gaps(spinham::levels(p, MagneticField::zero(), I));
  return d;
}

/// Observations from the full electron-nuclear model.
inline SphereData sphere_data_from_full_model(const HyperfineWindow& w, const HyperfineParams& p,
                                              const std::vector<std::array<double, 3>>& dirs,
                                              double magnitude_T, int target_level = 0,
                                              const HyperfineOptions& opt = {}, int threads = 1) {
  SphereData d;
  d.directions = dirs;
  d.magnitude_T = magnitude_T;
  d.I = w.nuc.I;
  const auto maps =
      hyperfine::splittings_vs_field(w, p, dirs, magnitude_T, target_level, opt, threads);
  for (const auto& levels : maps) {
    std::vector<double> gaps;
    for (size_t i = 0; i + 1 < levels.size(); ++i) gaps.push_back(levels[i + 1] - levels[i]);
    std::sort(gaps.begin(), gaps.end());
    d.gaps.push_back(std::move(gaps));
  }
  const auto zf = hyperfine::zero_field_splittings(w, p, target_level, opt);
  d.zero_field_gaps = detail::doublet_center_gaps(zf.energies_MHz);
  return d;
}

namespace detail {

inline SpinHamiltonianParams unpack(const Eigen::VectorXd& x) {
  SpinHamiltonianParams p;
  p.D_MHz = x(0);
  p.E_MHz = x(1);
  p.angle_rad = x(2);
  p.g_MHz_per_T = {x(3), x(4), x(5)};
  return p;
}

/// Residuals: model sorted gaps minus observed, stacked over directions.
inline Eigen::VectorXd spinham_residuals(const Eigen::VectorXd& x, const SphereData& data) {
  const SpinHamiltonianParams p = unpack(x);
  const int per_dir = data.I.twice;  // 2I gaps per direction
  Eigen::VectorXd r(per_dir * static_cast<int>(data.directions.size()));
  for (size_t i = 0; i < data.directions.size(); ++i) {
    const auto gaps = spinham::sorted_gaps(
        spinham::levels(p, MagneticField::along(data.magnitude_T, data.directions[i]), data.I));
    for (int k = 0; k < per_dir; ++k) r(i * per_dir + k) = gaps[k] - data.gaps[i][k];
  }
  return r;
}

/// Analytic Jacobian via first-order eigenvalue perturbation.
inline Eigen::MatrixXd spinham_jacobian(const Eigen::VectorXd& x, const SphereData& data) {
  const SpinHamiltonianParams p = unpack(x);
  const auto icart = nuclear::cartesian(data.I);
  const int nd = data.I.twice + 1;
  const int per_dir = data.I.twice;
  const Eigen::Matrix3d r3 = spinham::rz(p.angle_rad);
  const Eigen::Matrix3d m = spinham::zeeman_tensor(p);
  const Eigen::Matrix3d q = spinham::quadrupole_tensor(p);
  Eigen::Matrix3d k3;
  k3 << 0, -1, 0, 1, 0, 0, 0, 0, 0;  // generator of rotations about z

  // parameter derivatives of the two tensors
  std::array<Eigen::Matrix3d, 6> dm, dq;
  dm.fill(Eigen::Matrix3d::Zero());
  dq.fill(Eigen::Matrix3d::Zero());
  dq[0] = r3 * Eigen::Vector3d(-1.0 / 3, -1.0 / 3, 2.0 / 3).asDiagonal() * r3.transpose();
  dq[1] = r3 * Eigen::Vector3d(1, -1, 0).asDiagonal() * r3.transpose();
  dm[2] = k3 * m - m * k3;
  dq[2] = k3 * q - q * k3;
  for (int g = 0; g < 3; ++g) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(g) = 1.0;
    dm[3 + g] = r3 * e.asDiagonal() * r3.transpose();
  }

  Eigen::MatrixXd jac(per_dir * static_cast<int>(data.directions.size()), 6);
  for (size_t i = 0; i < data.directions.size(); ++i) {
    const auto b = MagneticField::along(data.magnitude_T, data.directions[i]);
    const auto bvec = b.vector_T();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(spinham::hamiltonian(p, b, data.I));
    const auto& v = es.eigenvectors();

    // eigenvalue derivatives per parameter
    std::array<Eigen::VectorXd, 6> dlam;
    for (int pk = 0; pk < 6; ++pk) {
      Eigen::MatrixXcd dh = Eigen::MatrixXcd::Zero(nd, nd);
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
          if (dq[pk](a, c) != 0.0) dh += dq[pk](a, c) * (icart[a] * icart[c]);
          if (dm[pk](c, a) != 0.0) dh += bvec[c] * dm[pk](c, a) * icart[a];
        }
      dlam[pk] = (v.adjoint() * dh * v).diagonal().real();
    }

    // adjacent gaps with the sorting permutation of the gap values
    std::vector<double> gaps(per_dir);
    for (int k = 0; k < per_dir; ++k) gaps[k] = es.eigenvalues()(k + 1) - es.eigenvalues()(k);
    std::vector<int> order(per_dir);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int c) { return gaps[a] < gaps[c]; });
    for (int k = 0; k < per_dir; ++k) {
      const int src = order[k];
      for (int pk = 0; pk < 6; ++pk)
        jac(i * per_dir + k, pk) = dlam[pk](src + 1) - dlam[pk](src);
    }
  }
  return jac;
}

}  // namespace detail

struct SpinFitOptions {
  int multistart = 8;
  unsigned seed = 12345;
  int threads = 1;
  LevMarOptions lm{};
  double accept_rms_MHz = 1e-9;  // stop multi-starting below this residual rms
};

struct SpinHamFit {
  SpinHamiltonianParams params;        // best-fit raw parameterization
  spinham::CanonicalSpinHam canonical; // reported form (D, |E|, |g| sorted)
  FitReport report;
};

/// Fits H_s = B.M.I + I.Q.I to sphere data. Deterministic given the seed.
inline SpinHamFit fit_spin_hamiltonian(const SphereData& data, const SpinFitOptions& opt = {}) {
  if (data.directions.size() < 6)
    throw std::invalid_argument("spin-Hamiltonian fit needs at least 6 directions");

  // Start heuristics. The largest sorted gap tracks 4|D| (or 2|D| when the
  // doublet splittings interleave); per-axis doublet splittings sum to
  // (1+3+5) g_axis |B| and seed the g estimates.
  const int per_dir = data.I.twice;
  double big = 0.0, small = 0.0;
  for (const auto& g : data.gaps) {
    big += g[per_dir - 1];
    small += (g[0] + g[1] + g[2]) / 3.0;
  }
  big /= static_cast<double>(data.gaps.size());
  small /= static_cast<double>(data.gaps.size());
  const double d0 = big / 4.0;
  const double g_generic = std::clamp(3.0 * small / data.magnitude_T / 9.0, 1.0, 200.0);

  auto axis_g = [&](int axis) {
    for (size_t i = 0; i < data.directions.size(); ++i) {
      if (std::abs(std::abs(data.directions[i][axis]) - 1.0) < 1e-9) {
        const auto& g = data.gaps[i];
        return std::clamp((g[0] + g[1] + g[2]) / (9.0 * data.magnitude_T), 1.0, 300.0);
      }
    }
    return g_generic;
  };
  const double gx = axis_g(0), gy = axis_g(1), gz = axis_g(2);

  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::VectorXd> starts;
  auto push = [&](double D, double E, double th, double g1, double g2, double g3) {
    Eigen::VectorXd x(6);
    x << D, E, th, g1, g2, g3;
    starts.push_back(x);
  };
  for (int sgn : {+1, -1}) {
    push(sgn * d0, 0.05 * d0, 0.0, gx, gy, gz);
    push(sgn * d0, 0.05 * d0, constants::kPi / 4.0, gx, gy, gz);
    push(sgn * 2.0 * d0, 0.1 * d0, 0.0, gx, gy, gz);  // largest gap = 2|D| reading
  }
  while (static_cast<int>(starts.size()) < opt.multistart)
    push((u(rng) < 0.5 ? 1 : -1) * d0 * (0.5 + u(rng)), (u(rng) - 0.5) * 0.6 * d0,
         u(rng) * constants::kPi / 2.0, gx * (0.5 + u(rng)), gy * (0.5 + u(rng)),
         gz * (0.5 + u(rng)));

  LevMarOptions lm = opt.lm;
  lm.scales = Eigen::VectorXd(6);
  lm.scales << std::max(0.1, d0), std::max(0.03, 0.3 * d0), 0.3, g_generic, g_generic, g_generic;

  auto resid = [&](const Eigen::VectorXd& x) { return detail::spinham_residuals(x, data); };
  auto jacf = [&](const Eigen::VectorXd& x) { return detail::spinham_jacobian(x, data); };

  const int m = per_dir * static_cast<int>(data.directions.size());
  const double accept_cost = opt.accept_rms_MHz * opt.accept_rms_MHz * m;

  LevMarResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (const auto& x0 : starts) {
    const LevMarResult r = levmar(resid, x0, lm, jacf);
    if (r.cost < best.cost) best = r;
    if (best.cost < accept_cost) break;
  }
  // widen the search when no start reached the noise floor
  for (int round = 0; round < 3 && best.cost >= accept_cost; ++round) {
    for (int s = 0; s < opt.multistart; ++s) {
      Eigen::VectorXd x(6);
      x << (u(rng) < 0.5 ? 1 : -1) * d0 * (0.25 + 2.5 * u(rng)), (u(rng) - 0.5) * 0.66 * d0,
          u(rng) * constants::kPi / 2.0, 2.0 + 200.0 * u(rng), 2.0 + 200.0 * u(rng),
          2.0 + 200.0 * u(rng);
      const LevMarResult r = levmar(resid, x, lm, jacf);
      if (r.cost < best.cost) best = r;
      if (best.cost < accept_cost) break;
    }
  }

  SpinHamFit fit;
  fit.params = detail::unpack(best.params);

  // Resolve the (D, E) sign gauge against the zero-field level ordering when
  // it was recorded: D < 0 puts the larger doublet gap first.
  if (!data.zero_field_gaps.empty()) {
    auto mismatch = [&](const SpinHamiltonianParams& p) {
      const auto gaps =
          detail::doublet_center_gaps(spinham::levels(p, MagneticField::zero(), data.I));
      double s = 0.0;
      for (size_t i = 0; i < gaps.size() && i < data.zero_field_gaps.size(); ++i)
        s += (gaps[i] - data.zero_field_gaps[i]) * (gaps[i] - data.zero_field_gaps[i]);
      return s;
    };
    SpinHamiltonianParams flipped = fit.params;
    flipped.D_MHz = -flipped.D_MHz;
    flipped.E_MHz = -flipped.E_MHz;
    if (mismatch(flipped) < mismatch(fit.params)) fit.params = flipped;
  }

  fit.canonical = spinham::canonicalize(fit.params);
  fit.canonical.sign_ambiguous = data.zero_field_gaps.empty();
  fit.report.parameters = best.params;
  fit.report.parameter_names = {"D_MHz", "E_MHz", "angle_rad", "g1_MHz_per_T", "g2_MHz_per_T",
                                "g3_MHz_per_T"};
  fit.report.residuals = best.residuals;
  fit.report.residual_norm = std::sqrt(best.cost);
  fit.report.covariance = best.covariance;
  fit.report.iterations = best.iterations;
  fit.report.converged = best.converged;
  fit.report.warnings.push_back(
      "signs of E and g_i are gauge: magnitudes reported, D sign per canonical convention");
  if (data.directions.size() < 20)
    fit.report.warnings.push_back("fewer than 20 directions: parameters may be unidentifiable");
  return fit;
}

/// Numerical rank of the spin-Hamiltonian Jacobian at a parameter point
/// (identifiability diagnostic).
inline int spinham_jacobian_rank(const SpinHamiltonianParams& p, const SphereData& data,
                                 double rel_tol = 1e-8) {
  Eigen::VectorXd x(6);
  x << p.D_MHz, p.E_MHz, p.angle_rad, p.g_MHz_per_T[0], p.g_MHz_per_T[1], p.g_MHz_per_T[2];
  const Eigen::MatrixXd j = detail::spinham_jacobian(x, data);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return rank;
}

/// Least-squares fit of (a1, a2, a3) to four measured zero-field splittings
/// (ground pair ascending, then excited pair ascending).
struct AiFitOptions {
  LevMarOptions lm{};
};

struct AiFit {
  HyperfineParams params;
  FitReport report;
};

inline AiFit fit_hyperfine_constants(const HyperfineWindow& ground, const HyperfineWindow& excited,
                                     const std::array<double, 4>& targets_MHz,
                                     const HyperfineParams& init, const AiFitOptions& opt = {}) {
  auto resid = [&](const Eigen::VectorXd& x) {
    HyperfineParams p;
    p.a1_MHz = x(0);
    p.a2_MHz = x(1);
    p.a3 = x(2);
    Eigen::VectorXd r(4);
    const auto g = hyperfine::zero_field_splittings(ground, p, 0);
    const auto e = hyperfine::zero_field_splittings(excited, p, 0);
    r(0) = g.splittings_MHz[0] - targets_MHz[0];
    r(1) = g.splittings_MHz[1] - targets_MHz[1];
    r(2) = e.splittings_MHz[0] - targets_MHz[2];
    r(3) = e.splittings_MHz[1] - targets_MHz[3];
    return r;
  };

  Eigen::VectorXd x0(3);
  x0 << init.a1_MHz, init.a2_MHz, init.a3;
  LevMarOptions lm = opt.lm;
  lm.scales = Eigen::VectorXd(3);
  lm.scales << std::max(std::abs(init.a1_MHz), 1.0), std::max(std::abs(init.a2_MHz), 0.1),
      std::max(std::abs(init.a3), 1e-9);

  const LevMarResult r = levmar(resid, x0, lm);
  AiFit fit;
  fit.params.a1_MHz = r.params(0);
  fit.params.a2_MHz = r.params(1);
  fit.params.a3 = r.params(2);
  fit.report.parameters = r.params;
  fit.report.parameter_names = {"a1_MHz", "a2_MHz", "a3"};
  fit.report.residuals = r.residuals;
  fit.report.residual_norm = std::sqrt(r.cost);
  fit.report.covariance = r.covariance;
  fit.report.iterations = r.iterations;
  fit.report.converged = r.converged;
  if (!r.converged)
    fit.report.warnings.push_back("a_i fit did not converge; reporting partial state");
  return fit;
}

}  // namespace spinfit
}  // namespace hyperspec

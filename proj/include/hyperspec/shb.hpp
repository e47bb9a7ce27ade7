#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hyperspec/levmar.hpp"

// Spectral hole burning: hole/antihole pattern prediction from ground and
// excited hyperfine splittings, readout-spectrum simulation, and hole-decay
// fitting.
//
// Burn model (steady state, single burn class per resonant transition):
// an ion class resonant on (g_i -> e_j) is fully pumped out of g_i; the
// displaced population ends in g_i' (i' != i) with branching probability
// S_i'j / sum_{k != i} S_kj. Every resonant (i, j) class carries the same
// weight, scaled by the degeneracy-weighted initial population of g_i and the
// burn depth. Signed amplitudes then conserve population exactly for uniform
// strengths: sum(sign * amplitude) = 0.

namespace hyperspec {

/// Ground/excited hyperfine level scheme with relative transition strengths.
struct LevelScheme {
  std::vector<double> ground_MHz;   // cumulative level energies, ascending from 0
  std::vector<double> excited_MHz;  // likewise
  Eigen::MatrixXd strengths;        // N_g x N_e, nonnegative; empty = uniform
  std::vector<double> degeneracy;   // per ground level; empty = all 2 (+-M_I doublets)

  int ng() const { return static_cast<int>(ground_MHz.size()); }
  int ne() const { return static_cast<int>(excited_MHz.size()); }

  Eigen::MatrixXd strength_matrix() const {
    if (strengths.size() == 0) return Eigen::MatrixXd::Ones(ng(), ne());
    return strengths;
  }

  std::vector<double> populations() const {
    std::vector<double> d = degeneracy.empty() ? std::vector<double>(ng(), 2.0) : degeneracy;
    double total = 0.0;
    for (double x : d) total += x;
    for (double& x : d) x /= total;
    return d;
  }

  void validate() const {
    if (ground_MHz.empty() || excited_MHz.empty())
      throw std::invalid_argument("level scheme needs at least one ground and one excited level");
    for (size_t i = 0; i + 1 < ground_MHz.size(); ++i)
      if (ground_MHz[i + 1] <= ground_MHz[i])
        throw std::invalid_argument("ground level energies must ascend");
    for (size_t i = 0; i + 1 < excited_MHz.size(); ++i)
      if (excited_MHz[i + 1] <= excited_MHz[i])
        throw std::invalid_argument("excited level energies must ascend");
    if (ground_MHz.front() != 0.0 || excited_MHz.front() != 0.0)
      throw std::invalid_argument("level energies are cumulative from 0");
    const auto s = strength_matrix();
    if (s.rows() != ng() || s.cols() != ne())
      throw std::invalid_argument("strength matrix must be N_g x N_e");
    if (s.minCoeff() < 0.0) throw std::invalid_argument("transition strengths must be >= 0");
    for (int i = 0; i < s.rows(); ++i)
      if (s.row(i).maxCoeff() == 0.0)
        throw std::invalid_argument("strength matrix has an all-zero row");
    for (int j = 0; j < s.cols(); ++j)
      if (s.col(j).maxCoeff() == 0.0)
        throw std::invalid_argument("strength matrix has an all-zero column");
  }
};

namespace shb {

enum class FeatureSign : int { kHole = -1, kAntihole = +1 };

struct HoleFeature {
  double detuning_MHz = 0.0;
  FeatureSign sign = FeatureSign::kHole;
  double amplitude = 0.0;  // relative, >= 0
};

/// Enumerates all burn/probe transition pairs. Holes sit at excited-state
/// differences, antiholes at ground differences combined with excited
/// differences; coincident contributions merge by signed sum.
inline std::vector<HoleFeature> predict_features(const LevelScheme& scheme, double depth = 1.0,
                                                 double merge_tol_MHz = 1e-6) {
  scheme.validate();
  if (depth < 0.0 || depth > 1.0) throw std::invalid_argument("burn depth must be in [0, 1]");
  const auto s = scheme.strength_matrix();
  const auto n0 = scheme.populations();
  const int ng = scheme.ng(), ne = scheme.ne();

  std::vector<std::pair<double, double>> raw;  // (detuning, signed amplitude)
  for (int i = 0; i < ng; ++i) {
    for (int j = 0; j < ne; ++j) {
      if (s(i, j) == 0.0) continue;  // not a possible burn class
      const double moved = depth * n0[i];
      // branching of the displaced population into the other ground levels
      double denom = 0.0;
      for (int k = 0; k < ng; ++k)
        if (k != i) denom += s(k, j);
      // holes: probing any transition from the depleted level i
      for (int jp = 0; jp < ne; ++jp) {
        if (s(i, jp) == 0.0) continue;
        raw.push_back({scheme.excited_MHz[jp] - scheme.excited_MHz[j], -s(i, jp) * moved});
      }
      if (denom == 0.0) continue;  // nowhere to park population: pure hole class
      // antiholes: probing transitions from the repopulated levels i'
      for (int ip = 0; ip < ng; ++ip) {
        if (ip == i) continue;
        const double gain = moved * s(ip, j) / denom;
        if (gain == 0.0) continue;
        for (int jp = 0; jp < ne; ++jp) {
          if (s(ip, jp) == 0.0) continue;
          const double det = (scheme.ground_MHz[i] - scheme.ground_MHz[ip]) +
                             (scheme.excited_MHz[jp] - scheme.excited_MHz[j]);
          raw.push_back({det, s(ip, jp) * gain});
        }
      }
    }
  }

  std::sort(raw.begin(), raw.end());
  std::vector<HoleFeature> out;
  for (size_t i = 0; i < raw.size();) {
    double det = raw[i].first, amp = raw[i].second;
    size_t j = i + 1;
    while (j < raw.size() && raw[j].first - raw[i].first <= merge_tol_MHz) {
      amp += raw[j].second;
      ++j;
    }
    if (std::abs(amp) > 1e-12) {
      HoleFeature f;
      f.detuning_MHz = det;
      f.sign = amp < 0 ? FeatureSign::kHole : FeatureSign::kAntihole;
      f.amplitude = std::abs(amp);
      out.push_back(f);
    }
    i = j;
  }
  return out;
}

/// Signed feature sum under the documented conservation rule (exactly zero
/// for uniform strengths).
inline double signed_amplitude_sum(const std::vector<HoleFeature>& features) {
  double s = 0.0;
  for (const auto& f : features) s += static_cast<int>(f.sign) * f.amplitude;
  return s;
}

struct BurnParams {
  double width_MHz = 0.5;  // power-broadened hole width (Lorentzian FWHM)
  double depth = 0.5;      // main-hole depth, 0..1
};

struct GridSpec {
  double min_MHz = -20.0;
  double max_MHz = 20.0;
  double step_MHz = 0.01;
};

/// Absorption-change spectrum: holes negative, antiholes positive.
struct HoleSpectrum {
  std::vector<HoleFeature> features;
  std::vector<double> detuning_MHz;
  std::vector<double> delta_absorption;
  double width_MHz = 0.0;
};

/// Sum of signed Lorentzians at the predicted features, normalized so the
/// central-hole depth equals the burn depth.
inline HoleSpectrum simulate_spectrum(const LevelScheme& scheme, const BurnParams& burn,
                                      const GridSpec& grid) {
  if (grid.step_MHz <= 0.0 || grid.max_MHz <= grid.min_MHz)
    throw std::invalid_argument("bad spectrum grid");
  if (grid.step_MHz > burn.width_MHz / 5.0)
    throw std::invalid_argument("grid step too coarse: must be <= width/5");

  HoleSpectrum out;
  out.width_MHz = burn.width_MHz;
  out.features = predict_features(scheme, burn.depth);

  const double hw = 0.5 * burn.width_MHz;
  auto lorentz = [&](double x) { return hw * hw / (x * x + hw * hw); };

  double at_zero = 0.0;
  for (const auto& f : out.features)
    at_zero += static_cast<int>(f.sign) * f.amplitude * lorentz(-f.detuning_MHz);
  const double scale = (at_zero < 0.0 && burn.depth > 0.0) ? burn.depth / -at_zero : 0.0;

  const int n = static_cast<int>(std::floor((grid.max_MHz - grid.min_MHz) / grid.step_MHz)) + 1;
  out.detuning_MHz.resize(n);
  out.delta_absorption.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    const double nu = grid.min_MHz + k * grid.step_MHz;
    out.detuning_MHz[k] = nu;
    double v = 0.0;
    for (const auto& f : out.features)
      v += static_cast<int>(f.sign) * f.amplitude * lorentz(nu - f.detuning_MHz);
    out.delta_absorption[k] = scale * v;
  }
  return out;
}

/// Single-exponential hole-decay fit A exp(-t/T1); 1-sigma uncertainty from
/// the Jacobian covariance.
struct HoleDecayFit {
  double t1_s = 0.0;
  double t1_sigma_s = 0.0;
  double amplitude = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
};

inline HoleDecayFit fit_hole_decay(const std::vector<double>& t_s,
                                   const std::vector<double>& area) {
  if (t_s.size() != area.size()) throw std::invalid_argument("mismatched decay series lengths");
  if (t_s.size() < 4) throw std::invalid_argument("hole decay fit needs at least 4 points");
  for (size_t i = 0; i + 1 < t_s.size(); ++i)
    if (t_s[i + 1] <= t_s[i]) throw std::invalid_argument("waiting times must ascend");

  // log-linear initialization (positive samples only)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t i = 0; i < t_s.size(); ++i) {
    if (area[i] <= 0.0) continue;
    const double y = std::log(area[i]);
    sx += t_s[i];
    sy += y;
    sxx += t_s[i] * t_s[i];
    sxy += t_s[i] * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("not enough positive samples for a decay fit");
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (slope >= 0.0) throw std::invalid_argument("series does not decay");
  const double a0 = std::exp((sy - slope * sx) / m);

  auto resid = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(t_s.size());
    for (size_t i = 0; i < t_s.size(); ++i)
      r(i) = x(0) * std::exp(-t_s[i] / x(1)) - area[i];
    return r;
  };
  Eigen::VectorXd x0(2);
  x0 << a0, -1.0 / slope;
  LevMarOptions opt;
  opt.scales = Eigen::VectorXd(2);
  opt.scales << std::abs(a0), std::abs(1.0 / slope);
  const LevMarResult r = levmar(resid, x0, opt);

  HoleDecayFit fit;
  fit.amplitude = r.params(0);
  fit.t1_s = r.params(1);
  fit.t1_sigma_s = std::sqrt(std::max(0.0, r.covariance(1, 1)));
  fit.rms_residual = std::sqrt(r.cost / t_s.size());
  fit.iterations = r.iterations;
  return fit;
}

}  // namespace shb
}  // namespace hyperspec

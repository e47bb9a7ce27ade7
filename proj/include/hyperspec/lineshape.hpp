#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperspec/constants.hpp"
#include "hyperspec/levmar.hpp"

// Coherence and linewidth fitting: two-pulse echo decays A exp(-2 tau / T2),
// modulated spin-echo decays A exp(-2 tau / T2) [1 + m cos^2(omega tau / 2)],
// and Lorentzian/Gaussian line profiles. All fits run on linear amplitudes
// with optional per-point weights.

namespace hyperspec {

/// (delay, amplitude) echo series. Delays in seconds, strictly increasing.
struct DecaySeries {
  std::vector<double> tau_s;
  std::vector<double> amplitude;
  std::vector<double> sigma;  // optional 1-sigma weights

  void validate(size_t min_points) const {
    if (tau_s.size() != amplitude.size()) throw std::invalid_argument("mismatched series lengths");
    if (!sigma.empty() && sigma.size() != tau_s.size())
      throw std::invalid_argument("mismatched uncertainty length");
    if (tau_s.size() < min_points)
      throw std::invalid_argument("series too short: need at least " + std::to_string(min_points) +
                                  " points");
    for (size_t i = 0; i + 1 < tau_s.size(); ++i)
      if (tau_s[i + 1] <= tau_s[i]) throw std::invalid_argument("delays must strictly increase");
    for (double a : amplitude)
      if (!std::isfinite(a)) throw std::invalid_argument("non-finite amplitude");
  }

  double span() const { return tau_s.back() - tau_s.front(); }
  double min_spacing() const {
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < tau_s.size(); ++i) d = std::min(d, tau_s[i + 1] - tau_s[i]);
    return d;
  }
};

namespace lineshape {

namespace detail {

/// Log-linear estimate of (amplitude, decay time) for y = A exp(-2 tau / T2).
inline std::pair<double, double> loglin_init(const DecaySeries& s) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t i = 0; i < s.tau_s.size(); ++i) {
    if (s.amplitude[i] <= 0.0) continue;
    const double y = std::log(s.amplitude[i]);
    sx += s.tau_s[i];
    sy += y;
    sxx += s.tau_s[i] * s.tau_s[i];
    sxy += s.tau_s[i] * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("not enough positive samples");
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (slope >= 0.0) throw std::invalid_argument("series does not decay");
  return {std::exp((sy - slope * sx) / m), -2.0 / slope};
}

inline Eigen::VectorXd weighted(const DecaySeries& s, Eigen::VectorXd r) {
  if (!s.sigma.empty())
    for (int i = 0; i < r.size(); ++i) r(i) /= s.sigma[i];
  return r;
}

}  // namespace detail

/// Two-pulse echo decay fit: A exp(-2 tau / T2), homogeneous linewidth
/// Gamma_h = 1 / (pi T2) with propagated uncertainty.
struct EchoFit {
  double t2_s = 0.0;
  double t2_sigma_s = 0.0;
  double amplitude = 0.0;
  double gamma_h_Hz = 0.0;
  double gamma_h_sigma_Hz = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
};

inline EchoFit fit_echo_decay(const DecaySeries& s) {
  s.validate(4);
  const auto [a0, t20] = detail::loglin_init(s);

  auto resid = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(s.tau_s.size());
    for (size_t i = 0; i < s.tau_s.size(); ++i)
      r(i) = x(0) * std::exp(-2.0 * s.tau_s[i] / x(1)) - s.amplitude[i];
    return detail::weighted(s, std::move(r));
  };
  Eigen::VectorXd x0(2);
  x0 << a0, t20;
  LevMarOptions opt;
  opt.scales = Eigen::VectorXd(2);
  opt.scales << std::abs(a0), std::abs(t20);
  const LevMarResult r = levmar(resid, x0, opt);

  EchoFit fit;
  fit.amplitude = r.params(0);
  fit.t2_s = r.params(1);
  fit.t2_sigma_s = std::sqrt(std::max(0.0, r.covariance(1, 1)));
  if (fit.t2_s <= 0.0) throw std::runtime_error("echo fit collapsed to a non-decaying solution");
  if (fit.t2_sigma_s > std::abs(fit.t2_s))
    throw std::runtime_error("T2 uncertainty exceeds 100 %: data do not constrain the decay");
  fit.gamma_h_Hz = 1.0 / (constants::kPi * fit.t2_s);
  fit.gamma_h_sigma_Hz = fit.t2_sigma_s / (constants::kPi * fit.t2_s * fit.t2_s);
  fit.rms_residual = std::sqrt(r.cost / s.tau_s.size());
  fit.iterations = r.iterations;
  return fit;
}

/// Modulated spin-echo fit: A exp(-2 tau / T2) [1 + m cos^2(omega tau / 2)].
struct ModulatedEchoFit {
  double t2_s = 0.0;
  double t2_sigma_s = 0.0;
  double amplitude = 0.0;
  double m = 0.0;
  double omega_rad_per_s = 0.0;  // modulation angular frequency
  double omega_sigma = 0.0;
  bool omega_identifiable = true;
  double rms_residual = 0.0;
};

struct ModulatedInit {
  double t2_s = 0.0;
  double m = 0.5;
  double omega_rad_per_s = 0.0;  // 0 = scan the multi-start grid
};

inline ModulatedEchoFit fit_modulated_echo(const DecaySeries& s, const ModulatedInit& init = {}) {
  s.validate(10);
  const auto [a0_raw, t20_raw] = detail::loglin_init(s);
  const double t20 = init.t2_s > 0 ? init.t2_s : t20_raw;
  const double m0 = std::clamp(init.m, 0.0, 2.0);
  const double a0 = a0_raw / (1.0 + 0.5 * m0);

  auto resid = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(s.tau_s.size());
    for (size_t i = 0; i < s.tau_s.size(); ++i) {
      const double c = std::cos(0.5 * x(3) * s.tau_s[i]);
      r(i) = x(0) * std::exp(-2.0 * s.tau_s[i] / x(1)) * (1.0 + x(2) * c * c) - s.amplitude[i];
    }
    return detail::weighted(s, std::move(r));
  };

  // omega multi-start: 20 log-spaced frequencies between 1/span and
  // 1/(2 min spacing); the cos^2 objective is multimodal in omega.
  std::vector<double> omega_grid;
  if (init.omega_rad_per_s > 0) {
    omega_grid.push_back(init.omega_rad_per_s);
  } else {
    const double f_lo = 1.0 / s.span();
    const double f_hi = 1.0 / (2.0 * s.min_spacing());
    for (int k = 0; k < 20; ++k)
      omega_grid.push_back(2.0 * constants::kPi * f_lo *
                           std::pow(f_hi / f_lo, k / 19.0));
  }

  LevMarOptions opt;
  opt.scales = Eigen::VectorXd(4);
  opt.scales << std::abs(a0), std::abs(t20), 0.5, 2.0 * constants::kPi / s.span();

  LevMarResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (double w : omega_grid) {
    Eigen::VectorXd x0(4);
    x0 << a0, t20, std::max(m0, 0.1), w;
    const LevMarResult r = levmar(resid, x0, opt);
    if (r.cost < best.cost) best = r;
  }

  // Equispaced delays make omega and 2 pi / dtau -+ omega exact aliases; fold
  // the winner into the principal band and keep the smallest equivalent.
  {
    const double ws = 2.0 * constants::kPi / s.min_spacing();
    const double w_raw = std::abs(best.params(3));
    const double w_mod = std::fmod(w_raw, ws);
    for (double cand : {w_mod, ws - w_mod}) {
      if (cand <= 0.0 || cand >= w_raw - 1e-12) continue;
      Eigen::VectorXd x0 = best.params;
      x0(3) = cand;
      const LevMarResult r = levmar(resid, x0, opt);
      const bool better = r.cost < best.cost * (1.0 - 1e-9);
      const bool tie_smaller =
          r.cost < best.cost * (1.0 + 1e-9) && std::abs(r.params(3)) < std::abs(best.params(3));
      if (better || tie_smaller) best = r;
    }
  }

  ModulatedEchoFit fit;
  fit.amplitude = best.params(0);
  fit.t2_s = best.params(1);
  fit.t2_sigma_s = std::sqrt(std::max(0.0, best.covariance(1, 1)));
  fit.m = best.params(2);
  fit.omega_rad_per_s = std::abs(best.params(3));
  fit.omega_sigma = std::sqrt(std::max(0.0, best.covariance(3, 3)));
  fit.rms_residual = std::sqrt(best.cost / s.tau_s.size());

  // omega is unidentifiable when the window spans less than one period or the
  // modulation amplitude vanishes: fall back to the plain exponential
  if (fit.omega_rad_per_s * s.span() < 2.0 * constants::kPi || std::abs(fit.m) < 0.01) {
    fit.omega_identifiable = false;
    const EchoFit plain = fit_echo_decay(s);
    fit.t2_s = plain.t2_s;
    fit.t2_sigma_s = plain.t2_sigma_s;
    fit.amplitude = plain.amplitude;
    fit.m = 0.0;
    fit.omega_rad_per_s = 0.0;
    fit.omega_sigma = 0.0;
    fit.rms_residual = plain.rms_residual;
  }
  return fit;
}

/// Line-profile fit with Lorentzian/Gaussian model selection.
struct LineProfile {
  std::vector<double> detuning_Hz;
  std::vector<double> amplitude;

  void validate() const {
    if (detuning_Hz.size() != amplitude.size())
      throw std::invalid_argument("mismatched profile lengths");
    if (detuning_Hz.size() < 5) throw std::invalid_argument("line profile needs >= 5 points");
    for (size_t i = 0; i + 1 < detuning_Hz.size(); ++i)
      if (detuning_Hz[i + 1] <= detuning_Hz[i])
        throw std::invalid_argument("detunings must strictly increase");
  }
};

struct LineFit {
  double center_Hz = 0.0;
  double fwhm_Hz = 0.0;
  double fwhm_sigma_Hz = 0.0;
  double amplitude = 0.0;
  double baseline = 0.0;
  std::string kind;            // "lorentzian" or "gaussian"
  double rss_lorentzian = 0.0; // model-selection scores
  double rss_gaussian = 0.0;
};

inline LineFit fit_line(const LineProfile& p) {
  p.validate();
  const auto imax =
      std::max_element(p.amplitude.begin(), p.amplitude.end()) - p.amplitude.begin();
  if (imax == 0 || imax == static_cast<long>(p.amplitude.size()) - 1)
    throw std::invalid_argument("peak sits at the range edge: cannot fit a line profile");

  const double ymax = p.amplitude[imax];
  const double ymin = *std::min_element(p.amplitude.begin(), p.amplitude.end());
  const double c0 = p.detuning_Hz[imax];
  // half-max crossing estimate of the width
  const double half = ymin + 0.5 * (ymax - ymin);
  double lo = p.detuning_Hz.front(), hi = p.detuning_Hz.back();
  for (long i = imax; i >= 0; --i)
    if (p.amplitude[i] < half) {
      lo = p.detuning_Hz[i];
      break;
    }
  for (size_t i = imax; i < p.amplitude.size(); ++i)
    if (p.amplitude[i] < half) {
      hi = p.detuning_Hz[i];
      break;
    }
  const double w0 = std::max(hi - lo, 2.0 * (p.detuning_Hz[1] - p.detuning_Hz[0]));

  auto run = [&](bool lorentzian) {
    auto resid = [&, lorentzian](const Eigen::VectorXd& x) {
      Eigen::VectorXd r(p.detuning_Hz.size());
      for (size_t i = 0; i < p.detuning_Hz.size(); ++i) {
        const double d = p.detuning_Hz[i] - x(1);
        double v;
        if (lorentzian) {
          const double hw = 0.5 * x(2);
          v = x(0) * hw * hw / (d * d + hw * hw);
        } else {
          const double sg = x(2) / (2.0 * std::sqrt(2.0 * std::log(2.0)));
          v = x(0) * std::exp(-0.5 * d * d / (sg * sg));
        }
        r(i) = v + x(3) - p.amplitude[i];
      }
      return r;
    };
    Eigen::VectorXd x0(4);
    x0 << ymax - ymin, c0, w0, ymin;
    LevMarOptions opt;
    opt.scales = Eigen::VectorXd(4);
    opt.scales << std::abs(ymax - ymin) + 1e-300, w0, w0, std::abs(ymax) + 1e-300;
    return levmar(resid, x0, opt);
  };

  const LevMarResult rl = run(true);
  const LevMarResult rg = run(false);
  const bool lorentzian_wins = rl.cost <= rg.cost;
  const LevMarResult& r = lorentzian_wins ? rl : rg;

  LineFit fit;
  fit.amplitude = r.params(0);
  fit.center_Hz = r.params(1);
  fit.fwhm_Hz = std::abs(r.params(2));
  fit.fwhm_sigma_Hz = std::sqrt(std::max(0.0, r.covariance(2, 2)));
  fit.baseline = r.params(3);
  fit.kind = lorentzian_wins ? "lorentzian" : "gaussian";
  fit.rss_lorentzian = rl.cost;
  fit.rss_gaussian = rg.cost;
  return fit;
}

}  // namespace lineshape
}  // namespace hyperspec

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hyperspec/lineshape.hpp"

using namespace hyperspec;
using namespace hyperspec::lineshape;

namespace {

DecaySeries echo_series(double t2_s, double a, int n, double tmax_s, double noise_frac = 0.0,
                        unsigned seed = 0) {
  DecaySeries s;
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_frac);
  for (int i = 0; i < n; ++i) {
    const double tau = tmax_s * (i + 1) / n;
    s.tau_s.push_back(tau);
    double y = a * std::exp(-2.0 * tau / t2_s);
    if (noise_frac > 0) y *= 1.0 + noise(rng);
    s.amplitude.push_back(y);
  }
  return s;
}

}  // namespace

TEST_CASE("echo decay: exact recovery and Gamma_h = 1/(pi T2)") {
  const auto s = echo_series(1e-6, 2.5, 12, 3e-6);
  const auto fit = fit_echo_decay(s);
  CHECK_THAT(fit.t2_s, Catch::Matchers::WithinRel(1e-6, 1e-9));
  CHECK_THAT(fit.amplitude, Catch::Matchers::WithinRel(2.5, 1e-9));
  CHECK_THAT(fit.gamma_h_Hz * constants::kPi * fit.t2_s, Catch::Matchers::WithinRel(1.0, 1e-15));
}

TEST_CASE("homogeneous linewidths land inside the reported windows") {
  // T2 = 3.0 us -> 106.1 kHz, inside 108 +- 21 kHz
  {
    const auto fit = fit_echo_decay(echo_series(3.0e-6, 1.0, 14, 8e-6, 0.02, 3));
    CHECK_THAT(fit.gamma_h_Hz, Catch::Matchers::WithinAbs(106.1e3, 2e3));
    CHECK(std::abs(fit.gamma_h_Hz - 108e3) < 21e3);
  }
  // T2 = 4.5 us -> 70.7 kHz, inside 72 +- 16 kHz
  {
    const auto fit = fit_echo_decay(echo_series(4.5e-6, 1.0, 14, 12e-6, 0.02, 4));
    CHECK_THAT(fit.gamma_h_Hz, Catch::Matchers::WithinAbs(70.7e3, 1.5e3));
    CHECK(std::abs(fit.gamma_h_Hz - 72e3) < 16e3);
  }
}

TEST_CASE("echo fit error paths") {
  DecaySeries rising;
  for (int i = 0; i < 6; ++i) {
    rising.tau_s.push_back(i + 1.0);
    rising.amplitude.push_back(std::exp(0.3 * i));
  }
  CHECK_THROWS_AS(fit_echo_decay(rising), std::invalid_argument);
  DecaySeries three = echo_series(1.0, 1.0, 3, 2.0);
  CHECK_THROWS_AS(fit_echo_decay(three), std::invalid_argument);
}

TEST_CASE("scale and delay-unit invariance") {
  const auto base = echo_series(2.0e-6, 1.0, 12, 6e-6, 0.05, 7);
  const auto f0 = fit_echo_decay(base);

  DecaySeries scaled = base;
  for (double& a : scaled.amplitude) a *= 37.0;
  const auto f1 = fit_echo_decay(scaled);
  CHECK_THAT(f1.t2_s, Catch::Matchers::WithinRel(f0.t2_s, 1e-9));
  CHECK_THAT(f1.amplitude, Catch::Matchers::WithinRel(37.0 * f0.amplitude, 1e-9));

  // delays expressed in microseconds instead of seconds
  DecaySeries micro = base;
  for (double& t : micro.tau_s) t *= 1e6;
  const auto f2 = fit_echo_decay(micro);
  CHECK_THAT(f2.t2_s * 1e-6, Catch::Matchers::WithinRel(f0.t2_s, 1e-9));
}

TEST_CASE("modulated echo: m = 0 reduces to the plain exponential") {
  const auto s = echo_series(880e-6, 1.0, 24, 2.5e-3, 0.0);
  const auto plain = fit_echo_decay(s);
  const auto mod = fit_modulated_echo(s);
  CHECK_THAT(mod.t2_s, Catch::Matchers::WithinRel(plain.t2_s, 1e-3));
}

TEST_CASE("modulated echo: synthetic round-trip with noise") {
  // T2 = 880 us, m = 0.5, omega/2pi = 2.5 kHz, 2 % noise
  std::mt19937 rng(11);
  std::normal_distribution<double> noise(0.0, 0.02);
  const double t2 = 880e-6, m = 0.5, omega = 2.0 * constants::kPi * 2500.0;
  int ok = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    DecaySeries s;
    for (int i = 0; i < 40; ++i) {
      const double tau = 2.0e-3 * (i + 1) / 40.0;
      const double c = std::cos(0.5 * omega * tau);
      s.tau_s.push_back(tau);
      s.amplitude.push_back(std::exp(-2.0 * tau / t2) * (1.0 + m * c * c) * (1.0 + noise(rng)));
    }
    const auto fit = fit_modulated_echo(s);
    if (!fit.omega_identifiable) continue;
    const bool good = std::abs(fit.t2_s - t2) / t2 < 0.05 &&
                      std::abs(fit.omega_rad_per_s - omega) / omega < 0.05 &&
                      std::abs(fit.m - m) / m < 0.25;
    if (good) ++ok;
  }
  CHECK(ok >= 19);
}

TEST_CASE("modulated echo: unidentifiable omega falls back to m = 0") {
  // window shorter than one modulation period
  DecaySeries s;
  const double t2 = 880e-6, omega = 2.0 * constants::kPi * 100.0;  // 10 ms period
  for (int i = 0; i < 12; ++i) {
    const double tau = 1.0e-3 * (i + 1) / 12.0;
    const double c = std::cos(0.5 * omega * tau);
    s.tau_s.push_back(tau);
    s.amplitude.push_back(std::exp(-2.0 * tau / t2) * (1.0 + 0.3 * c * c));
  }
  const auto fit = fit_modulated_echo(s);
  CHECK_FALSE(fit.omega_identifiable);
  CHECK(fit.m == 0.0);
  CHECK(fit.t2_s > 0.0);
}

TEST_CASE("line fit: Lorentzian with 5 % noise recovered within 3 %") {
  std::mt19937 rng(13);
  std::normal_distribution<double> noise(0.0, 0.05);
  LineProfile p;
  const double c = 5.99e6, fwhm = 29e3;
  for (int i = 0; i < 161; ++i) {
    const double x = c + (i - 80) * 1.5e3;
    const double hw = 0.5 * fwhm;
    p.detuning_Hz.push_back(x);
    p.amplitude.push_back(hw * hw / ((x - c) * (x - c) + hw * hw) + 0.03 * noise(rng));
  }
  const auto fit = fit_line(p);
  CHECK(fit.kind == "lorentzian");
  CHECK_THAT(fit.center_Hz, Catch::Matchers::WithinRel(c, 1e-3));
  CHECK_THAT(fit.fwhm_Hz, Catch::Matchers::WithinRel(fwhm, 0.03));
}

TEST_CASE("line fit: model selection distinguishes Gaussian data") {
  LineProfile p;
  const double fwhm = 9e9;
  const double sg = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  for (int i = 0; i < 101; ++i) {
    const double x = (i - 50) * 0.4e9;
    p.detuning_Hz.push_back(x);
    p.amplitude.push_back(std::exp(-0.5 * x * x / (sg * sg)));
  }
  const auto fit = fit_line(p);
  CHECK(fit.kind == "gaussian");
  CHECK_THAT(fit.fwhm_Hz, Catch::Matchers::WithinRel(fwhm, 1e-6));
  CHECK(fit.rss_gaussian < fit.rss_lorentzian);
}

TEST_CASE("line fit: 9 GHz Lorentzian profile preferred over Gaussian") {
  LineProfile p;
  const double fwhm = 9e9, hw = 0.5 * fwhm;
  for (int i = 0; i < 101; ++i) {
    const double x = (i - 50) * 0.5e9;
    p.detuning_Hz.push_back(x);
    p.amplitude.push_back(hw * hw / (x * x + hw * hw));
  }
  const auto fit = fit_line(p);
  CHECK(fit.kind == "lorentzian");
  CHECK_THAT(fit.fwhm_Hz, Catch::Matchers::WithinRel(9e9, 1e-6));
}

TEST_CASE("line fit: peak at range edge is rejected") {
  LineProfile p;
  for (int i = 0; i < 10; ++i) {
    p.detuning_Hz.push_back(i);
    p.amplitude.push_back(10.0 - i);
  }
  CHECK_THROWS_AS(fit_line(p), std::invalid_argument);
}

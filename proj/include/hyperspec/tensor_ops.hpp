#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hyperspec/f2_basis.hpp"
#include "hyperspec/half_int.hpp"
#include "hyperspec/wigner.hpp"

// Matrix elements of one-body tensor operators on the f^2 |SLJM> basis.
// All reduced matrix elements follow the convention stated in wigner.hpp.
// Two-electron reduced elements come from 6-j recoupling of the coupled
// |(ll)L>, |(ss)S> pair states; for equivalent electrons the antisymmetric
// states are the coupled states themselves (L+S even).

namespace hyperspec::f2 {

namespace detail {

inline double hi_sqrt_dim(HalfInt j) { return std::sqrt(j.twice + 1.0); }

/// <(a b) C || T^k(1) || (a' b) C'> / <a||t^k||a'> (Edmonds 7.1.5 layout).
inline double coupled_rme_part1(HalfInt a, HalfInt b, HalfInt C, HalfInt ap, HalfInt Cp, HalfInt k) {
  const double sixj = wigner6j(a, C, b, Cp, ap, k);
  if (sixj == 0.0) return 0.0;
  const int phase = parity_phase(ap + b + C + k);
  return phase * hi_sqrt_dim(C) * hi_sqrt_dim(Cp) * sixj;
}

/// <(a b) C || T^k(2) || (a b') C'> / <b||t^k||b'>.
inline double coupled_rme_part2(HalfInt a, HalfInt b, HalfInt C, HalfInt bp, HalfInt Cp, HalfInt k) {
  const double sixj = wigner6j(b, C, a, Cp, bp, k);
  if (sixj == 0.0) return 0.0;
  const int phase = parity_phase(a + bp + Cp + k);
  return phase * hi_sqrt_dim(C) * hi_sqrt_dim(Cp) * sixj;
}

inline const HalfInt kHalf = HalfInt(1);
inline const HalfInt kL3 = HalfInt::from_int(kOrbitalL);

/// Per-particle orbital reduced element <(ll)L||t^k(i)||(ll)L'> for a unit
/// tensor (inner reduced element 1).
inline double orbital_rme(int particle, int L, int Lp, int k) {
  const HalfInt hL = HalfInt::from_int(L), hLp = HalfInt::from_int(Lp), hk = HalfInt::from_int(k);
  return particle == 1 ? coupled_rme_part1(kL3, kL3, hL, kL3, hLp, hk)
                       : coupled_rme_part2(kL3, kL3, hL, kL3, hLp, hk);
}

/// Per-particle spin reduced element <(ss)S||s^1(i)||(ss)S'> with
/// <1/2||s||1/2> = sqrt(3/2).
inline double spin_rme(int particle, HalfInt S, HalfInt Sp) {
  const HalfInt one = HalfInt::from_int(1);
  const double inner = std::sqrt(1.5);
  return inner * (particle == 1 ? coupled_rme_part1(kHalf, kHalf, S, kHalf, Sp, one)
                                : coupled_rme_part2(kHalf, kHalf, S, kHalf, Sp, one));
}

/// <l||C^k||l> for l=3.
inline double single_Ck_rme(int k) {
  const HalfInt l = kL3, hk = HalfInt::from_int(k);
  const int phase = (kOrbitalL % 2 == 0) ? 1 : -1;
  return phase * (2 * kOrbitalL + 1) * wigner3j(l, hk, l, HalfInt(0), HalfInt(0), HalfInt(0));
}

}  // namespace detail

/// Two-electron reduced matrix element <f2 SL || U^(k) || f2 S'L'> of the
/// summed unit tensor U^k = u^k(1) + u^k(2). Zero when S != S'.
inline double reduced_Uk(const TermLabel& bra, const TermLabel& ket, int k) {
  if (k < 0 || k > 6) throw std::invalid_argument("reduced_Uk: k out of range 0..6");
  term_index(bra);
  term_index(ket);
  if (bra.S != ket.S) return 0.0;
  return detail::orbital_rme(1, bra.L, ket.L, k) + detail::orbital_rme(2, bra.L, ket.L, k);
}

namespace ops {

using Matrix = Eigen::MatrixXd;

namespace detail {

using hyperspec::f2::detail::orbital_rme;
using hyperspec::f2::detail::spin_rme;

/// Wigner-Eckart factor (-1)^(j-m) 3j(j k j'; -m q m').
inline double we_factor(HalfInt j, HalfInt m, int k, int q, HalfInt jp, HalfInt mp) {
  const double tj = wigner3j(j, HalfInt::from_int(k), jp, -m, HalfInt::from_int(q), mp);
  if (tj == 0.0) return 0.0;
  return parity_phase(j - m) * tj;
}

/// Product-basis matrix element of Sum_i [X^kappa(i) (x) Y^k(i)]^K_Q where X acts in
/// spin space (unit inner rme handled by caller through rs values) and Y in
/// orbital space. rs[i], ru[i] are per-particle reduced elements.
struct DoubleTensorSpec {
  int kappa;  // spin rank
  int k;      // orbital rank
  int K;      // coupled rank
  int Q;      // coupled component
};

inline double product_me_double(const DoubleTensorSpec& spec, const TermLabel& tb, HalfInt MSb,
                                HalfInt MLb, const TermLabel& tk, HalfInt MSk, HalfInt MLk) {
  const HalfInt Sb = tb.S, Sk = tk.S;
  const HalfInt Lb = HalfInt::from_int(tb.L), Lk = HalfInt::from_int(tk.L);
  double d = 0.0;
  for (int p = 1; p <= 2; ++p)
    d += spin_rme(p, Sb, Sk) * orbital_rme(p, tb.L, tk.L, spec.k);
  if (d == 0.0) return 0.0;
  double sum = 0.0;
  for (int pi = -spec.kappa; pi <= spec.kappa; ++pi) {
    const int q = spec.Q - pi;
    if (std::abs(q) > spec.k) continue;
    const double cg = clebsch_gordan(HalfInt::from_int(spec.kappa), HalfInt::from_int(pi),
                                     HalfInt::from_int(spec.k), HalfInt::from_int(q),
                                     HalfInt::from_int(spec.K), HalfInt::from_int(spec.Q));
    if (cg == 0.0) continue;
    const double ws = we_factor(Sb, MSb, spec.kappa, pi, Sk, MSk);
    if (ws == 0.0) continue;
    const double wl = we_factor(Lb, MLb, spec.k, q, Lk, MLk);
    if (wl == 0.0) continue;
    sum += cg * ws * wl;
  }
  return sum * d;
}

/// Assembles a 91x91 matrix from a product-basis matrix element functor.
template <typename Fn>
Matrix assemble(Fn&& me) {
  const auto& b = basis();
  const int n = static_cast<int>(b.size());
  Matrix out = Matrix::Zero(n, n);
  std::vector<std::vector<ProductComponent>> decomp(n);
  for (int i = 0; i < n; ++i) decomp[i] = product_decomposition(b[i]);
  for (int r = 0; r < n; ++r) {
    const TermLabel& tr = terms()[b[r].term];
    for (int c = 0; c < n; ++c) {
      const TermLabel& tc = terms()[b[c].term];
      double v = 0.0;
      for (const auto& pr : decomp[r])
        for (const auto& pc : decomp[c]) {
          const double m = me(tr, pr.MS, pr.ML, tc, pc.MS, pc.ML);
          if (m != 0.0) v += pr.coeff * pc.coeff * m;
        }
      out(r, c) = v;
    }
  }
  return out;
}

}  // namespace detail

/// Summed unit tensor component Sum_i u^k_q(i), 91x91.
inline const Matrix& unit_tensor(int k, int q) {
  thread_local std::map<std::pair<int, int>, Matrix> cache;
  auto it = cache.find({k, q});
  if (it != cache.end()) return it->second;
  Matrix m = detail::assemble([&](const TermLabel& tb, HalfInt MSb, HalfInt MLb,
                                  const TermLabel& tk, HalfInt MSk, HalfInt MLk) -> double {
    if (tb.S != tk.S || MSb != MSk) return 0.0;
    const double red = reduced_Uk(tb, tk, k);
    if (red == 0.0) return 0.0;
    return detail::we_factor(HalfInt::from_int(tb.L), MLb, k, q, HalfInt::from_int(tk.L), MLk) * red;
  });
  return cache.emplace(std::make_pair(k, q), std::move(m)).first->second;
}

/// Spherical-harmonic tensor Sum_i C^k_q(i) = <l||C^k||l> U^k_q.
inline Matrix spherical_Ck(int k, int q) {
  return f2::detail::single_Ck_rme(k) * unit_tensor(k, q);
}

/// Total orbital angular momentum spherical component L_q (q = -1, 0, +1).
inline const Matrix& orbital_L(int q) {
  thread_local std::map<int, Matrix> cache;
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  Matrix m = detail::assemble([&](const TermLabel& tb, HalfInt MSb, HalfInt MLb,
                                  const TermLabel& tk, HalfInt MSk, HalfInt MLk) -> double {
    if (tb.S != tk.S || MSb != MSk || tb.L != tk.L) return 0.0;
    const double red = std::sqrt(tb.L * (tb.L + 1.0) * (2 * tb.L + 1.0));
    return detail::we_factor(HalfInt::from_int(tb.L), MLb, 1, q, HalfInt::from_int(tk.L), MLk) * red;
  });
  return cache.emplace(q, std::move(m)).first->second;
}

/// Total spin spherical component S_q.
inline const Matrix& spin_S(int q) {
  thread_local std::map<int, Matrix> cache;
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  Matrix m = detail::assemble([&](const TermLabel& tb, HalfInt MSb, HalfInt MLb,
                                  const TermLabel& tk, HalfInt MSk, HalfInt MLk) -> double {
    if (tb.S != tk.S || tb.L != tk.L || MLb != MLk) return 0.0;
    const double s = tb.S.value();
    const double red = std::sqrt(s * (s + 1.0) * (2 * s + 1.0));
    return detail::we_factor(tb.S, MSb, 1, q, tk.S, MSk) * red;
  });
  return cache.emplace(q, std::move(m)).first->second;
}

/// Per-particle coupled double tensor Sum_i [s^1(i) (x) C^2(i)]^1_q.
inline const Matrix& spin_C2_rank1(int q) {
  thread_local std::map<int, Matrix> cache;
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  const double ck = f2::detail::single_Ck_rme(2);
  Matrix m = detail::assemble([&](const TermLabel& tb, HalfInt MSb, HalfInt MLb,
                                  const TermLabel& tk, HalfInt MSk, HalfInt MLk) -> double {
    return ck * detail::product_me_double({1, 2, 1, q}, tb, MSb, MLb, tk, MSk, MLk);
  });
  return cache.emplace(q, std::move(m)).first->second;
}

/// Electronic magnetic-hyperfine rank-1 tensor N_q = L_q - sqrt(10) Sum_i [s^1 (x) C^2]^1_q.
inline Matrix hyperfine_N(int q) {
  return orbital_L(q) - std::sqrt(10.0) * spin_C2_rank1(q);
}

/// Spin-orbit operator Sum_i s(i).l(i) (dimensionless; multiply by zeta).
inline const Matrix& spin_orbit() {
  thread_local Matrix cache;
  thread_local bool built = false;
  if (built) return cache;
  const double lred = std::sqrt(1.0 * kOrbitalL * (kOrbitalL + 1) * (2 * kOrbitalL + 1));
  // s(i).l(i) = -sqrt(3) [s^1(i) (x) l^1(i)]^0_0
  cache = detail::assemble([&](const TermLabel& tb, HalfInt MSb, HalfInt MLb, const TermLabel& tk,
                               HalfInt MSk, HalfInt MLk) -> double {
    return -std::sqrt(3.0) * lred *
           detail::product_me_double({1, 1, 0, 0}, tb, MSb, MLb, tk, MSk, MLk);
  });
  built = true;
  return cache;
}

/// Cartesian components {x, y, z} of a rank-1 spherical operator family.
template <typename SphericalFn>
std::array<Eigen::MatrixXcd, 3> cartesian_vector(SphericalFn&& sph) {
  using namespace std::complex_literals;
  const Eigen::MatrixXd m_m1 = sph(-1), m_0 = sph(0), m_p1 = sph(1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::array<Eigen::MatrixXcd, 3> out;
  out[0] = ((m_m1 - m_p1) * inv_sqrt2).cast<std::complex<double>>();
  out[1] = (1i * inv_sqrt2) * (m_m1 + m_p1).cast<std::complex<double>>();
  out[2] = m_0.cast<std::complex<double>>();
  return out;
}

}  // namespace ops
}  // namespace hyperspec::f2

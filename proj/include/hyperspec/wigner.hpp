#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hyperspec/half_int.hpp"

// Angular-momentum algebra: Wigner 3-j and 6-j symbols evaluated in exact
// integer arithmetic (prime-factorized factorials, big-integer term sums)
// and converted to double only at the boundary.
//
// Reduced-matrix-element convention used throughout this project
// (Wigner-Eckart with a 3-j symbol, no sqrt(2j+1) absorbed):
//
//   <a j m| T^k_q |a' j' m'> = (-1)^(j-m) * 3j(j k j'; -m q m') * <a j||T^k||a' j'>
//
// Every module that quotes a reduced matrix element refers to this form.

namespace hyperspec {

namespace wigner_detail {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::array<int, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                                23, 29, 31, 37, 41, 43, 47, 53,
                                                59, 61, 67, 71, 73, 79, 83, 89};
inline constexpr int kNumPrimes = static_cast<int>(kPrimes.size());
inline constexpr int kMaxFactorialArg = 90;

/// Signed prime-exponent vector: represents the rational prod p_i^e_i.
struct Factored {
  std::array<int16_t, kNumPrimes> e{};

  void mul_factorial(int n, int sign) {
    // Legendre's formula for the exponent of p in n!.
    for (int i = 0; i < kNumPrimes; ++i) {
      const int p = kPrimes[i];
      if (p > n) break;
      int total = 0;
      for (long long q = p; q <= n; q *= p) total += n / static_cast<int>(q);
      e[i] = static_cast<int16_t>(e[i] + sign * total);
    }
  }
};

inline BigInt pow_bigint(int p, int k) {
  BigInt r = 1;
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

/// Factorial exponent table for a single argument, cached.
inline const Factored& factorial_factored(int n) {
  static const auto table = [] {
    std::array<Factored, kMaxFactorialArg + 1> t{};
    for (int n = 0; n <= kMaxFactorialArg; ++n) t[n].mul_factorial(n, +1);
    return t;
  }();
  return table[n];
}

/// Exact value of phase * sqrt(prod p^sqrt_e) * sum, where `sum` is the exact
/// big-integer alternating sum and `shift` the factored rational pulled out
/// of it. Conversion to double happens here, once.
inline double assemble(int phase, const Factored& sqrt_part, const BigInt& sum,
                       const Factored& shift) {
  if (sum == 0) return 0.0;
  // Split sqrt exponents into an exact rational part and a squarefree radical.
  double num = 1.0, den = 1.0, radical = 1.0;
  for (int i = 0; i < kNumPrimes; ++i) {
    int se = sqrt_part.e[i];
    int half = (se >= 0) ? se / 2 : -((-se + 1) / 2);  // floor(se/2)
    int rem = se - 2 * half;                           // 0 or 1
    int total = half + shift.e[i];
    if (total >= 0)
      num *= static_cast<double>(pow_bigint(kPrimes[i], total));
    else
      den *= static_cast<double>(pow_bigint(kPrimes[i], -total));
    if (rem) radical *= kPrimes[i];
  }
  const double s = sum.convert_to<double>();
  return phase * s * (num / den) * std::sqrt(radical);
}

struct TermSum {
  BigInt sum = 0;
  Factored shift;  // common factored rational multiplying `sum`
};

/// Evaluates sum_t (-1)^t * prod_k (num_t,k)! / prod_k (den_t,k)! exactly.
/// `terms` supplies per-t factorial argument lists.
template <typename NumArgsFn, typename DenArgsFn>
TermSum exact_alternating_sum(int tmin, int tmax, NumArgsFn num_args, DenArgsFn den_args) {
  // Per-term signed exponent vectors.
  const int nt = tmax - tmin + 1;
  std::vector<Factored> g(nt);
  for (int k = 0; k < nt; ++k) {
    Factored f{};
    for (int a : num_args(tmin + k)) f.mul_factorial(a, +1);
    for (int a : den_args(tmin + k)) f.mul_factorial(a, -1);
    g[k] = f;
  }
  // Common shift = componentwise minimum, so residual exponents are >= 0.
  TermSum out;
  for (int i = 0; i < kNumPrimes; ++i) {
    int16_t m = g[0].e[i];
    for (int k = 1; k < nt; ++k) m = std::min(m, g[k].e[i]);
    out.shift.e[i] = m;
  }
  for (int k = 0; k < nt; ++k) {
    BigInt term = 1;
    for (int i = 0; i < kNumPrimes; ++i)
      term *= pow_bigint(kPrimes[i], g[k].e[i] - out.shift.e[i]);
    if ((tmin + k) % 2 != 0) term = -term;
    out.sum += term;
  }
  return out;
}

/// Adds the triangle coefficient Delta(a,b,c) = (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!
/// to a factored accumulator. Arguments are doubled.
inline void mul_triangle(Factored& f, int ta, int tb, int tc) {
  f.mul_factorial((ta + tb - tc) / 2, +1);
  f.mul_factorial((ta - tb + tc) / 2, +1);
  f.mul_factorial((-ta + tb + tc) / 2, +1);
  f.mul_factorial((ta + tb + tc) / 2 + 1, -1);
}

inline uint64_t pack_key(std::array<int, 6> v) {
  uint64_t k = 0;
  for (int x : v) k = (k << 9) | static_cast<uint64_t>(x + 200);
  return k;
}

inline double wigner3j_eval(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
  if (tj1 < 0 || tj2 < 0 || tj3 < 0) return 0.0;
  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (!triangle_ok(HalfInt(tj1), HalfInt(tj2), HalfInt(tj3))) return 0.0;
  if (!valid_projection(HalfInt(tj1), HalfInt(tm1)) ||
      !valid_projection(HalfInt(tj2), HalfInt(tm2)) ||
      !valid_projection(HalfInt(tj3), HalfInt(tm3)))
    return 0.0;

  Factored sq{};
  mul_triangle(sq, tj1, tj2, tj3);
  sq.mul_factorial((tj1 + tm1) / 2, +1);
  sq.mul_factorial((tj1 - tm1) / 2, +1);
  sq.mul_factorial((tj2 + tm2) / 2, +1);
  sq.mul_factorial((tj2 - tm2) / 2, +1);
  sq.mul_factorial((tj3 + tm3) / 2, +1);
  sq.mul_factorial((tj3 - tm3) / 2, +1);

  const int a1 = (tj1 + tj2 - tj3) / 2;  // j1+j2-j3
  const int a2 = (tj1 - tm1) / 2;        // j1-m1
  const int a3 = (tj2 + tm2) / 2;        // j2+m2
  const int b1 = (tj3 - tj2 + tm1) / 2;  // j3-j2+m1  (+t)
  const int b2 = (tj3 - tj1 - tm2) / 2;  // j3-j1-m2  (+t)
  const int tmin = std::max({0, -b1, -b2});
  const int tmax = std::min({a1, a2, a3});
  if (tmin > tmax) return 0.0;

  auto num = [](int) { return std::array<int, 0>{}; };
  auto den = [&](int t) {
    return std::array<int, 6>{t, a1 - t, a2 - t, a3 - t, b1 + t, b2 + t};
  };
  const TermSum ts = exact_alternating_sum(tmin, tmax, num, den);
  const int phase = ((tj1 - tj2 - tm3) / 2) % 2 == 0 ? 1 : -1;
  return assemble(phase, sq, ts.sum, ts.shift);
}

inline double wigner6j_eval(int ta, int tb, int tc, int td, int te, int tf) {
  if (ta < 0 || tb < 0 || tc < 0 || td < 0 || te < 0 || tf < 0) return 0.0;
  if (!triangle_ok(HalfInt(ta), HalfInt(tb), HalfInt(tc)) ||
      !triangle_ok(HalfInt(ta), HalfInt(te), HalfInt(tf)) ||
      !triangle_ok(HalfInt(td), HalfInt(tb), HalfInt(tf)) ||
      !triangle_ok(HalfInt(td), HalfInt(te), HalfInt(tc)))
    return 0.0;

  Factored sq{};
  mul_triangle(sq, ta, tb, tc);
  mul_triangle(sq, ta, te, tf);
  mul_triangle(sq, td, tb, tf);
  mul_triangle(sq, td, te, tc);

  const int s1 = (ta + tb + tc) / 2;
  const int s2 = (ta + te + tf) / 2;
  const int s3 = (td + tb + tf) / 2;
  const int s4 = (td + te + tc) / 2;
  const int c1 = (ta + tb + td + te) / 2;
  const int c2 = (tb + tc + te + tf) / 2;
  const int c3 = (ta + tc + td + tf) / 2;
  const int tmin = std::max({s1, s2, s3, s4});
  const int tmax = std::min({c1, c2, c3});
  if (tmin > tmax) return 0.0;

  auto num = [](int t) { return std::array<int, 1>{t + 1}; };
  auto den = [&](int t) {
    return std::array<int, 7>{t - s1, t - s2, t - s3, t - s4, c1 - t, c2 - t, c3 - t};
  };
  const TermSum ts = exact_alternating_sum(tmin, tmax, num, den);
  return assemble(1, sq, ts.sum, ts.shift);
}

}  // namespace wigner_detail

/// Wigner 3-j symbol. Selection-rule violations yield exactly 0.
inline double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  thread_local std::unordered_map<uint64_t, double> cache;
  const uint64_t key =
      wigner_detail::pack_key({j1.twice, j2.twice, j3.twice, m1.twice, m2.twice, m3.twice});
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const double v = wigner_detail::wigner3j_eval(j1.twice, j2.twice, j3.twice,
                                                m1.twice, m2.twice, m3.twice);
  cache.emplace(key, v);
  return v;
}

/// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}. Violated triads yield exactly 0.
inline double wigner6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  thread_local std::unordered_map<uint64_t, double> cache;
  const uint64_t key =
      wigner_detail::pack_key({j1.twice, j2.twice, j3.twice, j4.twice, j5.twice, j6.twice});
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const double v = wigner_detail::wigner6j_eval(j1.twice, j2.twice, j3.twice,
                                                j4.twice, j5.twice, j6.twice);
  cache.emplace(key, v);
  return v;
}

/// Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M> in the Condon-Shortley
/// phase convention.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  if (m1.twice + m2.twice != M.twice) return 0.0;
  const int texp = j1.twice - j2.twice + M.twice;
  const int phase = ((texp / 2) % 2 == 0) ? 1 : -1;
  return phase * std::sqrt(J.twice + 1.0) * wigner3j(j1, j2, J, m1, m2, -M);
}

}  // namespace hyperspec

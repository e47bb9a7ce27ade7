#pragma once

// Test-side oracle: Wigner 3-j and 6-j symbols via the Racah single-sum
// formulas evaluated in exact rational arithmetic (boost cpp_rational),
// independent of the prime-factorized engine in the library.

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

inline Rational rfact(int n) {
  Rational r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Exact signed square: value = sign * sqrt(square).
struct Exact {
  int sign = 0;
  Rational square = 0;
  double value() const {
    return sign * std::sqrt(square.convert_to<double>());
  }
};

inline bool triangle_bad(int ta, int tb, int tc) {
  if ((ta + tb + tc) % 2 != 0) return true;
  return tc < std::abs(ta - tb) || tc > ta + tb;
}

inline Exact racah_3j(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
  Exact out;
  if (tm1 + tm2 + tm3 != 0) return out;
  if (triangle_bad(tj1, tj2, tj3)) return out;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return out;
  if ((tj1 - tm1) % 2 != 0 || (tj2 - tm2) % 2 != 0 || (tj3 - tm3) % 2 != 0) return out;

  const Rational norm = rfact((tj1 + tj2 - tj3) / 2) * rfact((tj1 - tj2 + tj3) / 2) *
                        rfact((-tj1 + tj2 + tj3) / 2) / rfact((tj1 + tj2 + tj3) / 2 + 1) *
                        rfact((tj1 + tm1) / 2) * rfact((tj1 - tm1) / 2) *
                        rfact((tj2 + tm2) / 2) * rfact((tj2 - tm2) / 2) *
                        rfact((tj3 + tm3) / 2) * rfact((tj3 - tm3) / 2);

  const int a1 = (tj1 + tj2 - tj3) / 2;
  const int a2 = (tj1 - tm1) / 2;
  const int a3 = (tj2 + tm2) / 2;
  const int b1 = (tj3 - tj2 + tm1) / 2;
  const int b2 = (tj3 - tj1 - tm2) / 2;
  const int tmin = std::max({0, -b1, -b2});
  const int tmax = std::min({a1, a2, a3});
  if (tmin > tmax) return out;

  Rational sum = 0;
  for (int t = tmin; t <= tmax; ++t) {
    Rational term = Rational(1) / (rfact(t) * rfact(a1 - t) * rfact(a2 - t) * rfact(a3 - t) *
                                   rfact(b1 + t) * rfact(b2 + t));
    sum += (t % 2 == 0) ? term : -term;
  }
  if (sum == 0) return out;
  const int phase = ((tj1 - tj2 - tm3) / 2) % 2 == 0 ? 1 : -1;
  out.sign = phase * (sum > 0 ? 1 : -1);
  out.square = sum * sum * norm;
  return out;
}

inline Exact racah_6j(int ta, int tb, int tc, int td, int te, int tf) {
  Exact out;
  if (triangle_bad(ta, tb, tc) || triangle_bad(ta, te, tf) || triangle_bad(td, tb, tf) ||
      triangle_bad(td, te, tc))
    return out;

  auto tri = [](int x, int y, int z) {
    return rfact((x + y - z) / 2) * rfact((x - y + z) / 2) * rfact((-x + y + z) / 2) /
           rfact((x + y + z) / 2 + 1);
  };
  const Rational norm = tri(ta, tb, tc) * tri(ta, te, tf) * tri(td, tb, tf) * tri(td, te, tc);

  const int s1 = (ta + tb + tc) / 2;
  const int s2 = (ta + te + tf) / 2;
  const int s3 = (td + tb + tf) / 2;
  const int s4 = (td + te + tc) / 2;
  const int c1 = (ta + tb + td + te) / 2;
  const int c2 = (tb + tc + te + tf) / 2;
  const int c3 = (ta + tc + td + tf) / 2;
  const int tmin = std::max({s1, s2, s3, s4});
  const int tmax = std::min({c1, c2, c3});
  if (tmin > tmax) return out;

  Rational sum = 0;
  for (int t = tmin; t <= tmax; ++t) {
    Rational term = rfact(t + 1) / (rfact(t - s1) * rfact(t - s2) * rfact(t - s3) * rfact(t - s4) *
                                    rfact(c1 - t) * rfact(c2 - t) * rfact(c3 - t));
    sum += (t % 2 == 0) ? term : -term;
  }
  if (sum == 0) return out;
  out.sign = sum > 0 ? 1 : -1;
  out.square = sum * sum * norm;
  return out;
}

/// 6-j via contraction of four 3-j symbols over magnetic quantum numbers
/// (independent route; double arithmetic over exact 3-j oracle values).
inline double contraction_6j(int tj1, int tj2, int tj3, int tj4, int tj5, int tj6) {
  double total = 0.0;
  for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2)
    for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2)
      for (int tm4 = -tj4; tm4 <= tj4; tm4 += 2) {
        const int tm3 = -tm1 - tm2;
        if (std::abs(tm3) > tj3) continue;
        const int tm5 = tm1 + tm2 + tm4;
        if (std::abs(tm5) > tj5) continue;
        const int tm6 = tm5 - tm1;  // = tm2 + tm4
        if (std::abs(tm6) > tj6) continue;
        const double f1 = racah_3j(tj1, tj2, tj3, -tm1, -tm2, -tm3).value();
        if (f1 == 0.0) continue;
        const double f2 = racah_3j(tj1, tj5, tj6, tm1, -tm5, tm6).value();
        if (f2 == 0.0) continue;
        const double f3 = racah_3j(tj4, tj2, tj6, tm4, tm2, -tm6).value();
        if (f3 == 0.0) continue;
        const double f4 = racah_3j(tj4, tj5, tj3, -tm4, tm5, tm3).value();
        if (f4 == 0.0) continue;
        const int texp = (tj1 - tm1) + (tj2 - tm2) + (tj3 - tm3) + (tj4 - tm4) + (tj5 - tm5) +
                         (tj6 - tm6);
        const double phase = ((texp / 2) % 2 == 0) ? 1.0 : -1.0;
        total += phase * f1 * f2 * f3 * f4;
      }
  return total;
}

}  // namespace oracle

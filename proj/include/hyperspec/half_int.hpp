#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hyperspec {

/// Half-integer angular momentum quantum number, stored doubled so that
/// values like 5/2 are exact. Used for J, M_J, I, M_I arithmetic.
struct HalfInt {
  int twice = 0;

  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int twice_value) : twice(twice_value) {}

  static constexpr HalfInt from_int(int j) { return HalfInt(2 * j); }
  static constexpr HalfInt from_twice(int twice_value) { return HalfInt(twice_value); }

  constexpr bool is_integer() const { return twice % 2 == 0; }
  constexpr double value() const { return 0.5 * twice; }

  constexpr friend HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt(a.twice + b.twice); }
  constexpr friend HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt(a.twice - b.twice); }
  constexpr friend HalfInt operator-(HalfInt a) { return HalfInt(-a.twice); }
  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const {
    if (is_integer()) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }
};

/// True when |m| <= j and m has the same parity as j (valid projection).
constexpr bool valid_projection(HalfInt j, HalfInt m) {
  return std::abs(m.twice) <= j.twice && ((j.twice - m.twice) % 2 == 0);
}

/// Triangle rule |a-b| <= c <= a+b with integer perimeter.
constexpr bool triangle_ok(HalfInt a, HalfInt b, HalfInt c) {
  if ((a.twice + b.twice + c.twice) % 2 != 0) return false;
  return c.twice >= std::abs(a.twice - b.twice) && c.twice <= a.twice + b.twice;
}

/// (-1)^(k) for a half-integer sum that must be integer; throws otherwise.
inline int parity_phase(HalfInt k) {
  if (!k.is_integer()) throw std::invalid_argument("phase exponent " + k.str() + " is not an integer");
  return (k.twice / 2) % 2 == 0 ? 1 : -1;
}

}  // namespace hyperspec

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "hyperspec/half_int.hpp"
#include "hyperspec/wigner.hpp"

namespace hyperspec {

/// Nuclear spin data for one dopant isotope.
struct NuclearParams {
  HalfInt I = HalfInt(5);  // 5/2 for 141Pr
  double g_n = 1.6;        // 141Pr nuclear g-factor
  std::string isotope = "141Pr";

  void validate() const {
    if (I.twice <= 0) throw std::invalid_argument("nuclear spin I must be > 0");
  }
  int dim() const { return I.twice + 1; }
};

/// External magnetic field: magnitude (tesla) and unit direction in the
/// crystal-field axes system.
struct MagneticField {
  double magnitude_T = 0.0;
  std::array<double, 3> direction{0.0, 0.0, 1.0};

  static MagneticField along(double magnitude_T, std::array<double, 3> dir) {
    if (magnitude_T < 0) throw std::invalid_argument("field magnitude must be >= 0");
    const double n = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    if (n == 0.0) {
      if (magnitude_T > 0) throw std::invalid_argument("zero direction with nonzero field");
      return MagneticField{0.0, {0.0, 0.0, 1.0}};
    }
    return MagneticField{magnitude_T, {dir[0] / n, dir[1] / n, dir[2] / n}};
  }

  static MagneticField zero() { return MagneticField{}; }

  std::array<double, 3> vector_T() const {
    return {magnitude_T * direction[0], magnitude_T * direction[1], magnitude_T * direction[2]};
  }
};

namespace nuclear {

using Matrix = Eigen::MatrixXcd;

/// I_z in the |I, m> basis ordered m = -I .. +I.
inline Matrix iz(HalfInt I) {
  const int n = I.twice + 1;
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = -I.value() + i;
  return m;
}

inline Matrix iplus(HalfInt I) {
  const int n = I.twice + 1;
  const double ival = I.value();
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double mm = -ival + i;
    m(i + 1, i) = std::sqrt(ival * (ival + 1) - mm * (mm + 1));
  }
  return m;
}

/// Cartesian {I_x, I_y, I_z}.
inline std::array<Matrix, 3> cartesian(HalfInt I) {
  using namespace std::complex_literals;
  const Matrix ip = iplus(I);
  const Matrix im = ip.adjoint();
  return {0.5 * (ip + im), -0.5i * (ip - im), iz(I)};
}

/// Spherical rank-1 components: I_0 = I_z, I_{+-1} = -+ (I_x +- i I_y)/sqrt(2).
inline Matrix spherical(HalfInt I, int q) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (q) {
    case 0: return iz(I);
    case 1: return -s * iplus(I);
    case -1: return s * iplus(I).adjoint();
    default: throw std::invalid_argument("rank-1 component q must be -1, 0 or 1");
  }
}

/// Nuclear rank-2 tensor T^2_q(I) = [I^1 (x) I^1]^2_q; T^2_0 = (3 I_z^2 - I^2)/sqrt(6).
inline Matrix t2(HalfInt I, int q) {
  const int n = I.twice + 1;
  Matrix m = Matrix::Zero(n, n);
  for (int mu = -1; mu <= 1; ++mu) {
    const int nu = q - mu;
    if (std::abs(nu) > 1) continue;
    const double cg = clebsch_gordan(HalfInt::from_int(1), HalfInt::from_int(mu),
                                     HalfInt::from_int(1), HalfInt::from_int(nu),
                                     HalfInt::from_int(2), HalfInt::from_int(q));
    if (cg == 0.0) continue;
    m += cg * (spherical(I, mu) * spherical(I, nu));
  }
  return m;
}

}  // namespace nuclear
}  // namespace hyperspec

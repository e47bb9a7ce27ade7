#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hyperspec/f2_basis.hpp"
#include "hyperspec/tensor_ops.hpp"
#include "oracles/explicit_f2.hpp"

using namespace hyperspec;

namespace {

double matrix_max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("f2 basis enumeration") {
  CHECK(f2::basis().size() == 91);
  const auto& mps = f2::multiplets();
  REQUIRE(mps.size() == 13);
  std::vector<std::string> names;
  for (const auto& m : mps) names.push_back(m.name());
  const std::vector<std::string> expected = {"1S0", "3P0", "3P1", "3P2", "1D2", "3F2", "3F3",
                                             "3F4", "1G4", "3H4", "3H5", "3H6", "1I6"};
  CHECK(names == expected);
  // 3H4 block size
  CHECK(mps[f2::multiplet_index("3H4")].size == 9);
}

TEST_CASE("coupled |S MS L ML> states are normalized iff Pauli-allowed") {
  using oracle::f2x::coupled_state;
  // allowed: L+S even
  CHECK_THAT(coupled_state(HalfInt(0), HalfInt(0), 6, 3).norm(),
             Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(coupled_state(HalfInt(2), HalfInt(2), 5, -2).norm(),
             Catch::Matchers::WithinAbs(1.0, 1e-12));
  // forbidden: 3D (S=1, L=2) vanishes after antisymmetrization
  CHECK_THAT(coupled_state(HalfInt(2), HalfInt(0), 2, 1).norm(),
             Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("reduced_Uk trivial cases") {
  TermLabel h3{HalfInt(2), 5, {}, "3H"};
  TermLabel f3{HalfInt(2), 3, {}, "3F"};
  TermLabel d1{HalfInt(0), 2, {}, "1D"};
  // spin independence
  CHECK(f2::reduced_Uk(h3, d1, 2) == 0.0);
  // k=0 diagonal: N_e/sqrt(2l+1) * sqrt(2L+1)
  CHECK_THAT(f2::reduced_Uk(h3, h3, 0),
             Catch::Matchers::WithinAbs(2.0 / std::sqrt(7.0) * std::sqrt(11.0), 1e-12));
  CHECK_THAT(f2::reduced_Uk(h3, f3, 0), Catch::Matchers::WithinAbs(0.0, 1e-13));
  // invalid term label rejected
  TermLabel bad{HalfInt(2), 2, {}, "3D"};
  CHECK_THROWS_AS(f2::reduced_Uk(bad, h3, 2), std::invalid_argument);
}

TEST_CASE("unit tensor U^k matches the explicit 91-dim basis construction") {
  for (int k : {1, 2, 3, 4, 5, 6}) {
    for (int q : {-k, 0, 1, k}) {
      const Eigen::MatrixXd impl = f2::ops::unit_tensor(k, q);
      const Eigen::MatrixXd ref = oracle::f2x::sljm_one_body(oracle::f2x::sp_ukq(k, q));
      INFO("k=" << k << " q=" << q);
      CHECK(matrix_max_diff(impl, ref) < 1e-11);
    }
  }
}

TEST_CASE("reduced_Uk full f2 table vs explicit-basis oracle, k=2,4,6") {
  // invert Wigner-Eckart on stretched components of the oracle matrix
  for (int k : {2, 4, 6}) {
    const Eigen::MatrixXd ref = oracle::f2x::sljm_one_body(oracle::f2x::sp_ukq(k, 0));
    const Eigen::MatrixXd impl = f2::ops::unit_tensor(k, 0);
    CHECK(matrix_max_diff(impl, ref) < 1e-11);
  }
}

TEST_CASE("total L and S operators match oracle and carry exact reduced elements") {
  for (int q : {-1, 0, 1}) {
    const Eigen::MatrixXd l_impl = f2::ops::orbital_L(q);
    const Eigen::MatrixXd l_ref = oracle::f2x::sljm_one_body(oracle::f2x::sp_lq(q));
    INFO("L_q q=" << q);
    CHECK(matrix_max_diff(l_impl, l_ref) < 1e-11);

    const Eigen::MatrixXd s_impl = f2::ops::spin_S(q);
    const Eigen::MatrixXd s_ref = oracle::f2x::sljm_one_body(oracle::f2x::sp_sq(q));
    INFO("S_q q=" << q);
    CHECK(matrix_max_diff(s_impl, s_ref) < 1e-11);
  }
}

TEST_CASE("spin-orbit operator matches oracle") {
  const Eigen::MatrixXd impl = f2::ops::spin_orbit();
  const Eigen::MatrixXd ref = oracle::f2x::sljm_one_body(oracle::f2x::sp_so());
  CHECK(matrix_max_diff(impl, ref) < 1e-11);
}

TEST_CASE("hyperfine N tensor matches oracle") {
  for (int q : {-1, 0, 1}) {
    const Eigen::MatrixXd impl = f2::ops::hyperfine_N(q);
    const Eigen::MatrixXd ref = oracle::f2x::sljm_one_body(
        Eigen::MatrixXd(oracle::f2x::sp_lq(q) - std::sqrt(10.0) * oracle::f2x::sp_sC2_rank1(q)));
    INFO("N_q q=" << q);
    CHECK(matrix_max_diff(impl, ref) < 1e-11);
  }
}

TEST_CASE("reduced_Uk hermiticity pattern under bra/ket swap") {
  // convention: <L||U^k||L'> = (-1)^(L-L') <L'||U^k||L>
  const auto& ts = f2::terms();
  for (int k : {2, 4, 6})
    for (const auto& a : ts)
      for (const auto& b : ts) {
        if (a.S != b.S) continue;
        const double ab = f2::reduced_Uk(a, b, k);
        const double ba = f2::reduced_Uk(b, a, k);
        const double phase = ((a.L - b.L) % 2 == 0) ? 1.0 : -1.0;
        INFO("k=" << k << " " << a.label << " " << b.label);
        CHECK_THAT(ab, Catch::Matchers::WithinAbs(phase * ba, 1e-12));
      }
}

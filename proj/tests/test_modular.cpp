#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "so3cat/modular.hpp"
#include "so3cat/qnum.hpp"

using namespace so3cat;
using Cd = std::complex<double>;

TEST_CASE("pinned m=2 data") {
  const ModularData md = modular_data(2);
  REQUIRE(md.nlabels() == 4);
  CHECK(md.dims[0] == doctest::Approx(1.0));
  CHECK(md.dims[1] == doctest::Approx(2.6180339887498953));
  CHECK(md.dims[2] == doctest::Approx(1.618033988749895));
  CHECK(md.dims[3] == doctest::Approx(1.618033988749895));
  CHECK(md.sigma.real() == doctest::Approx(-1.118033988749891).epsilon(1e-12));
  CHECK(md.sigma.imag() == doctest::Approx(3.4409548011779396).epsilon(1e-12));
  CHECK(md.S(0, 0).real() == doctest::Approx(0.2763932022500207));
  CHECK(md.S(0, 1).real() == doctest::Approx(0.7236067977499782));
  CHECK(md.S(0, 2).real() == doctest::Approx(0.4472135954999574));
  CHECK(md.T(0, 0).real() == doctest::Approx(0.8090169943749478));
  CHECK(md.T(0, 0).imag() == doctest::Approx(-0.5877852522924727));
  CHECK(md.T(2, 2).real() == doctest::Approx(-1.0));
}

TEST_CASE("pinned m=3 data") {
  const ModularData md = modular_data(3);
  CHECK(md.S(0, 0).real() == doctest::Approx(0.16821001507263894));
  CHECK(md.T(0, 0).real() == doctest::Approx(0.7818314824680298));
  CHECK(md.T(0, 0).imag() == doctest::Approx(-0.6234898018587336));
}

TEST_CASE("defining relations for m = 1..8") {
  for (int m = 1; m <= 8; ++m) {
    const ModularData md = modular_data(m);
    CHECK(unitarity_residual(md) < 1e-9);
    CHECK(stss_residual(md) < 1e-9);
    CHECK(s2c_residual(md) < 1e-9);
    CHECK(global_dim_residual(md) < 1e-9);
  }
}

TEST_CASE("S is symmetric and row 0 is positive") {
  for (int m = 1; m <= 8; ++m) {
    const ModularData md = modular_data(m);
    CHECK((md.S - md.S.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int j = 0; j < md.nlabels(); ++j) {
      CHECK(md.S(0, j).real() > 0.0);
      CHECK(std::abs(md.S(0, j).imag()) < 1e-12);
    }
  }
}

TEST_CASE("fusion rules are nonnegative integers; rho_1 generates adjacency") {
  for (int m = 1; m <= 8; ++m) {
    const ModularData md = modular_data(m);
    CHECK(fusion_integrality(md) < 1e-9);
    CHECK(fusion_generator_residual(md) < 1e-9);
  }
}

TEST_CASE("fusion ring is commutative and associative at m=3") {
  const ModularData md = modular_data(3);
  const int n = md.nlabels();
  std::vector<Eigen::MatrixXd> N;
  for (int l = 0; l < n; ++l) N.push_back(verlinde(md.S, l));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CHECK((N[a] * N[b] - N[b] * N[a]).cwiseAbs().maxCoeff() < 1e-9);
      // N_a N_b = sum_c N_ab^c N_c
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
      for (int c = 0; c < n; ++c) rhs += N[a](b, c) * N[c];
      CHECK((N[a] * N[b] - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("quantum dimensions from S row 0") {
  for (int m = 2; m <= 6; ++m) {
    const ModularData md = modular_data(m);
    for (int j = 0; j < md.nlabels(); ++j)
      CHECK(std::abs(md.S(0, j).real() / md.S(0, 0).real() - md.dims[j]) <
            1e-9);
  }
}

TEST_CASE("su2 level k data satisfies modular relations") {
  for (int k : {4, 8, 12}) {
    Eigen::MatrixXd S;
    Eigen::MatrixXcd T;
    su2_data(k, S, T);
    const int n = k + 1;
    CHECK((S * S - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-9);
    const Eigen::MatrixXcd ST = S.cast<Cd>() * T;
    CHECK((ST * ST * ST - (S * S).cast<Cd>()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("branching intertwines SO(3) and SU(2) modular data") {
  for (int m = 1; m <= 8; ++m) {
    const ModularData md = modular_data(m);
    CHECK(branching_residual(md) < 1e-9);
    const Eigen::MatrixXd b = branching_matrix(m);
    CHECK(b.rows() == m + 2);
    CHECK(b.cols() == 4 * m + 1);
    CHECK(b.sum() == doctest::Approx(2 * m + 2));  // two 1s per rho, one per Q
  }
}

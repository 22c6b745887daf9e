#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "so3cat/invariants.hpp"

using namespace so3cat;

namespace {
bool contains(const std::vector<Eigen::MatrixXi>& zs,
              const Eigen::MatrixXi& z) {
  return std::any_of(zs.begin(), zs.end(),
                     [&](const Eigen::MatrixXi& w) { return w == z; });
}
}  // namespace

TEST_CASE("commutant dimensions") {
  CHECK(commutant_dimension(modular_data(2)) == 2);
  CHECK(commutant_dimension(modular_data(3)) == 2);
  CHECK(commutant_dimension(modular_data(4)) == 5);
  CHECK(commutant_dimension(modular_data(5)) == 2);
  CHECK(commutant_dimension(modular_data(6)) == 2);
  CHECK(commutant_dimension(modular_data(7)) == 3);
}

TEST_CASE("named invariants commute with S and T") {
  for (int m = 2; m <= 8; ++m) {
    const ModularData md = modular_data(m);
    CHECK(invariant_residual(md, invariant_diagonal(m)) < 1e-9);
    CHECK(invariant_residual(md, invariant_qswap(m)) < 1e-9);
  }
}

TEST_CASE("generic levels have exactly the diagonal pair") {
  for (int m : {2, 3, 5, 6}) {
    const ModularData md = modular_data(m);
    const auto zs = enumerate_invariants(md);
    REQUIRE(zs.size() == 2);
    CHECK(contains(zs, invariant_diagonal(m)));
    CHECK(contains(zs, invariant_qswap(m)));
  }
}

TEST_CASE("m=4 has six invariants in two exceptional classes") {
  const ModularData md = modular_data(4);
  const auto zs = enumerate_invariants(md);
  REQUIRE(zs.size() == 6);
  CHECK(contains(zs, invariant_diagonal(4)));
  CHECK(contains(zs, invariant_qswap(4)));
  // the pairing invariant: swap rho_1 <-> Q+, rest diagonal
  Eigen::MatrixXi e8 = Eigen::MatrixXi::Identity(6, 6);
  e8(1, 1) = e8(4, 4) = 0;
  e8(1, 4) = e8(4, 1) = 1;
  CHECK(contains(zs, e8));
  // its Q-relabeling: swap rho_1 <-> Q-
  Eigen::MatrixXi e8b = Eigen::MatrixXi::Identity(6, 6);
  e8b(1, 1) = e8b(5, 5) = 0;
  e8b(1, 5) = e8b(5, 1) = 1;
  CHECK(contains(zs, e8b));
  // the two 3-cycle permutation invariants (transposes of each other)
  Eigen::MatrixXi cyc = Eigen::MatrixXi::Identity(6, 6);
  cyc(1, 1) = cyc(4, 4) = cyc(5, 5) = 0;
  cyc(1, 4) = cyc(4, 5) = cyc(5, 1) = 1;
  CHECK(contains(zs, cyc));
  CHECK(contains(zs, cyc.transpose()));
  // class split: exactly two symmetric non-(diag/qswap) and a transpose pair
  int symmetric_offdiag = 0, asym = 0;
  for (const auto& z : zs) {
    if (z == invariant_diagonal(4) || z == invariant_qswap(4)) continue;
    if (z == z.transpose())
      ++symmetric_offdiag;
    else
      ++asym;
  }
  CHECK(symmetric_offdiag == 2);
  CHECK(asym == 2);
}

TEST_CASE("m=7 has three invariants with a self-transpose block type") {
  const ModularData md = modular_data(7);
  const auto zs = enumerate_invariants(md);
  REQUIRE(zs.size() == 3);
  CHECK(contains(zs, invariant_diagonal(7)));
  CHECK(contains(zs, invariant_qswap(7)));
  Eigen::MatrixXi e14 = Eigen::MatrixXi::Zero(9, 9);
  e14(0, 0) = e14(0, 5) = e14(5, 0) = e14(5, 5) = 1;
  e14(3, 3) = e14(3, 6) = e14(6, 3) = e14(6, 6) = 1;
  CHECK(contains(zs, e14));
  CHECK(e14 == e14.transpose());
}

TEST_CASE("every enumerated invariant is normalized and commutes") {
  for (int m : {2, 4, 7}) {
    const ModularData md = modular_data(m);
    for (const auto& z : enumerate_invariants(md)) {
      CHECK(z(0, 0) == 1);
      CHECK(z.minCoeff() >= 0);
      CHECK(invariant_residual(md, z) < 1e-9);
    }
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "so3cat/qnum.hpp"

using namespace so3cat;

TEST_CASE("pinned values") {
  // [2] at m=1 is sqrt(3); [3] at m=2 is the golden ratio squared.
  CHECK(qnum(1, 5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(qnum(2, 1) == doctest::Approx(1.7320508075688772).epsilon(1e-14));
  CHECK(qnum(3, 2) == doctest::Approx(2.618033988749895).epsilon(1e-14));
  CHECK(qnum(0, 3) == doctest::Approx(0.0).epsilon(1e-14));
  // [6] vanishes at m=1 (q is a primitive 12th root of unity there).
  CHECK(std::abs(qnum(6, 1)) < 1e-14);
}

TEST_CASE("recurrence [2][n] = [n-1] + [n+1]") {
  for (int m = 1; m <= 12; ++m)
    for (int n = 1; n <= 4 * m; ++n)
      CHECK(std::abs(qnum(2, m) * qnum(n, m) - qnum(n - 1, m) -
                     qnum(n + 1, m)) < 1e-9);
}

TEST_CASE("fusion [3][n] = [n-2] + [n] + [n+2]") {
  for (int m = 1; m <= 12; ++m)
    for (int n = 2; n <= 4 * m - 1; ++n)
      CHECK(std::abs(qnum(3, m) * qnum(n, m) - qnum(n - 2, m) - qnum(n, m) -
                     qnum(n + 2, m)) < 1e-9);
}

TEST_CASE("reflection [4m+2-n] = [n]") {
  for (int m = 1; m <= 12; ++m)
    for (int n = 0; n <= 4 * m + 2; ++n)
      CHECK(std::abs(qnum(4 * m + 2 - n, m) - qnum(n, m)) < 1e-9);
}

TEST_CASE("antisymmetry [-n] = -[n] and period [n + 8m+4] = [n]") {
  for (int m = 1; m <= 6; ++m)
    for (int n = 0; n <= 4 * m; ++n) {
      CHECK(std::abs(qnum(-n, m) + qnum(n, m)) < 1e-12);
      CHECK(std::abs(qnum(n + 8 * m + 4, m) - qnum(n, m)) < 1e-12);
    }
}

TEST_CASE("gauss product equals (-i)^m sqrt(2m+1)") {
  for (int m = 1; m <= 12; ++m) {
    const auto diff = gauss_product(m) - gauss_closed_form(m);
    CHECK(std::abs(diff) < 1e-9);
  }
}

TEST_CASE("loop weight is [3]") {
  for (int m = 1; m <= 8; ++m) {
    CHECK(loop_weight(m) == doctest::Approx(qnum(3, m)).epsilon(1e-15));
    const double beta = 1.0 + 2.0 * std::cos(2.0 * M_PI / (4 * m + 2));
    CHECK(loop_weight(m) == doctest::Approx(beta).epsilon(1e-13));
  }
}

TEST_CASE("single-precision instantiation stays consistent") {
  for (int m = 1; m <= 4; ++m)
    CHECK(std::abs(static_cast<double>(qnum<float>(3, m)) - qnum(3, m)) <
          1e-5);
}

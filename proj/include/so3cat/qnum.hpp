#pragma once
// Quantum integers at q = exp(i*pi/(4m+2)) and related scalar helpers.
//
// [n]_q = sin(n*pi/(4m+2)) / sin(pi/(4m+2)).  The level parameter m >= 1 is
// carried explicitly; all identities used downstream ([2][n] = [n-1]+[n+1],
// [3][n] = [n-2]+[n]+[n+2], the reflection [2m+2j+1] = [2m-2j+1], and the
// Gauss product over even powers of q) hold in exact arithmetic and are
// pinned by tests at double precision.

#include <cmath>
#include <complex>
#include <numbers>

namespace so3cat {

template <class Scalar = double>
Scalar qnum(int n, int m) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar den = static_cast<Scalar>(4 * m + 2);
  return std::sin(static_cast<Scalar>(n) * pi / den) / std::sin(pi / den);
}

// q itself (primitive root of unity on the upper half circle).
template <class Scalar = double>
std::complex<Scalar> qval(int m) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar th = pi / static_cast<Scalar>(4 * m + 2);
  return {std::cos(th), std::sin(th)};
}

// prod_{j=0}^{2m-1} (1 - q^{4m-2j});  equals (-i)^m sqrt(2m+1).
template <class Scalar = double>
std::complex<Scalar> gauss_product(int m) {
  const std::complex<Scalar> q = qval<Scalar>(m);
  std::complex<Scalar> prod{1, 0};
  for (int j = 0; j < 2 * m; ++j)
    prod *= (std::complex<Scalar>{1, 0} - std::pow(q, 4 * m - 2 * j));
  return prod;
}

template <class Scalar = double>
std::complex<Scalar> gauss_closed_form(int m) {
  const std::complex<Scalar> mi{0, -1};  // (-i)^m sqrt(2m+1)
  return std::pow(mi, m) * std::sqrt(static_cast<Scalar>(2 * m + 1));
}

// Loop weight of the fundamental object: [3]_q = 1 + 2 cos(2 pi / (4m+2)).
template <class Scalar = double>
Scalar loop_weight(int m) {
  return qnum<Scalar>(3, m);
}

}  // namespace so3cat

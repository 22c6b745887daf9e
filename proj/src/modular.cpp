#include "so3cat/modular.hpp"

#include <cmath>

#include "so3cat/qnum.hpp"

namespace so3cat {

namespace {
using cd = std::complex<double>;
}

ModularData modular_data(int m) {
  ModularData md;
  md.m = m;
  const int n = m + 2;
  const cd q = qval(m);

  md.dims.resize(n);
  for (int j = 0; j < m; ++j) md.dims[j] = qnum(2 * j + 1, m);
  md.dims[m] = md.dims[m + 1] = qnum(2 * m + 1, m) / 2.0;

  md.omega.resize(n);
  for (int j = 0; j < m; ++j) md.omega[j] = std::pow(q, -2 * j * (j + 1));
  md.omega[m] = md.omega[m + 1] = std::pow(q, -2 * m * (m + 1));

  md.Y = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      md.Y(i, j) = qnum((2 * i + 1) * (2 * j + 1), m);
  for (int j = 0; j < m; ++j) {
    const double v = 0.5 * qnum((2 * j + 1) * (2 * m + 1), m);
    md.Y(j, m) = md.Y(m, j) = v;
    md.Y(j, m + 1) = md.Y(m + 1, j) = v;
  }
  const double sq = std::sqrt(static_cast<double>(2 * m + 1));
  const cd im{0.0, 1.0};
  const cd impow = std::pow(im, m);
  const double par = (m % 2 == 0) ? 1.0 : -1.0;
  for (int e1 = 0; e1 < 2; ++e1)
    for (int e2 = 0; e2 < 2; ++e2) {
      const double ss = (e1 == e2) ? 1.0 : -1.0;
      md.Y(m + e1, m + e2) = (qnum(2 * m + 1, m) / 4.0) * (par + ss * impow * sq);
    }

  cd sigma{0, 0};
  for (int a = 0; a < n; ++a) sigma += md.dims[a] * md.dims[a] / md.omega[a];
  md.sigma = sigma;
  md.S = md.Y / std::abs(sigma);

  // zeta^3 = conj(sigma)/|sigma|, principal branch
  const cd zeta = std::pow(std::conj(sigma) / std::abs(sigma), 1.0 / 3.0);
  md.T = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) md.T(a, a) = zeta * std::conj(md.omega[a]);
  return md;
}

Eigen::MatrixXd charge_conjugation(int m) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(m + 2, m + 2);
  if (m % 2 == 1) {
    c(m, m) = c(m + 1, m + 1) = 0.0;
    c(m, m + 1) = c(m + 1, m) = 1.0;
  }
  return c;
}

Eigen::MatrixXd verlinde(const Eigen::MatrixXcd& S, int lambda) {
  const int n = static_cast<int>(S.rows());
  Eigen::MatrixXcd N = Eigen::MatrixXcd::Zero(n, n);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      cd acc{0, 0};
      for (int s = 0; s < n; ++s)
        acc += S(lambda, s) * S(mu, s) * std::conj(S(nu, s)) / S(0, s);
      N(mu, nu) = acc;
    }
  return N.real();
}

double unitarity_residual(const ModularData& md) {
  const int n = md.nlabels();
  return (md.S * md.S.adjoint() - Eigen::MatrixXcd::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
}

double stss_residual(const ModularData& md) {
  const Eigen::MatrixXcd st = md.S * md.T;
  return (st * st * st - md.S * md.S).cwiseAbs().maxCoeff();
}

double s2c_residual(const ModularData& md) {
  return (md.S * md.S - charge_conjugation(md.m).cast<cd>())
      .cwiseAbs()
      .maxCoeff();
}

double global_dim_residual(const ModularData& md) {
  const double glob = md.dims.squaredNorm();
  return std::abs(std::norm(md.sigma) - glob);
}

double fusion_integrality(const ModularData& md) {
  double worst = 0.0;
  const int n = md.nlabels();
  for (int l = 0; l < n; ++l) {
    const Eigen::MatrixXd N = verlinde(md.S, l);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double r = std::round(N(i, j));
        worst = std::max(worst, std::abs(N(i, j) - r));
        if (r < -0.5) worst = std::max(worst, std::abs(r));
      }
  }
  return worst;
}

double fusion_generator_residual(const ModularData& md) {
  const Graph g = graph_A(md.m);
  Eigen::MatrixXd N;
  if (md.m >= 2) {
    N = verlinde(md.S, 1);
  } else {
    N = verlinde(md.S, 1) + verlinde(md.S, 2);  // Q+ + Q- at m = 1
  }
  return (N - g.adjacency()).cwiseAbs().maxCoeff();
}

void su2_data(int k, Eigen::MatrixXd& S, Eigen::MatrixXcd& T) {
  const int n = k + 1;
  const double pi = std::numbers::pi_v<double>;
  S.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      S(a, b) = std::sqrt(2.0 / (k + 2)) *
                std::sin((a + 1.0) * (b + 1.0) * pi / (k + 2));
  const double c = 3.0 * k / (k + 2);
  T = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const double h = a * (a + 2.0) / (4.0 * (k + 2));
    T(a, a) = std::exp(cd{0.0, 2.0 * pi * (h - c / 24.0)});
  }
}

Eigen::MatrixXd branching_matrix(int m) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m + 2, 4 * m + 1);
  for (int j = 0; j < m; ++j) {
    b(j, 2 * j) = 1.0;
    b(j, 4 * m - 2 * j) = 1.0;
  }
  b(m, 2 * m) = 1.0;
  b(m + 1, 2 * m) = 1.0;
  return b;
}

double branching_residual(const ModularData& md) {
  Eigen::MatrixXd Ssu;
  Eigen::MatrixXcd Tsu;
  su2_data(4 * md.m, Ssu, Tsu);
  const Eigen::MatrixXd b = branching_matrix(md.m);
  const double rs =
      (md.S * b - b.cast<cd>() * Ssu.cast<cd>()).cwiseAbs().maxCoeff();
  const double rt = (md.T * b - b.cast<cd>() * Tsu).cwiseAbs().maxCoeff();
  return std::max(rs, rt);
}

}  // namespace so3cat

#include "so3cat/cells.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "so3cat/qnum.hpp"
#include "so3cat/report.hpp"

namespace so3cat {

LoopKey canon_loop(int a, int b, int c) {
  return std::min({LoopKey{a, b, c}, LoopKey{b, c, a}, LoopKey{c, a, b}});
}

std::vector<LoopKey> all_loops(const Graph& g) {
  std::set<LoopKey> loops;
  const int ne = g.ne();
  for (int a = 0; a < ne; ++a)
    for (int b = 0; b < ne; ++b) {
      if (g.src[b] != g.dst[a]) continue;
      for (int c = 0; c < ne; ++c)
        if (g.src[c] == g.dst[b] && g.dst[c] == g.src[a])
          loops.insert(canon_loop(a, b, c));
    }
  return {loops.begin(), loops.end()};
}

Cplx cell_value(const CellMap& W, int a, int b, int c) {
  return W.at(canon_loop(a, b, c));
}

void set_cell(const Graph& g, CellMap& W,
              const std::vector<std::string>& loop_names, Cplx v) {
  if (loop_names.size() != 3) throw std::invalid_argument("need 3 edge names");
  W[canon_loop(g.edge_id(loop_names[0]), g.edge_id(loop_names[1]),
               g.edge_id(loop_names[2]))] = v;
}

Eigen::VectorXd canonical_forms(const Graph& g) {
  Eigen::VectorXd E(g.ne());
  for (int e = 0; e < g.ne(); ++e)
    E[e] = std::sqrt(g.phi[g.dst[e]] / g.phi[g.src[e]]);
  return E;
}

double loop_sum_residual(const Graph& g, const Eigen::VectorXd& E) {
  const double target = loop_weight(g.m);
  double worst = 0.0;
  for (int x = 0; x < g.nv; ++x) {
    double tot = 0.0;
    for (int e = 0; e < g.ne(); ++e)
      if (g.src[e] == x) tot += E[e] * E[e];
    worst = std::max(worst, std::abs(tot - target));
  }
  return worst;
}

double CellResiduals::max() const { return std::max({r1, r2, r3}); }

CellResiduals rel_residuals(const Graph& g, const CellMap& W) {
  const int ne = g.ne();
  const auto& phi = g.phi;
  const auto& pt = g.partner;
  const auto& s = g.src;
  const auto& r = g.dst;
  CellResiduals res;
  // R1
  for (int a = 0; a < ne; ++a)
    for (int d = 0; d < ne; ++d) {
      if (s[a] != s[d] || r[a] != r[d]) continue;
      Cplx tot = 0.0;
      for (int b = 0; b < ne; ++b) {
        if (s[b] != r[a]) continue;
        for (int c = 0; c < ne; ++c)
          if (s[c] == r[b] && r[c] == s[a])
            tot += cell_value(W, a, b, c) * cell_value(W, pt[c], pt[b], pt[d]);
      }
      const double rhs = (a == d) ? phi[s[a]] * phi[r[a]] : 0.0;
      res.r1 = std::max(res.r1, std::abs(tot - rhs));
    }
  // R2
  for (int a = 0; a < ne; ++a) {
    if (pt[a] != a || s[a] != r[a]) continue;
    Cplx tot = 0.0;
    for (int b = 0; b < ne; ++b)
      if (s[b] == r[a])
        tot += std::sqrt(phi[r[b]]) * cell_value(W, a, b, pt[b]);
    res.r2 = std::max(res.r2, std::abs(tot));
  }
  // R3
  const double q24 = qnum(2, g.m) / qnum(4, g.m);
  for (int a = 0; a < ne; ++a)
    for (int b = 0; b < ne; ++b) {
      if (s[b] != r[a]) continue;
      for (int c = 0; c < ne; ++c) {
        if (s[c] != s[a]) continue;
        for (int d = 0; d < ne; ++d) {
          if (s[d] != r[c] || r[d] != r[b]) continue;
          Cplx t1 = 0.0;
          for (int e = 0; e < ne; ++e)
            if (s[e] == r[a] && r[e] == r[c])
              t1 += cell_value(W, a, e, pt[c]) * cell_value(W, pt[e], b, pt[d]);
          Cplx t2 = 0.0;
          for (int e = 0; e < ne; ++e)
            if (s[e] == r[b] && r[e] == s[a])
              t2 += cell_value(W, a, b, e) * cell_value(W, pt[e], pt[d], pt[c]);
          const Cplx lhs = std::sqrt(phi[s[a]] * phi[r[b]]) * t1 -
                           std::sqrt(phi[r[a]] * phi[r[c]]) * t2;
          const double rhs =
              q24 * (phi[r[a]] * phi[r[b]] * phi[r[c]] *
                         ((a == pt[b] && c == pt[d]) ? 1.0 : 0.0) -
                     phi[s[a]] * phi[r[a]] * phi[r[b]] *
                         ((a == c && b == d) ? 1.0 : 0.0));
          res.r3 = std::max(res.r3, std::abs(lhs - rhs));
        }
      }
    }
  return res;
}

double star_residual(const Graph& g, const CellMap& W) {
  double worst = 0.0;
  for (const auto& [key, v] : W) {
    const auto [a, b, c] = key;
    const Cplx rv = cell_value(W, g.partner[c], g.partner[b], g.partner[a]);
    worst = std::max(worst, std::abs(rv - std::conj(v)));
  }
  return worst;
}

namespace {
template <typename Mat>
CellMap gauge_apply(const Graph& g, const CellMap& W, const Mat& M,
                    const std::vector<LoopKey>& loops) {
  CellMap out;
  const int ne = g.ne();
  for (const LoopKey& key : loops) {
    const auto [a, b, c] = key;
    Cplx tot = 0.0;
    for (int a1 = 0; a1 < ne; ++a1) {
      if (M(a, a1) == Cplx(0.0)) continue;
      for (int b1 = 0; b1 < ne; ++b1) {
        if (M(b, b1) == Cplx(0.0) || g.src[b1] != g.dst[a1]) continue;
        for (int c1 = 0; c1 < ne; ++c1) {
          if (M(c, c1) == Cplx(0.0) || g.src[c1] != g.dst[b1] ||
              g.dst[c1] != g.src[a1])
            continue;
          tot += M(a, a1) * M(b, b1) * M(c, c1) * cell_value(W, a1, b1, c1);
        }
      }
    }
    out[key] = tot;
  }
  return out;
}
}  // namespace

CellMap gauge_transform(const Graph& g, const CellMap& W,
                        const Eigen::MatrixXd& M) {
  return gauge_apply(g, W, M, all_loops(g));
}

CellMap gauge_transform(const Graph& g, const CellMap& W,
                        const Eigen::MatrixXcd& M) {
  return gauge_apply(g, W, M, all_loops(g));
}

CellMap gauge_transform(const Graph& g, const CellMap& W,
                        const Eigen::MatrixXd& M,
                        const std::vector<LoopKey>& loops) {
  return gauge_apply(g, W, M, loops);
}

CellMap gauge_transform(const Graph& g, const CellMap& W,
                        const Eigen::MatrixXcd& M,
                        const std::vector<LoopKey>& loops) {
  return gauge_apply(g, W, M, loops);
}

CellMap double_loop_gauge(const Graph& g, const CellMap& W,
                          const Eigen::Matrix2d& u) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(g.ne(), g.ne());
  const int i = g.edge_id("g");
  const int j = g.edge_id("g'");
  M(i, i) = u(0, 0);
  M(i, j) = u(0, 1);
  M(j, i) = u(1, 0);
  M(j, j) = u(1, 1);
  return gauge_transform(g, W, M);
}

Eigen::Matrix2d u_theta(double theta, int em, int emp) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d u;
  u << c, em * s, emp * s, -em * emp * c;
  return u;
}

std::array<Cplx, 4> double_loop_cubic(const std::array<Cplx, 4>& w,
                                      const Eigen::Matrix2d& u) {
  const Cplx W0 = w[0], W1 = w[1], W2 = w[2], W3 = w[3];
  const double a = u(0, 0), b = u(0, 1), c = u(1, 0), d = u(1, 1);
  return {a * a * a * W0 + 3 * a * a * b * W1 + 3 * a * b * b * W2 +
              b * b * b * W3,
          a * a * c * W0 + (a * a * d + 2 * a * b * c) * W1 +
              (b * b * c + 2 * a * b * d) * W2 + b * b * d * W3,
          a * c * c * W0 + (b * c * c + 2 * a * c * d) * W1 +
              (a * d * d + 2 * b * c * d) * W2 + b * d * d * W3,
          c * c * c * W0 + 3 * c * c * d * W1 + 3 * c * d * d * W2 +
              d * d * d * W3};
}

namespace {
std::vector<int> pad_eps(const std::vector<int>& eps, size_t n) {
  std::vector<int> out(eps);
  out.resize(std::max(out.size(), n), 1);
  return out;
}
std::string idx(const std::string& base, int i) {
  return base + std::to_string(i);
}
}  // namespace

CellMap cells_A(const Graph& g, Cplx tau, const std::vector<int>& eps_in) {
  const int m = g.m;
  const auto q = [m](int n) { return qnum(n, m); };
  const auto eps = pad_eps(eps_in, m);
  CellMap W;
  for (int l = 1; l < m; ++l) {
    set_cell(g, W, {idx("c", l - 1), idx("s", l), idx("c", l - 1) + "~"},
             eps[l] * std::sqrt(q(2) * q(2 * l - 1) * q(2 * l + 1) *
                                q(2 * l + 2) / (q(4) * q(2 * l))));
    set_cell(g, W, {idx("s", l), idx("s", l), idx("s", l)},
             eps[l] * q(4 * l + 2) * std::sqrt(q(2)) /
                 std::sqrt(q(4) * q(2 * l) * q(2 * l + 2)));
  }
  for (int l = 1; l < m - 1; ++l)
    set_cell(g, W, {idx("s", l), idx("c", l), idx("c", l) + "~"},
             -eps[l] * std::sqrt(q(2) * q(2 * l) * q(2 * l + 1) *
                                 q(2 * l + 3) / (q(4) * q(2 * l + 2))));
  if (m >= 2) {
    const double w = -eps[m - 1] * std::sqrt(q(2) * q(2 * m - 2) *
                                             q(2 * m - 1) * q(2 * m + 1) /
                                             (2 * q(4) * q(2 * m)));
    set_cell(g, W, {idx("s", m - 1), "t+", "t+~"}, w);
    set_cell(g, W, {idx("s", m - 1), "t-", "t-~"}, w);
  }
  set_cell(g, W, {"t+", "gpm", "t-~"}, tau * q(2 * m) / q(2));
  set_cell(g, W, {"t-", "gpm~", "t+~"}, std::conj(tau) * q(2 * m) / q(2));
  return W;
}

CellMap cells_sigma_chain(const Graph& g, const std::vector<int>& eps_in) {
  const int m = g.m;
  const auto q = [m](int n) { return qnum(n, m); };
  const auto eps = pad_eps(eps_in, m);
  CellMap W;
  for (int l = 2; l < m; ++l)
    set_cell(g, W, {idx("c", l - 2), idx("s", l - 1), idx("c", l - 2) + "~"},
             eps[l] * std::sqrt(q(2 * l - 2) * q(2 * l) * q(2 * l + 1) /
                                (q(2) * q(4) * q(2 * l - 1))));
  for (int l = 1; l < m; ++l) {
    set_cell(g, W, {idx("s", l - 1), idx("s", l - 1), idx("s", l - 1)},
             eps[l] * q(4 * l) /
                 std::sqrt(q(2) * q(4) * q(2 * l - 1) * q(2 * l + 1)));
    set_cell(g, W, {idx("s", l - 1), idx("c", l - 1), idx("c", l - 1) + "~"},
             -eps[l] * std::sqrt(q(2 * l - 1) * q(2 * l) * q(2 * l + 2) /
                                 (q(2) * q(4) * q(2 * l + 1))));
  }
  return W;
}

std::array<double, 4> sigma_double_w20(int m, int e1, int e2) {
  const auto q = [m](int n) { return qnum(n, m); };
  return {e1 * q(2 * m) * std::sqrt(q(6) * q(2 * m - 2)) /
              (q(3) * std::sqrt(q(2) * q(4) * q(2 * m - 1))),
          e2 * q(2 * m) / std::sqrt(q(2) * q(3) * q(4)), 0.0,
          -e2 * q(2 * m - 1) * std::sqrt(q(2)) / std::sqrt(q(3) * q(4))};
}

CellMap cells_sigma(const Graph& g, const std::array<Cplx, 4>& dbl,
                    const std::vector<int>& eps) {
  const int m = g.m;
  const auto q = [m](int n) { return qnum(n, m); };
  CellMap W = (m >= 2) ? cells_sigma_chain(g, eps) : CellMap{};
  set_cell(g, W, {"g", "g", "g"}, dbl[0]);
  set_cell(g, W, {"g", "g", "g'"}, dbl[1]);
  set_cell(g, W, {"g", "g'", "g'"}, dbl[2]);
  set_cell(g, W, {"g'", "g'", "g'"}, dbl[3]);
  if (m >= 2) {
    // The bond cells into the double-loop vertex are forced by (R2).
    const double f = -std::sqrt(q(2 * m) / q(2 * m - 2));
    set_cell(g, W, {idx("c", m - 2), "g", idx("c", m - 2) + "~"},
             f * (dbl[0] + dbl[2]));
    set_cell(g, W, {idx("c", m - 2), "g'", idx("c", m - 2) + "~"},
             f * (dbl[1] + dbl[3]));
  }
  return W;
}

CellMap cells_sigma_family(const Graph& g, double theta, int em, int emp,
                           int e1, int e2, const std::vector<int>& eps) {
  const auto w20 = sigma_double_w20(g.m, e1, e2);
  const CellMap base =
      cells_sigma(g, {w20[0], w20[1], w20[2], w20[3]}, eps);
  return double_loop_gauge(g, base, u_theta(theta, em, emp));
}

CellMap cells_E8(const Graph& g, int e1, int e2, Cplx tau) {
  const auto q = [](int n) { return qnum(n, 4); };
  CellMap W;
  set_cell(g, W, {"e12", "s2", "e12~"}, e1 * std::sqrt(q(3)));
  set_cell(g, W, {"s2", "s2", "s2"}, e1 * q(6) / q(4));
  set_cell(g, W, {"s2", "e23", "e23~"}, -e1 * std::sqrt(q(2) * q(3) / q(4)));
  set_cell(g, W, {"s2", "e24", "e24~"},
           -e1 * std::sqrt(q(2) * q(3) * q(6)) / q(4));
  set_cell(g, W, {"e24", "s4", "e24~"},
           e2 * std::sqrt(q(3) * q(6) * q(10)) / (q(4) * std::sqrt(q(5))));
  set_cell(g, W, {"e34", "s4", "e34~"},
           e2 * std::sqrt(q(6) * q(10)) / std::sqrt(q(2) * q(4) * q(5)));
  set_cell(g, W, {"s4", "s4", "s4"},
           -e2 * q(6) * std::sqrt(q(10)) /
               std::sqrt(q(2) * q(2) * q(2) * q(5)));
  set_cell(g, W, {"e23", "e34", "e24~"},
           tau * std::sqrt(q(3) * q(6) / q(4)));
  set_cell(g, W, {"e24", "e34~", "e23~"},
           std::conj(tau) * std::sqrt(q(3) * q(6) / q(4)));
  return W;
}

CellMap cells_E8c(const Graph& g, double theta, int e1, int e2, int e3) {
  const auto q = [](int n) { return qnum(n, 4); };
  const double c = std::cos(theta), s = std::sin(theta);
  const double r5 = std::sqrt(q(5));
  const double K = std::sqrt(q(2) * q(2) * q(2) * q(3) * q(3) * q(3) /
                             (q(4) * q(4) * q(4)));
  CellMap W;
  set_cell(g, W, {"e12", "g", "e12~"}, -c * q(3) / r5 - e1 * s);
  set_cell(g, W, {"e12", "g'", "e12~"}, -e2 * s * q(3) / r5 + e1 * e2 * c);
  set_cell(g, W, {"g", "e23", "e23~"}, e1 * s * K);
  set_cell(g, W, {"g'", "e23", "e23~"}, -e1 * e2 * c * K);
  set_cell(g, W, {"g", "g", "g"},
           std::sqrt(q(3)) *
               (c * c * c / r5 - 3 * e1 * c * c * s + e1 * s * s * s * q(2) / q(4)));
  set_cell(g, W, {"g", "g", "g'"},
           e2 * c * std::sqrt(q(3)) *
               (c * s / r5 - e1 * (2 * s * s - c * c) - e1 * s * s * q(2) / q(4)));
  set_cell(g, W, {"g", "g'", "g'"},
           s * std::sqrt(q(3)) *
               (c * s / r5 + e1 * (2 * c * c - s * s) + e1 * c * c * q(2) / q(4)));
  set_cell(g, W, {"g'", "g'", "g'"},
           e2 * std::sqrt(q(3)) *
               (s * s * s / r5 + 3 * e1 * c * s * s - e1 * c * c * c * q(2) / q(4)));
  set_cell(g, W, {"e23", "s3", "e23~"}, e3 * q(2) * std::sqrt(q(3)) / q(4));
  set_cell(g, W, {"s3", "s3", "s3"},
           -e3 * std::sqrt(q(2) * q(3)) / std::sqrt(q(4)));
  return W;
}

CellMap cells_E14(const Graph& g, double theta, int e1, int e2, int e3) {
  const auto q = [](int n) { return qnum(n, 7); };
  const double c = std::cos(theta), s = std::sin(theta);
  const double K = std::sqrt(q(2) * q(3) * q(5) * q(6)) / q(4);
  const double F = std::sqrt(q(2) / q(6));
  CellMap W;
  set_cell(g, W, {"e12", "s2", "e12~"}, e1 * std::sqrt(q(3)));
  set_cell(g, W, {"s2", "s2", "s2"}, e1 * q(6) / q(4));
  set_cell(g, W, {"s2", "e23", "e23~"},
           -e1 * q(2) * std::sqrt(q(3) * q(5)) / q(4));
  set_cell(g, W, {"e23", "g", "e23~"}, e2 * s * K);
  set_cell(g, W, {"e23", "g'", "e23~"}, -e2 * e3 * c * K);
  set_cell(g, W, {"g", "e34", "e34~"},
           -q(5) / std::sqrt(q(6)) *
               (c * std::sqrt(q(5) / q(4)) + e2 * s * std::sqrt(q(2) / q(3))));
  set_cell(g, W, {"g'", "e34", "e34~"},
           -e3 * q(5) / std::sqrt(q(6)) *
               (s * std::sqrt(q(5) / q(4)) - e2 * c * std::sqrt(q(2) / q(3))));
  set_cell(g, W, {"g", "g", "g"},
           F * (c * c * c * std::sqrt(q(5)) - 3 * e2 * c * c * s * q(5) +
                e2 * s * s * s * q(10) / q(4)));
  set_cell(g, W, {"g", "g", "g'"},
           e3 * c * F *
               (c * s * std::sqrt(q(5)) - e2 * (2 * s * s - c * c) * q(5) -
                e2 * s * s * q(10) / q(4)));
  set_cell(g, W, {"g", "g'", "g'"},
           s * F *
               (c * s * std::sqrt(q(5)) + e2 * (2 * c * c - s * s) * q(5) +
                e2 * c * c * q(10) / q(4)));
  set_cell(g, W, {"g'", "g'", "g'"},
           e3 * F *
               (s * s * s * std::sqrt(q(5)) + 3 * e2 * c * s * s * q(5) -
                e2 * c * c * c * q(10) / q(4)));
  return W;
}

CellMap cells_E14c(const Graph& g, int e1, int e2, int e3, Cplx tau) {
  const auto q = [](int n) { return qnum(n, 7); };
  CellMap W;
  set_cell(g, W, {"s1", "s1", "s1"}, -e1 * std::sqrt(q(4) / (q(2) * q(3))));
  set_cell(g, W, {"s1", "e12", "e12~"}, e1 / std::sqrt(q(3)));
  set_cell(g, W, {"e12", "s2", "e12~"}, e2 * std::sqrt(q(5) / q(3)));
  set_cell(g, W, {"s2", "s2", "s2"},
           e2 * q(8) / std::sqrt(q(2) * q(3) * q(4) * q(5)));
  set_cell(g, W, {"s2", "e23", "e23~"},
           -e2 * q(3) * std::sqrt(q(4)) / (q(5) * std::sqrt(q(2))));
  set_cell(g, W, {"s2", "e24", "e24~"},
           -e2 * std::sqrt(q(2) * q(3) * q(4)) / q(5));
  set_cell(g, W, {"e24", "s4", "e24~"},
           e3 * std::sqrt(q(2) * q(4)) / std::sqrt(q(3) * q(5)));
  set_cell(g, W, {"e34", "s4", "e34~"}, e3 * std::sqrt(q(2) * q(4)) / q(5));
  set_cell(g, W, {"s4", "s4", "s4"},
           -e3 * std::sqrt(q(2) * q(4) * q(4) * q(4)) /
               (q(5) * std::sqrt(q(3))));
  set_cell(g, W, {"e23", "e34", "e24~"},
           tau * q(2) * q(4) * std::sqrt(q(3)) /
               std::sqrt(q(5) * q(5) * q(5)));
  set_cell(g, W, {"e24", "e34~", "e23~"},
           std::conj(tau) * q(2) * q(4) * std::sqrt(q(3)) /
               std::sqrt(q(5) * q(5) * q(5)));
  return W;
}

CellSystem cell_closed_form(const Graph& g, const CellParams& params) {
  CellSystem cs;
  cs.family = g.family;
  cs.m = g.m;
  cs.params = params;
  const auto e = pad_eps(params.eps, 4);
  switch (g.family) {
    case Family::A:
      cs.W = cells_A(g, params.tau, params.eps);
      break;
    case Family::Sigma:
      // eps = {em, emp, e1, e2}: gauge rotation signs then base signs.
      cs.W = cells_sigma_family(g, params.theta, e[0], e[1], e[2], e[3]);
      break;
    case Family::E8:
      cs.W = cells_E8(g, e[0], e[1], params.tau);
      break;
    case Family::E8c:
      cs.W = cells_E8c(g, params.theta, e[0], e[1], e[2]);
      break;
    case Family::E14:
      cs.W = cells_E14(g, params.theta, e[0], e[1], e[2]);
      break;
    case Family::E14c:
      cs.W = cells_E14c(g, e[0], e[1], e[2], params.tau);
      break;
  }
  return cs;
}

std::string cells_to_json(const Graph& g, const CellSystem& cs) {
  JsonWriter w;
  w.begin_obj();
  w.key("cells").begin_arr();
  for (const auto& [key, v] : cs.W) {
    w.begin_obj();
    w.key("im").value(v.imag());
    w.key("loop").begin_arr();
    for (int e : key) w.value(e);
    w.end_arr();
    w.key("names").begin_arr();
    for (int e : key) w.value(g.edge_names[e]);
    w.end_arr();
    w.key("re").value(v.real());
    w.end_obj();
  }
  w.end_arr();
  w.key("graph").begin_obj();
  w.key("family").value(family_name(cs.family));
  w.key("m").value(cs.m);
  w.end_obj();
  w.key("params").begin_obj();
  w.key("eps").begin_arr();
  for (int e : cs.params.eps) w.value(e);
  w.end_arr();
  w.key("tau").value(cs.params.tau);
  w.key("theta").value(cs.params.theta);
  w.end_obj();
  w.key("schema").value("so3cat/1");
  w.end_obj();
  return w.str();
}

}  // namespace so3cat

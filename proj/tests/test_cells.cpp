#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "so3cat/cells.hpp"
#include "so3cat/qnum.hpp"

using namespace so3cat;

namespace {
double max_rel(const Graph& g, const CellMap& W) {
  return rel_residuals(g, W).max();
}
}  // namespace

TEST_CASE("loop canonicalization") {
  CHECK(canon_loop(2, 0, 1) == LoopKey{0, 1, 2});
  CHECK(canon_loop(1, 2, 0) == LoopKey{0, 1, 2});
  CHECK(canon_loop(3, 3, 3) == LoopKey{3, 3, 3});
  const Graph g = graph_A(2);
  CHECK(all_loops(g).size() == 6);
  CHECK(all_loops(graph_E8()).size() == 9);
}

TEST_CASE("canonical bilinear forms sum to the loop weight") {
  for (int m = 1; m <= 6; ++m)
    for (const Graph& g : {graph_A(m), graph_sigma(m)})
      CHECK(loop_sum_residual(g, canonical_forms(g)) < 1e-9);
  for (const Graph& g : {graph_E8(), graph_E8c(), graph_E14(), graph_E14c()})
    CHECK(loop_sum_residual(g, canonical_forms(g)) < 1e-9);
}

TEST_CASE("pinned cell values") {
  const Graph g = graph_A(2);
  const CellMap W = cells_A(g);
  // W(c0, s1, c0~) = sqrt([3]) at l=1 (here [1][3][4]/[4] under the root)
  const double w011 = std::sqrt(qnum(2, 2) * qnum(1, 2) * qnum(3, 2) *
                                qnum(4, 2) / (qnum(4, 2) * qnum(2, 2)));
  CHECK(cell_value(W, g.edge_id("c0"), g.edge_id("s1"), g.edge_id("c0~"))
            .real() == doctest::Approx(w011));
  // triangle cell = [2m]/[2]
  CHECK(cell_value(W, g.edge_id("t+"), g.edge_id("gpm"), g.edge_id("t-~"))
            .real() == doctest::Approx(qnum(4, 2) / qnum(2, 2)));
  const Graph e8 = graph_E8();
  const CellMap We = cells_E8(e8);
  // W(s4,s4,s4) = -[6] sqrt([10]) / sqrt([2]^3 [5])
  const double w444 = -qnum(6, 4) * std::sqrt(qnum(10, 4)) /
                      std::sqrt(std::pow(qnum(2, 4), 3) * qnum(5, 4));
  CHECK(
      cell_value(We, e8.edge_id("s4"), e8.edge_id("s4"), e8.edge_id("s4"))
          .real() == doctest::Approx(w444));
}

TEST_CASE("closed forms satisfy the relations: A family") {
  for (int m = 1; m <= 6; ++m) {
    const Graph g = graph_A(m);
    CHECK(max_rel(g, cells_A(g)) < 1e-9);
    CHECK(star_residual(g, cells_A(g)) < 1e-12);
  }
  // complex triangle phase and a sign gauge
  const Graph g3 = graph_A(3);
  const Cplx tau = std::polar(1.0, M_PI / 5);
  CHECK(max_rel(g3, cells_A(g3, tau)) < 1e-9);
  const Graph g4 = graph_A(4);
  CHECK(max_rel(g4, cells_A(g4, 1.0, {1, -1, 1, -1})) < 1e-9);
}

TEST_CASE("closed forms satisfy the relations: sigma family") {
  for (int m = 1; m <= 6; ++m) {
    const Graph g = graph_sigma(m);
    const auto d = sigma_double_w20(m);
    CHECK(max_rel(g, cells_sigma(g, {d[0], d[1], d[2], d[3]})) < 1e-9);
  }
  const Graph g3 = graph_sigma(3);
  const auto dm = sigma_double_w20(3, -1, -1);
  CHECK(max_rel(g3, cells_sigma(g3, {dm[0], dm[1], dm[2], dm[3]})) < 1e-9);
  const auto d3 = sigma_double_w20(3);
  CHECK(max_rel(g3, cells_sigma(g3, {d3[0], d3[1], d3[2], d3[3]},
                                {1, 1, -1})) < 1e-9);
}

TEST_CASE("sigma theta-family stays on shell") {
  for (int m : {2, 3}) {
    const Graph g = graph_sigma(m);
    for (double theta : {0.0, M_PI / 7, 1.1})
      for (int em : {1, -1})
        for (int emp : {1, -1})
          CHECK(max_rel(g, cells_sigma_family(g, theta, em, emp)) < 1e-9);
  }
}

TEST_CASE("closed forms satisfy the relations: exceptional graphs") {
  const Graph e8 = graph_E8();
  CHECK(max_rel(e8, cells_E8(e8)) < 1e-9);
  CHECK(max_rel(e8, cells_E8(e8, -1, -1)) < 1e-9);
  CHECK(max_rel(e8, cells_E8(e8, 1, 1, std::polar(1.0, 0.7))) < 1e-9);
  CHECK(star_residual(e8, cells_E8(e8)) < 1e-12);

  const Graph e8c = graph_E8c();
  for (double theta : {0.0, M_PI / 7, M_PI / 3})
    for (int e1 : {1, -1})
      for (int e2 : {1, -1})
        CHECK(max_rel(e8c, cells_E8c(e8c, theta, e1, e2)) < 1e-9);

  const Graph e14 = graph_E14();
  for (double theta : {0.0, M_PI / 7, M_PI / 3})
    for (int e2 : {1, -1})
      for (int e3 : {1, -1})
        CHECK(max_rel(e14, cells_E14(e14, theta, 1, e2, e3)) < 1e-9);

  const Graph e14c = graph_E14c();
  CHECK(max_rel(e14c, cells_E14c(e14c)) < 1e-9);
  CHECK(max_rel(e14c, cells_E14c(e14c, -1, -1, -1)) < 1e-9);
  CHECK(max_rel(e14c, cells_E14c(e14c, 1, 1, 1, std::polar(1.0, 0.3))) <
        1e-9);
  CHECK(star_residual(e14c, cells_E14c(e14c)) < 1e-12);
}

TEST_CASE("product constraints on triangle cells") {
  for (int m = 2; m <= 5; ++m) {
    const Graph g = graph_A(m);
    const CellMap W = cells_A(g, std::polar(1.0, 0.4));
    const Cplx p =
        cell_value(W, g.edge_id("t+"), g.edge_id("gpm"), g.edge_id("t-~")) *
        cell_value(W, g.edge_id("t-"), g.edge_id("gpm~"), g.edge_id("t+~"));
    const double want = std::pow(qnum(2 * m, m) / qnum(2, m), 2);
    CHECK(std::abs(p - want) < 1e-9);
  }
  const Graph e8 = graph_E8();
  const CellMap We = cells_E8(e8);
  const Cplx p =
      cell_value(We, e8.edge_id("e23"), e8.edge_id("e34"), e8.edge_id("e24~")) *
      cell_value(We, e8.edge_id("e24"), e8.edge_id("e34~"), e8.edge_id("e23~"));
  CHECK(std::abs(p - qnum(3, 4) * qnum(6, 4) / qnum(4, 4)) < 1e-9);
}

TEST_CASE("perturbation breaks R1") {
  const Graph g = graph_A(2);
  CellMap W = cells_A(g);
  W.begin()->second += 0.1;
  CHECK(rel_residuals(g, W).r1 > 1e-3);
}

TEST_CASE("gauge covariance of the relations") {
  const Graph g = graph_sigma(2);
  const auto d = sigma_double_w20(2);
  const CellMap W = cells_sigma(g, {d[0], d[1], d[2], d[3]});
  // identity gauge: unchanged
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(g.ne(), g.ne());
  const CellMap Wid = gauge_transform(g, W, id);
  for (const auto& [k, v] : W) CHECK(std::abs(Wid.at(k) - v) < 1e-14);
  // orthogonal double-loop gauge: residuals stay at solution level
  for (double theta : {0.4, 1.2})
    for (int em : {1, -1})
      CHECK(max_rel(g, double_loop_gauge(g, W, u_theta(theta, em, 1))) <
            1e-9);
  // the quartet transforms by the cubic rule
  const Eigen::Matrix2d u = u_theta(0.7, 1, -1);
  const CellMap Wg = double_loop_gauge(g, W, u);
  const int ig = g.edge_id("g"), igp = g.edge_id("g'");
  const auto got = std::array<Cplx, 4>{
      cell_value(Wg, ig, ig, ig), cell_value(Wg, ig, ig, igp),
      cell_value(Wg, ig, igp, igp), cell_value(Wg, igp, igp, igp)};
  const auto want = double_loop_cubic(
      {cell_value(W, ig, ig, ig), cell_value(W, ig, ig, igp),
       cell_value(W, ig, igp, igp), cell_value(W, igp, igp, igp)},
      u);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);
}

TEST_CASE("closed-form dispatcher covers every family") {
  for (const Graph& g : {graph_A(2), graph_sigma(2), graph_E8(), graph_E8c(),
                         graph_E14(), graph_E14c()}) {
    CellParams p;
    p.theta = 0.3;
    const CellSystem cs = cell_closed_form(g, p);
    CHECK(max_rel(g, cs.W) < 1e-9);
    CHECK(cs.W.size() == all_loops(g).size());
  }
}

TEST_CASE("json export shape") {
  const Graph g = graph_A(1);
  const CellSystem cs = cell_closed_form(g, {});
  const std::string js = cells_to_json(g, cs);
  CHECK(js.find("\"schema\":\"so3cat/1\"") != std::string::npos);
  CHECK(js.find("\"cells\":[") != std::string::npos);
  CHECK(js.find("\"loop\":[") != std::string::npos);
  CHECK(js.find("\"re\":") != std::string::npos);
}

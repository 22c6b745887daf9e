// Gauge-equivalence search and the random-restart cell solver.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "so3cat/cells.hpp"
#include "so3cat/solve.hpp"

using namespace so3cat;

namespace {

double map_distance(const CellMap& a, const CellMap& b) {
  double d = 0.0;
  for (const auto& [k, v] : a) d = std::max(d, std::abs(v - b.at(k)));
  return d;
}

// Check that the returned gauge matrix really certifies the match.
void check_certificate(const Graph& g, const CellMap& w1, const CellMap& w2,
                       double tol = 1e-6) {
  auto match = find_equivalence(g, w1, w2, tol);
  REQUIRE(match.has_value());
  CHECK(match->residual < tol);
  CellMap moved = gauge_transform(g, w1, match->M);
  CHECK(map_distance(moved, w2) < 10 * tol);
}

}  // namespace

TEST_CASE("identity equivalence") {
  for (Family f : {Family::A, Family::Sigma}) {
    Graph g = make_graph(f, 2);
    CellMap w = cell_closed_form(g).W;
    auto match = find_equivalence(g, w, w);
    REQUIRE(match.has_value());
    CHECK(match->residual < 1e-12);
  }
}

TEST_CASE("self-loop sign flips are gauge") {
  Graph g = graph_A(2);
  check_certificate(g, cells_A(g, 1.0, {1, -1}), cells_A(g));

  Graph g6 = graph_A(3);
  check_certificate(g6, cells_A(g6, 1.0, {1, -1, -1}), cells_A(g6));

  Graph s = graph_sigma(3);
  check_certificate(s, cells_sigma_family(s, 0.0, 1, 1, 1, 1, {-1, 1, 1}),
                    cells_sigma_family(s, 0.0));
}

TEST_CASE("triangle phase is gauge") {
  Graph g = graph_A(2);
  Cplx tau = std::polar(1.0, 0.4);
  check_certificate(g, cells_A(g, tau), cells_A(g));

  Graph e = graph_E8();
  check_certificate(e, cells_E8(e, 1, 1, std::polar(1.0, 1.3)), cells_E8(e));
}

TEST_CASE("double-loop rotations are gauge") {
  Graph s = graph_sigma(2);
  CellMap base = cells_sigma_family(s, 0.0);
  for (double theta : {0.9, 2.4}) {
    check_certificate(s, cells_sigma_family(s, theta), base);
  }
  // Reflection component (det -1 block).
  check_certificate(s, cells_sigma_family(s, 0.7, -1, 1), base);
  check_certificate(s, cells_sigma_family(s, 0.0, 1, -1), base);

  Graph e = graph_E8c();
  check_certificate(e, cells_E8c(e, 1.1), cells_E8c(e));
}

TEST_CASE("perturbed cells are not equivalent") {
  Graph g = graph_A(2);
  CellMap w = cells_A(g);
  CellMap bad = w;
  for (auto& [k, v] : bad) v += 0.5;
  CHECK_FALSE(find_equivalence(g, w, bad).has_value());
}

TEST_CASE("solver rediscovers the A_4 cell system") {
  Graph g = graph_A(2);
  SolveConfig cfg;
  cfg.restarts = 24;
  cfg.seed = 7;
  SolveResult res = solve_cells(g, cfg);
  CHECK(res.converged > 0);
  REQUIRE(res.representatives.size() == 1);
  int total = 0;
  for (int c : res.multiplicity) total += c;
  CHECK(total == res.converged);
  CHECK(rel_residuals(g, res.representatives[0]).max() < 1e-8);
  CHECK(find_equivalence(g, res.representatives[0], cells_A(g)).has_value());
}

TEST_CASE("solver rediscovers the sigma_4 cell system") {
  Graph g = graph_sigma(2);
  SolveConfig cfg;
  cfg.restarts = 24;
  cfg.seed = 3;
  SolveResult res = solve_cells(g, cfg);
  CHECK(res.converged > 0);
  REQUIRE(res.representatives.size() == 1);
  CHECK(rel_residuals(g, res.representatives[0]).max() < 1e-8);
  CHECK(find_equivalence(g, res.representatives[0], cells_sigma_family(g, 0.0))
            .has_value());
}

TEST_CASE("solver restarts are deterministic") {
  Graph g = graph_A(1);
  SolveConfig cfg;
  cfg.restarts = 8;
  cfg.seed = 11;
  SolveResult a = solve_cells(g, cfg);
  SolveResult b = solve_cells(g, cfg);
  REQUIRE(a.representatives.size() == b.representatives.size());
  REQUIRE(a.representatives.size() == 1);
  CHECK(map_distance(a.representatives[0], b.representatives[0]) == 0.0);
  CHECK(find_equivalence(g, a.representatives[0], cells_A(g)).has_value());
}

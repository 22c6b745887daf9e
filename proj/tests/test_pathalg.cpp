// Path spaces, SO(3)-TL generators, Jones-Wenzl tower, Markov trace, BMW
// images, and the extra generator t.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "so3cat/cells.hpp"
#include "so3cat/pathalg.hpp"
#include "so3cat/qnum.hpp"

using namespace so3cat;

namespace {

CellMap sigma_base(const Graph& g) {
  const auto d = sigma_double_w20(g.m);
  return cells_sigma(g, {Cplx(d[0]), Cplx(d[1]), Cplx(d[2]), Cplx(d[3])});
}

void check_all(const std::map<std::string, double>& rep, double tol) {
  for (const auto& [name, v] : rep) {
    INFO(name);
    CHECK(v < tol);
  }
}

}  // namespace

TEST_CASE("path space sizes") {
  Graph g = graph_A(2);
  PathBlocks p2 = path_blocks(g, 2);
  CHECK(p2.total_paths() == 25);
  PathBlocks p4 = path_blocks(g, 4);
  CHECK(p4.total_paths() == 169);
  int largest = 0;
  for (const auto& [k, v] : p4.blocks)
    largest = std::max(largest, static_cast<int>(v.size()));
  CHECK(largest == 25);

  CHECK(path_blocks(graph_A(3), 6).total_paths() == 2087);
  CHECK(path_blocks(graph_E8(), 4).total_paths() == 246);

  PathBlocks p0 = path_blocks(g, 0);
  CHECK(p0.total_paths() == g.nv);
  for (const auto& [k, v] : p0.blocks) CHECK(k.first == k.second);
}

TEST_CASE("e operator pinned entry on A_4") {
  Graph g = graph_A(2);
  PathBlocks pb = path_blocks(g, 2);
  BlockOpR e1 = e_operator<double>(g, 1, pb);
  // Block (v0, v0) holds the single backtrack (c0, c0~); the e_1 weight is
  // phi(v1)/phi(v0) = [3].
  int c0 = g.edge_id("c0");
  BlockKey k{g.src[c0], g.src[c0]};
  const auto& M = e1.mats.at(k);
  REQUIRE(M.rows() == 1);
  CHECK(M(0, 0) == doctest::Approx(qnum(3, 2)).epsilon(1e-12));
}

TEST_CASE("TL and BMW relations on the m=2 graphs") {
  Graph a = graph_A(2);
  check_all(tl_relation_residuals(a, cells_A(a), 4), 1e-10);
  Graph s = graph_sigma(2);
  check_all(tl_relation_residuals(s, sigma_base(s), 4), 1e-10);
}

TEST_CASE("TL relations with complex cells and at m=1") {
  Graph a = graph_A(2);
  check_all(tl_relation_residuals(a, cells_A(a, std::polar(1.0, 0.37)), 4),
            1e-10);
  Graph a2 = graph_A(1);  // [6] = 0 here; cleared relation forms still hold
  check_all(tl_relation_residuals(a2, cells_A(a2), 4), 1e-10);
}

TEST_CASE("TL relations on the exceptional graphs") {
  Graph e8 = graph_E8();
  check_all(tl_relation_residuals(e8, cells_E8(e8), 4), 1e-10);
  Graph e14c = graph_E14c();
  check_all(tl_relation_residuals(e14c, cells_E14c(e14c), 4), 1e-10);
}

TEST_CASE("Markov property over full matrix-unit bases") {
  CHECK(markov_residual(graph_A(2), 5) < 1e-11);
  CHECK(markov_residual(graph_sigma(2), 5) < 1e-11);
  CHECK(markov_residual(graph_A(1), 5) < 1e-11);
}

TEST_CASE("Jones-Wenzl tower traces, kills, projections") {
  Graph a = graph_A(2);
  JWReport ra = jw_tower_residuals(a, cells_A(a), 4);
  CHECK(ra.trace < 1e-10);
  CHECK(ra.kills < 1e-10);
  CHECK(ra.projection < 1e-10);

  Graph s = graph_sigma(2);
  JWReport rs = jw_tower_residuals(s, sigma_base(s), 4);
  CHECK(rs.trace < 1e-10);
  CHECK(rs.kills < 1e-10);
  CHECK(rs.projection < 1e-10);

  Graph a2 = graph_A(1);
  JWReport r2 = jw_tower_residuals(a2, cells_A(a2), 2);
  CHECK(r2.trace < 1e-10);
  CHECK(r2.kills < 1e-10);
}

TEST_CASE("tower embedding agrees with the in-place recursion") {
  Graph g = graph_A(2);
  CellMap W = cells_A(g);
  const int n = 4;
  PathBlocks pb = path_blocks(g, n);
  // Recursion run entirely inside the depth-4 space.
  BlockOpR F = BlockOpR::identity(pb);
  for (int j = 1; j < n; ++j) {
    const double c1 =
        qnum(4 * j, g.m) / (qnum(2 * j + 1, g.m) * qnum(2 * j + 2, g.m));
    const double c2 = qnum(4, g.m) * qnum(2 * j, g.m) /
                      (qnum(2, g.m) * qnum(2 * j + 2, g.m));
    BlockOpR e = e_operator<double>(g, j, pb);
    BlockOpR u = u_operator<double>(g, W, j, pb);
    F = F - (F * e * F) * c1 - (F * u * F) * c2;
  }
  auto tower = jones_wenzl_tower<double>(g, W, n);
  BlockOpR lifted =
      embed_operator(g, tower.F[n], tower.spaces[n], pb);
  CHECK(op_distance(lifted, F) < 1e-12);
}

TEST_CASE("markov trace of the identity") {
  Graph g = graph_sigma(3);
  PathBlocks pb = path_blocks(g, 3);
  BlockOpR I = BlockOpR::identity(pb);
  for (int v = 0; v < g.nv; ++v) {
    // Per-vertex trace of F_1 = identity on depth 1 equals [3].
    PathBlocks p1 = path_blocks(g, 1);
    CHECK(vertex_trace(g, BlockOpR::identity(p1), v) ==
          doctest::Approx(loop_weight(g.m)).epsilon(1e-12));
  }
  // Weighted normalized trace sums phi_y/phi_x [3]^{-n} over closed paths.
  double direct = 0.0;
  for (const auto& [k, v] : pb.blocks)
    direct += static_cast<double>(v.size()) * g.phi(k.second) / g.phi(k.first);
  direct *= std::pow(loop_weight(g.m), -3);
  CHECK(markov_trace(g, I, 3) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("t operator on A_2 and A_4") {
  for (int m : {1, 2}) {
    Graph g = graph_A(m);
    CellMap W = cells_A(g);
    TOperator t = t_operator_solve(g, W, 0, 30);
    INFO("m=" << m);
    CHECK(t.solver_residual < 1e-9);
    CHECK(t.square_residual < 1e-8);
    CHECK(t.word_residual < 1e-8);
    REQUIRE(static_cast<int>(t.vertex_ranks.size()) == g.nv);
    for (int r : t.vertex_ranks) CHECK(r == 1);
    CHECK(std::abs(t.total_trace) < 1e-6);
    // Block traces are integers in {-1, 0, +1}.
    for (const auto& [k, tr] : t.block_traces) {
      CHECK(std::abs(tr - std::round(tr)) < 1e-6);
      CHECK(std::abs(tr) < 1.5);
    }
    // T is supported on range(F_m): T F_m = T.
    auto tower = jones_wenzl_tower<double>(g, W, m);
    CHECK(op_distance(t.T * tower.F[m], t.T) < 1e-8);
  }
}

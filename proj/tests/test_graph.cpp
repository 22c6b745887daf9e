#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "so3cat/graph.hpp"
#include "so3cat/qnum.hpp"

using namespace so3cat;

TEST_CASE("family names round-trip") {
  for (Family f : {Family::A, Family::Sigma, Family::E8, Family::E8c,
                   Family::E14, Family::E14c})
    CHECK(parse_family(family_name(f)) == f);
  CHECK(parse_family("sigma") == Family::Sigma);
  CHECK_THROWS(parse_family("nonsense"));
}

TEST_CASE("sizes and edge bookkeeping") {
  const Graph a2 = graph_A(2);
  CHECK(a2.nv == 4);
  CHECK(a2.ne() == 9);  // bond c0 (2), loop s1 (1), bonds t+,t-,gpm (6)
  CHECK(a2.partner[a2.edge_id("c0")] == a2.edge_id("c0~"));
  CHECK(a2.partner[a2.edge_id("s1")] == a2.edge_id("s1"));
  CHECK(a2.edge_id("s1~") == a2.edge_id("s1"));
  const Graph s2 = graph_sigma(2);
  CHECK(s2.nv == 2);
  CHECK(s2.ne() == 5);  // bond c0 (2), loop s0, double loop g, g'
  CHECK(graph_E8().nv == 4);
  CHECK(graph_E8c().nv == 3);
  CHECK(graph_E14().nv == 4);
  CHECK(graph_E14c().nv == 4);
}

TEST_CASE("Perron-Frobenius equation at every level") {
  for (int m = 1; m <= 8; ++m) {
    CHECK(pf_residual(graph_A(m)) < 1e-9);
    CHECK(pf_residual(graph_sigma(m)) < 1e-9);
  }
  CHECK(pf_residual(graph_E8()) < 1e-9);
  CHECK(pf_residual(graph_E8c()) < 1e-9);
  CHECK(pf_residual(graph_E14()) < 1e-9);
  CHECK(pf_residual(graph_E14c()) < 1e-9);
}

TEST_CASE("pinned PF weights") {
  const Graph g = graph_A(2);  // phi = (1, [3], [4]/[2], [4]/[2])
  CHECK(g.phi[0] == doctest::Approx(1.0));
  CHECK(g.phi[1] == doctest::Approx(2.618033988749895));
  CHECK(g.phi[2] == doctest::Approx(qnum(4, 2) / qnum(2, 2)));
  const Graph e8 = graph_E8();
  CHECK(e8.phi[2] == doctest::Approx(qnum(4, 4) / qnum(2, 4)));
}

TEST_CASE("spectrum matches exponents") {
  for (int m = 1; m <= 8; ++m)
    for (const Graph& g : {graph_A(m), graph_sigma(m)}) {
      const Eigen::VectorXd got = spectrum(g);
      const Eigen::VectorXd want = spectrum_from_exponents(g);
      REQUIRE(got.size() == want.size());
      CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-9);
    }
  for (const Graph& g :
       {graph_E8(), graph_E8c(), graph_E14(), graph_E14c()}) {
    const Eigen::VectorXd got = spectrum(g);
    const Eigen::VectorXd want = spectrum_from_exponents(g);
    CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("exponent lists") {
  // A_{2m}: 1..m+1 with m+1 doubled; sigma: 1..m.
  const auto ea = exponents(graph_A(3));
  CHECK(ea == std::vector<int>({1, 2, 3, 4, 4}));
  const auto es = exponents(graph_sigma(3));
  CHECK(es == std::vector<int>({1, 2, 3}));
  CHECK(exponents(graph_E8()) == std::vector<int>({1, 3, 4, 5}));
  CHECK(exponents(graph_E8c()) == std::vector<int>({1, 3, 4}));
  CHECK(exponents(graph_E14()) == std::vector<int>({1, 4, 6, 7}));
  CHECK(exponents(graph_E14c()) == std::vector<int>({1, 4, 6, 7}));
}

TEST_CASE("spectrum inside [-1, 3)") {
  for (int m = 1; m <= 8; ++m)
    for (const Graph& g : {graph_A(m), graph_sigma(m)}) {
      const Eigen::VectorXd ev = spectrum(g);
      CHECK(ev.minCoeff() >= -1.0 - 1e-12);
      CHECK(ev.maxCoeff() < 3.0);
    }
}

TEST_CASE("graphs_at_level") {
  CHECK(graphs_at_level(2).size() == 2);
  CHECK(graphs_at_level(4).size() == 4);
  CHECK(graphs_at_level(7).size() == 4);
}

TEST_CASE("dot export mentions every vertex") {
  const Graph g = graph_E8();
  const std::string dot = to_dot(g);
  CHECK(dot.find("graph") != std::string::npos);
  for (const auto& vn : g.vertex_names)
    CHECK(dot.find(vn) != std::string::npos);
}

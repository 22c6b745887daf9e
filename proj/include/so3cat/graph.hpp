#pragma once
// Nimrep graphs for the SO(3) level-2m series: the two infinite families
// A_{2m} and sigma_{2m} and the four exceptionals E8, E8c (m=4), E14, E14c
// (m=7).  Each undirected bond contributes two partnered directed edges; a
// self-loop is a single directed edge that is its own partner (a double
// self-loop is two such edges).  Vertices carry the Perron-Frobenius weights
// normalized so the adjacency eigenvalue is [3]_q.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace so3cat {

enum class Family { A, Sigma, E8, E8c, E14, E14c };

std::string family_name(Family f);
// Parse "A", "sigma", "E8", "E8c", "E14", "E14c" (case-insensitive).
Family parse_family(const std::string& s);

struct Graph {
  Family family{Family::A};
  int m = 1;   // level parameter: category SO(3)_{2m}
  int nv = 0;  // number of vertices
  Eigen::VectorXd phi;              // Perron-Frobenius weights
  std::vector<int> src, dst;        // directed edges
  std::vector<int> partner;         // reversal involution (loops: self)
  std::vector<std::string> edge_names;
  std::vector<std::string> vertex_names;

  int ne() const { return static_cast<int>(src.size()); }
  std::vector<int> edges_from(int x) const;
  Eigen::MatrixXd adjacency() const;

  int add_bond(int x, int y, const std::string& name);
  int add_loop(int x, const std::string& name);
  int edge_id(const std::string& name) const;  // name or "name~" for reverse
};

Graph graph_A(int m);
Graph graph_sigma(int m);
Graph graph_E8();
Graph graph_E8c();
Graph graph_E14();
Graph graph_E14c();
// family + m dispatch (m ignored for exceptionals; must match their level).
Graph make_graph(Family f, int m);
// All graphs defined at level m (A, sigma, plus exceptionals when they exist).
std::vector<Graph> graphs_at_level(int m);

// max |adjacency*phi - [3]_q*phi|
double pf_residual(const Graph& g);

// Adjacency eigenvalues, ascending.
Eigen::VectorXd spectrum(const Graph& g);

// Expected eigenvalue list {1 + 2cos(2 pi (2j-1) / (4m+2)) : j in exps},
// ascending, where exps is the exponent multiset of the graph.
std::vector<int> exponents(const Graph& g);
Eigen::VectorXd spectrum_from_exponents(const Graph& g);

// DOT rendering of the underlying undirected multigraph.
std::string to_dot(const Graph& g);

}  // namespace so3cat

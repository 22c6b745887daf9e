#include "so3cat/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "so3cat/qnum.hpp"

namespace so3cat {

std::string family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::Sigma: return "sigma";
    case Family::E8: return "E8";
    case Family::E8c: return "E8c";
    case Family::E14: return "E14";
    case Family::E14c: return "E14c";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(c)));
  if (t == "a") return Family::A;
  if (t == "sigma" || t == "s") return Family::Sigma;
  if (t == "e8") return Family::E8;
  if (t == "e8c") return Family::E8c;
  if (t == "e14") return Family::E14;
  if (t == "e14c") return Family::E14c;
  throw std::invalid_argument("unknown graph family: " + s);
}

std::vector<int> Graph::edges_from(int x) const {
  std::vector<int> out;
  for (int e = 0; e < ne(); ++e)
    if (src[e] == x) out.push_back(e);
  return out;
}

Eigen::MatrixXd Graph::adjacency() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nv, nv);
  for (int e = 0; e < ne(); ++e) d(src[e], dst[e]) += 1.0;
  return d;
}

int Graph::add_bond(int x, int y, const std::string& name) {
  const int i = ne();
  src.push_back(x);
  dst.push_back(y);
  src.push_back(y);
  dst.push_back(x);
  partner.push_back(i + 1);
  partner.push_back(i);
  edge_names.push_back(name);
  edge_names.push_back(name + "~");
  return i;
}

int Graph::add_loop(int x, const std::string& name) {
  const int i = ne();
  src.push_back(x);
  dst.push_back(x);
  partner.push_back(i);
  edge_names.push_back(name);
  return i;
}

int Graph::edge_id(const std::string& name) const {
  for (int e = 0; e < ne(); ++e)
    if (edge_names[e] == name) return e;
  // "x~" for a self-loop x is the loop itself (its own partner).
  if (name.size() > 1 && name.back() == '~')
    return partner[edge_id(name.substr(0, name.size() - 1))];
  throw std::invalid_argument("unknown edge name: " + name);
}

Graph graph_A(int m) {
  Graph g;
  g.family = Family::A;
  g.m = m;
  g.nv = m + 2;
  g.phi.resize(m + 2);
  for (int l = 0; l < m; ++l) g.phi[l] = qnum(2 * l + 1, m);
  g.phi[m] = g.phi[m + 1] = qnum(2 * m, m) / qnum(2, m);
  for (int l = 0; l < m; ++l) g.vertex_names.push_back("v" + std::to_string(l));
  g.vertex_names.push_back("p+");
  g.vertex_names.push_back("p-");
  for (int l = 0; l + 1 < m; ++l) g.add_bond(l, l + 1, "c" + std::to_string(l));
  for (int l = 1; l < m; ++l) g.add_loop(l, "s" + std::to_string(l));
  g.add_bond(m - 1, m, "t+");
  g.add_bond(m - 1, m + 1, "t-");
  g.add_bond(m, m + 1, "gpm");
  return g;
}

Graph graph_sigma(int m) {
  Graph g;
  g.family = Family::Sigma;
  g.m = m;
  g.nv = m;
  g.phi.resize(m);
  for (int i = 0; i < m; ++i) g.phi[i] = qnum(2 * (i + 1), m) / qnum(2, m);
  for (int i = 0; i < m; ++i) g.vertex_names.push_back("u" + std::to_string(i + 1));
  for (int i = 0; i + 1 < m; ++i) g.add_bond(i, i + 1, "c" + std::to_string(i));
  for (int i = 0; i + 1 < m; ++i) g.add_loop(i, "s" + std::to_string(i));
  g.add_loop(m - 1, "g");
  g.add_loop(m - 1, "g'");
  return g;
}

Graph graph_E8() {
  const int m = 4;
  Graph g;
  g.family = Family::E8;
  g.m = m;
  g.nv = 4;
  g.phi.resize(4);
  g.phi << 1.0, qnum(3, m), qnum(4, m) / qnum(2, m), qnum(6, m) / qnum(2, m);
  g.vertex_names = {"1", "2", "3", "4"};
  g.add_bond(0, 1, "e12");
  g.add_loop(1, "s2");
  g.add_bond(1, 2, "e23");
  g.add_bond(1, 3, "e24");
  g.add_bond(2, 3, "e34");
  g.add_loop(3, "s4");
  return g;
}

Graph graph_E8c() {
  const int m = 4;
  Graph g;
  g.family = Family::E8c;
  g.m = m;
  g.nv = 3;
  g.phi.resize(3);
  g.phi << 1.0, qnum(3, m), qnum(2, m) * qnum(3, m) / qnum(4, m);
  g.vertex_names = {"1", "2", "3"};
  g.add_bond(0, 1, "e12");
  g.add_loop(1, "g");
  g.add_loop(1, "g'");
  g.add_bond(1, 2, "e23");
  g.add_loop(2, "s3");
  return g;
}

Graph graph_E14() {
  const int m = 7;
  Graph g;
  g.family = Family::E14;
  g.m = m;
  g.nv = 4;
  g.phi.resize(4);
  g.phi << 1.0, qnum(3, m), qnum(5, m), qnum(12, m) / qnum(6, m);
  g.vertex_names = {"1", "2", "3", "4"};
  g.add_bond(0, 1, "e12");
  g.add_loop(1, "s2");
  g.add_bond(1, 2, "e23");
  g.add_loop(2, "g");
  g.add_loop(2, "g'");
  g.add_bond(2, 3, "e34");
  return g;
}

Graph graph_E14c() {
  const int m = 7;
  Graph g;
  g.family = Family::E14c;
  g.m = m;
  g.nv = 4;
  g.phi.resize(4);
  g.phi << 1.0, qnum(4, m) / qnum(2, m),
      qnum(3, m) * qnum(4, m) / (qnum(2, m) * qnum(5, m)),
      qnum(2, m) * qnum(4, m) / qnum(5, m);
  g.vertex_names = {"1", "2", "3", "4"};
  g.add_loop(0, "s1");
  g.add_bond(0, 1, "e12");
  g.add_loop(1, "s2");
  g.add_bond(1, 2, "e23");
  g.add_bond(1, 3, "e24");
  g.add_bond(2, 3, "e34");
  g.add_loop(3, "s4");
  return g;
}

Graph make_graph(Family f, int m) {
  switch (f) {
    case Family::A: return graph_A(m);
    case Family::Sigma: return graph_sigma(m);
    case Family::E8:
      if (m != 4) throw std::invalid_argument("E8 exists at m=4 only");
      return graph_E8();
    case Family::E8c:
      if (m != 4) throw std::invalid_argument("E8c exists at m=4 only");
      return graph_E8c();
    case Family::E14:
      if (m != 7) throw std::invalid_argument("E14 exists at m=7 only");
      return graph_E14();
    case Family::E14c:
      if (m != 7) throw std::invalid_argument("E14c exists at m=7 only");
      return graph_E14c();
  }
  throw std::invalid_argument("bad family");
}

std::vector<Graph> graphs_at_level(int m) {
  std::vector<Graph> gs{graph_A(m), graph_sigma(m)};
  if (m == 4) {
    gs.push_back(graph_E8());
    gs.push_back(graph_E8c());
  }
  if (m == 7) {
    gs.push_back(graph_E14());
    gs.push_back(graph_E14c());
  }
  return gs;
}

double pf_residual(const Graph& g) {
  const Eigen::VectorXd r =
      g.adjacency() * g.phi - loop_weight(g.m) * g.phi;
  return r.cwiseAbs().maxCoeff();
}

Eigen::VectorXd spectrum(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.adjacency());
  return es.eigenvalues();
}

std::vector<int> exponents(const Graph& g) {
  const int m = g.m;
  switch (g.family) {
    case Family::A: {
      std::vector<int> e;
      for (int j = 1; j <= m + 1; ++j) e.push_back(j);
      e.push_back(m + 1);  // top exponent is doubled
      return e;
    }
    case Family::Sigma: {
      std::vector<int> e;
      for (int j = 1; j <= m; ++j) e.push_back(j);
      return e;
    }
    case Family::E8: return {1, 3, 4, 5};
    case Family::E8c: return {1, 3, 4};
    case Family::E14: return {1, 4, 6, 7};
    case Family::E14c: return {1, 4, 6, 7};
  }
  return {};
}

Eigen::VectorXd spectrum_from_exponents(const Graph& g) {
  const std::vector<int> ex = exponents(g);
  Eigen::VectorXd v(static_cast<int>(ex.size()));
  const double pi = std::numbers::pi_v<double>;
  for (int i = 0; i < v.size(); ++i)
    v[i] = 1.0 + 2.0 * std::cos(2.0 * pi * (2 * ex[i] - 1) / (4 * g.m + 2));
  std::sort(v.begin(), v.end());
  return v;
}

std::string to_dot(const Graph& g) {
  std::ostringstream os;
  const auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  os << "graph \"" << family_name(g.family) << "_" << 2 * g.m << "\" {\n";
  for (int v = 0; v < g.nv; ++v)
    os << "  n" << v << " [label=\"" << g.vertex_names[v]
       << "\\nphi=" << num(g.phi[v]) << "\"];\n";
  for (int e = 0; e < g.ne(); ++e) {
    if (g.partner[e] < e) continue;  // one line per bond
    os << "  n" << g.src[e] << " -- n" << g.dst[e] << " [label=\""
       << g.edge_names[e] << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace so3cat

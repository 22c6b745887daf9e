#include "so3cat/suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "so3cat/cells.hpp"
#include "so3cat/invariants.hpp"
#include "so3cat/modular.hpp"
#include "so3cat/pathalg.hpp"
#include "so3cat/preproj.hpp"
#include "so3cat/qnum.hpp"
#include "so3cat/solve.hpp"

namespace so3cat {

OutputFormat parse_format(const std::string& s) {
  if (s == "text") return OutputFormat::Text;
  if (s == "json") return OutputFormat::Json;
  if (s == "dot") return OutputFormat::Dot;
  if (s == "csv") return OutputFormat::Csv;
  throw std::invalid_argument("unknown output format: " + s);
}

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Text: return "text";
    case OutputFormat::Json: return "json";
    case OutputFormat::Dot: return "dot";
    case OutputFormat::Csv: return "csv";
  }
  return "text";
}

namespace {

std::string graph_tag(const Graph& g) {
  return family_name(g.family) + "_" + std::to_string(2 * g.m);
}

int default_jmax(const RunConfig& cfg, const Graph& g) {
  return cfg.jw_jmax > 0 ? cfg.jw_jmax : std::min(2 * g.m, 4);
}

int default_hilbert_degree(const RunConfig& cfg, const Graph& g) {
  // The direct graded-dimension scan walks the full path space degree by
  // degree, so the default tops out at 10 (= 2m+2 for every level where the
  // full range is cheap); pass an explicit degree to go further.
  return cfg.hilbert_degree >= 0 ? cfg.hilbert_degree
                                 : std::min(2 * g.m + 2, 10);
}

}  // namespace

std::vector<Graph> suite_graphs(const RunConfig& cfg) {
  if (cfg.m < 1) throw std::invalid_argument("suite: level index m must be >= 1");
  if (!(cfg.tolerance > 0.0))
    throw std::invalid_argument("suite: tolerance must be positive");
  if (cfg.families.empty()) return graphs_at_level(cfg.m);
  std::vector<Graph> out;
  out.reserve(cfg.families.size());
  for (Family f : cfg.families) out.push_back(make_graph(f, cfg.m));
  return out;
}

void suite_modular(const RunConfig& cfg, Report& rep) {
  const std::string p = "m=" + std::to_string(cfg.m) + "/modular/";
  const double tol = cfg.tolerance;
  const ModularData md = modular_data(cfg.m);
  rep.checks.add(p + "unitarity", unitarity_residual(md), tol);
  rep.checks.add(p + "(ST)^3=S^2", stss_residual(md), tol);
  rep.checks.add(p + "S^2=C", s2c_residual(md), tol);
  rep.checks.add(p + "global-dim", global_dim_residual(md), tol);
  rep.checks.add(p + "fusion-integer", fusion_integrality(md), tol);
  rep.checks.add(p + "fusion-generator=A-adjacency",
                 fusion_generator_residual(md), tol);
  rep.checks.add(p + "branching", branching_residual(md), tol);
}

void suite_invariants(const RunConfig& cfg, Report& rep,
                      std::vector<Eigen::MatrixXi>* out) {
  const std::string p = "m=" + std::to_string(cfg.m) + "/invariants/";
  const ModularData md = modular_data(cfg.m);
  const auto zs = enumerate_invariants(md, cfg.invariant_bound);
  if (out) *out = zs;
  rep.checks.add_flag(p + "found", !zs.empty());
  double worst = 0.0;
  bool normalized = true;
  for (const auto& z : zs) {
    worst = std::max(worst, invariant_residual(md, z));
    normalized = normalized && z(0, 0) == 1 && z.minCoeff() >= 0;
  }
  rep.checks.add(p + "commute-with-S,T", worst, cfg.tolerance);
  rep.checks.add_flag(p + "normalized", normalized);
  std::ostringstream note;
  note << "m=" << cfg.m << ": " << zs.size()
       << " modular invariants (entries <= " << cfg.invariant_bound << ")";
  rep.notes.push_back(note.str());
}

void suite_graph(const RunConfig& cfg, const Graph& g, Report& rep) {
  const std::string p = graph_tag(g) + "/graph/";
  const double tol = cfg.tolerance;
  rep.checks.add(p + "pf-eigenvector", pf_residual(g), tol);
  const Eigen::VectorXd ev = spectrum(g);
  rep.checks.add_flag(p + "spectrum-in-[-1,3)",
                      ev.minCoeff() >= -1.0 - tol && ev.maxCoeff() < 3.0);
  const Eigen::VectorXd want = spectrum_from_exponents(g);
  rep.checks.add(p + "spectrum-matches-exponents",
                 (ev - want).cwiseAbs().maxCoeff(), tol);
}

void suite_cells(const RunConfig& cfg, const Graph& g, Report& rep) {
  const std::string p = graph_tag(g) + "/cells/";
  const double tol = cfg.tolerance;
  const CellSystem cs = cell_closed_form(g);
  const CellResiduals rr = rel_residuals(g, cs.W);
  rep.checks.add(p + "R1", rr.r1, tol);
  rep.checks.add(p + "R2", rr.r2, tol);
  rep.checks.add(p + "R3", rr.r3, tol);
  rep.checks.add(p + "star", star_residual(g, cs.W), tol);
}

void suite_solver(const RunConfig& cfg, const Graph& g, Report& rep) {
  const std::string p = graph_tag(g) + "/solve/";
  SolveConfig sc;
  sc.restarts = cfg.solver_restarts;
  sc.seed = cfg.seed;
  const SolveResult sr = solve_cells(g, sc);
  rep.checks.add_flag(p + "found-solutions", !sr.representatives.empty());
  const CellSystem cs = cell_closed_form(g);
  bool matched = !sr.representatives.empty();
  double worst = 0.0;
  for (const auto& W : sr.representatives) {
    const auto eq = find_equivalence(g, W, cs.W);
    if (!eq) {
      matched = false;
      continue;
    }
    worst = std::max(worst, eq->residual);
  }
  rep.checks.add_flag(p + "gauge-equivalent-to-closed-form", matched);
  std::ostringstream note;
  note << graph_tag(g) << ": solver found " << sr.representatives.size()
       << " gauge class(es) from " << sr.converged << "/" << sc.restarts
       << " converged restarts; worst match residual "
       << JsonWriter::number(worst);
  rep.notes.push_back(note.str());
}

void suite_pathalg(const RunConfig& cfg, const Graph& g, Report& rep) {
  const std::string p = graph_tag(g) + "/pathalg/";
  const double tol = cfg.tolerance;
  const CellSystem cs = cell_closed_form(g);
  const auto rel = tl_relation_residuals(g, cs.W, cfg.depth);
  double worst = 0.0;
  for (const auto& [name, v] : rel) worst = std::max(worst, v);
  rep.checks.add(p + "relations(depth=" + std::to_string(cfg.depth) + ")",
                 worst, tol);
  rep.checks.add(p + "Phi_q", rel.at("Phi_q"), tol);
  rep.checks.add(p + "markov", markov_residual(g, cfg.markov_depth), tol);
  const int jmax = default_jmax(cfg, g);
  const JWReport jw = jw_tower_residuals(g, cs.W, jmax);
  const std::string jt = "(jmax=" + std::to_string(jmax) + ")";
  rep.checks.add(p + "jw-trace" + jt, jw.trace, tol);
  rep.checks.add(p + "jw-kills" + jt, jw.kills, tol);
  rep.checks.add(p + "jw-projection" + jt, jw.projection, tol);
  if (g.family == Family::A && cfg.with_t_operator &&
      g.m <= cfg.t_operator_max_m) {
    const TOperator t = t_operator_solve(g, cs.W, cfg.seed);
    rep.checks.add(p + "t-square", t.square_residual,
                   std::max(tol, 1e-8));
    rep.checks.add(p + "t-word", t.word_residual, std::max(tol, 1e-8));
    const bool rank1 = std::all_of(t.vertex_ranks.begin(),
                                   t.vertex_ranks.end(),
                                   [](int r) { return r == 1; });
    rep.checks.add_flag(p + "t-top-projection-rank-1", rank1);
  }
}

void suite_hilbert(const RunConfig& cfg, const Graph& g, Report& rep) {
  const std::string p = graph_tag(g) + "/hilbert/";
  const int pmax = default_hilbert_degree(cfg, g);
  const HilbertSeries hs = hilbert_closed(g, std::max(pmax, 2 * g.m + 2));
  const CellSystem cs = cell_closed_form(g);
  RankGap gap;
  const auto dims = graded_dims_direct_all(g, cs.W, pmax, &gap);
  bool equal = true;
  for (int q = 0; q <= pmax; ++q)
    equal = equal && dims[q] == hs.coeff[q];
  rep.checks.add_flag(
      p + "direct==closed(<=deg " + std::to_string(pmax) + ")", equal);
  const Eigen::MatrixXi adj = g.adjacency().cast<int>();
  rep.checks.add_flag(p + "H1=adjacency", hs.coeff[1] == adj);
  bool nonneg = true;
  for (const auto& c : hs.coeff) nonneg = nonneg && c.minCoeff() >= 0;
  rep.checks.add_flag(p + "coefficients-non-negative", nonneg);
  bool vanish = true;
  for (int q = 2 * g.m + 1; q < static_cast<int>(hs.coeff.size()); ++q)
    vanish = vanish && hs.coeff[q].isZero();
  rep.checks.add_flag(p + "vanishing-beyond-2m", vanish);
  std::ostringstream note;
  note << graph_tag(g) << ": graded dimension rank gap "
       << JsonWriter::number(gap.smallest_kept) << " kept vs "
       << JsonWriter::number(gap.largest_dropped) << " dropped";
  rep.notes.push_back(note.str());
}

Report run_suite(const RunConfig& cfg) {
  if (!(cfg.tolerance > 0.0))
    throw std::invalid_argument("suite: tolerance must be positive");
  Report rep;
  rep.config = cfg;
  auto guard = [&rep](const std::string& prefix,
                      const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& ex) {
      rep.checks.add_flag(prefix + "/error", false);
      rep.notes.push_back(prefix + ": " + ex.what());
    }
  };
  const std::string lvl = "m=" + std::to_string(cfg.m);
  guard(lvl + "/modular", [&] { suite_modular(cfg, rep); });
  guard(lvl + "/invariants", [&] { suite_invariants(cfg, rep); });
  std::vector<Graph> graphs;
  try {
    graphs = suite_graphs(cfg);
  } catch (const std::exception& ex) {
    rep.checks.add_flag(lvl + "/graphs/error", false);
    rep.notes.push_back(lvl + "/graphs: " + std::string(ex.what()));
    return rep;
  }
  std::string listing;
  for (const Graph& g : graphs) listing += " " + graph_tag(g);
  rep.notes.push_back("m=" + std::to_string(cfg.m) + ": " +
                      std::to_string(graphs.size()) +
                      " inequivalent graph(s) at level " +
                      std::to_string(2 * cfg.m) + ":" + listing);
  for (const Graph& g : graphs) {
    const std::string tag = graph_tag(g);
    guard(tag + "/graph", [&] { suite_graph(cfg, g, rep); });
    guard(tag + "/cells", [&] { suite_cells(cfg, g, rep); });
    if (cfg.with_solver)
      guard(tag + "/solve", [&] { suite_solver(cfg, g, rep); });
    guard(tag + "/pathalg", [&] { suite_pathalg(cfg, g, rep); });
    guard(tag + "/hilbert", [&] { suite_hilbert(cfg, g, rep); });
  }
  return rep;
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << "SO(3)_" << 2 * config.m << " verification suite (m = " << config.m
     << ", tolerance = " << JsonWriter::number(config.tolerance) << ")\n";
  os << checks.to_text();
  for (const auto& n : notes) os << "# " << n << "\n";
  const int failed = static_cast<int>(
      std::count_if(checks.lines.begin(), checks.lines.end(),
                    [](const CheckLine& l) { return !l.pass; }));
  if (failed == 0)
    os << "all " << checks.lines.size() << " checks passed\n";
  else
    os << failed << " of " << checks.lines.size() << " checks FAILED\n";
  return os.str();
}

std::string Report::to_json(
    const std::function<void(JsonWriter&)>& results) const {
  JsonWriter w;
  w.begin_obj();
  w.key("checks").begin_arr();
  for (const auto& l : checks.lines) {
    w.begin_obj();
    w.key("name").value(l.name);
    w.key("pass").value(l.pass);
    w.key("residual").value(l.residual);
    w.key("tol").value(l.tol);
    w.end_obj();
  }
  w.end_arr();
  w.key("command").value(command);
  w.key("config").begin_obj();
  w.key("depth").value(config.depth);
  w.key("families").begin_arr();
  for (Family f : config.families) w.value(family_name(f));
  w.end_arr();
  w.key("format").value(format_name(config.format));
  w.key("hilbert_degree").value(config.hilbert_degree);
  w.key("invariant_bound").value(config.invariant_bound);
  w.key("jw_jmax").value(config.jw_jmax);
  w.key("m").value(config.m);
  w.key("markov_depth").value(config.markov_depth);
  w.key("seed").value(static_cast<long long>(config.seed));
  w.key("solver_restarts").value(config.solver_restarts);
  w.key("t_operator_max_m").value(config.t_operator_max_m);
  w.key("tolerance").value(config.tolerance);
  w.key("with_solver").value(config.with_solver);
  w.key("with_t_operator").value(config.with_t_operator);
  w.end_obj();
  w.key("notes").begin_arr();
  for (const auto& n : notes) w.value(n);
  w.end_arr();
  w.key("results").begin_obj();
  if (results) results(w);
  w.end_obj();
  w.key("schema").value("so3cat/1");
  w.end_obj();
  return w.str();
}

std::string Report::to_csv() const {
  std::ostringstream os;
  os << "name,residual,tol,pass\n";
  for (const auto& l : checks.lines)
    os << l.name << "," << JsonWriter::number(l.residual) << ","
       << JsonWriter::number(l.tol) << "," << (l.pass ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace so3cat

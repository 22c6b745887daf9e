// so3cat: command-line front end for the SO(3) level-2m verification library.
//
// Subcommands: graph, modular, invariants, cells, solve, pathalg, hilbert,
// all.  One level (and optionally one or more families) per invocation;
// --all-m sweeps the levels 1..N in a single report.  Output formats: text
// (check table), json (schema "so3cat/1", sorted keys, 17-significant-digit
// floats -- byte-identical for equal configurations), dot (graphs only),
// csv (the check table).  Exit status: 0 if every enabled check passed,
// 1 if any check failed, 2 on usage or configuration errors.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "so3cat/cells.hpp"
#include "so3cat/invariants.hpp"
#include "so3cat/modular.hpp"
#include "so3cat/preproj.hpp"
#include "so3cat/qnum.hpp"
#include "so3cat/report.hpp"
#include "so3cat/solve.hpp"
#include "so3cat/suite.hpp"

using namespace so3cat;

namespace {

struct Options {
  RunConfig cfg;
  std::vector<std::string> family_names;
  std::string format = "text";
  int all_m = 0;  // > 0: sweep m = 1..all_m
  // cells / solve
  double theta = 0.0;
  bool do_solve = false;
  // hilbert
  bool mode_direct = false, mode_closed = false;
  // levels selected by -m / --all-m
  std::vector<int> levels() const {
    if (all_m <= 0) return {cfg.m};
    std::vector<int> out;
    for (int m = 1; m <= all_m; ++m) out.push_back(m);
    return out;
  }
  // config for one level of the sweep
  RunConfig at(int m) const {
    RunConfig c = cfg;
    c.m = m;
    c.families.clear();
    for (const auto& s : family_names) c.families.push_back(parse_family(s));
    return c;
  }
};

void emit_mati(JsonWriter& w, const Eigen::MatrixXi& z) {
  w.begin_arr();
  for (int i = 0; i < z.rows(); ++i) {
    w.begin_arr();
    for (int j = 0; j < z.cols(); ++j) w.value(z(i, j));
    w.end_arr();
  }
  w.end_arr();
}

struct Output {
  Report rep;
  std::function<void(JsonWriter&)> results;  // json payload (sorted keys)
  std::string dot;                           // set by graph-producing commands
};

int emit(const Options& o, Output& out) {
  switch (parse_format(o.format)) {
    case OutputFormat::Text:
      std::cout << out.rep.to_text();
      break;
    case OutputFormat::Json:
      std::cout << out.rep.to_json(out.results) << "\n";
      break;
    case OutputFormat::Dot:
      if (out.dot.empty())
        throw std::invalid_argument(
            "dot output is only available for the graph subcommand");
      std::cout << out.dot;
      break;
    case OutputFormat::Csv:
      std::cout << out.rep.to_csv();
      break;
  }
  return out.rep.all_pass() ? 0 : 1;
}

// ---- subcommand drivers ----------------------------------------------------

Output run_graph(const Options& o) {
  Output out;
  out.rep.command = "graph";
  out.rep.config = o.at(o.levels().front());
  std::vector<Graph> gs;
  for (int m : o.levels()) {
    const RunConfig cfg = o.at(m);
    for (const Graph& g : suite_graphs(cfg)) {
      suite_graph(cfg, g, out.rep);
      std::ostringstream note;
      note << family_name(g.family) << "_" << 2 * g.m << ": " << g.nv
           << " vertices, " << g.ne() << " directed edges";
      out.rep.notes.push_back(note.str());
      out.dot += to_dot(g);
      gs.push_back(g);
    }
  }
  out.results = [gs](JsonWriter& w) {
    w.key("graphs").begin_arr();
    for (const auto& g : gs) {
      w.begin_obj();
      w.key("adjacency").value(Eigen::MatrixXd(g.adjacency()));
      w.key("family").value(family_name(g.family));
      w.key("m").value(g.m);
      w.key("phi").value(Eigen::VectorXd(g.phi));
      w.key("vertices").begin_arr();
      for (const auto& v : g.vertex_names) w.value(v);
      w.end_arr();
      w.end_obj();
    }
    w.end_arr();
  };
  return out;
}

Output run_modular(const Options& o) {
  Output out;
  out.rep.command = "modular";
  out.rep.config = o.at(o.levels().front());
  std::vector<int> ms = o.levels();
  for (int m : ms) suite_modular(o.at(m), out.rep);
  out.results = [ms](JsonWriter& w) {
    w.key("levels").begin_arr();
    for (int m : ms) {
      const ModularData md = modular_data(m);
      w.begin_obj();
      w.key("S").value(md.S);
      w.key("T").value(md.T);
      w.key("dims").value(md.dims);
      w.key("m").value(m);
      w.key("sigma").value(md.sigma);
      w.end_obj();
    }
    w.end_arr();
  };
  return out;
}

Output run_invariants(const Options& o) {
  Output out;
  out.rep.command = "invariants";
  out.rep.config = o.at(o.levels().front());
  std::vector<std::pair<int, std::vector<Eigen::MatrixXi>>> found;
  for (int m : o.levels()) {
    std::vector<Eigen::MatrixXi> zs;
    suite_invariants(o.at(m), out.rep, &zs);
    found.emplace_back(m, std::move(zs));
  }
  out.results = [found](JsonWriter& w) {
    w.key("levels").begin_arr();
    for (const auto& [m, zs] : found) {
      w.begin_obj();
      w.key("count").value(static_cast<int>(zs.size()));
      w.key("invariants").begin_arr();
      for (const auto& z : zs) emit_mati(w, z);
      w.end_arr();
      w.key("m").value(m);
      w.end_obj();
    }
    w.end_arr();
  };
  return out;
}

Output run_cells(const Options& o) {
  Output out;
  out.rep.command = "cells";
  out.rep.config = o.at(o.levels().front());
  struct Payload {
    std::string tag;
    CellSystem cs;
  };
  std::vector<Payload> payloads;
  for (int m : o.levels()) {
  const RunConfig cfg = o.at(m);
  const double tol = cfg.tolerance;
  for (const Graph& g : suite_graphs(cfg)) {
    const std::string p = family_name(g.family) + "_" + std::to_string(2 * g.m);
    CellParams params;
    params.theta = o.theta;
    params.tau = std::polar(1.0, o.theta);
    const CellSystem cs = cell_closed_form(g, params);
    const CellResiduals rr = rel_residuals(g, cs.W);
    out.rep.checks.add(p + "/cells/R1", rr.r1, tol);
    out.rep.checks.add(p + "/cells/R2", rr.r2, tol);
    out.rep.checks.add(p + "/cells/R3", rr.r3, tol);
    // tau off the real axis is a consistent cell system but not a *-system,
    // so the conjugation axiom is only checked at theta = 0 (mod pi) for the
    // tau-scaled families; the theta-families stay unitary gauge orbits of a
    // real base point and keep it for every theta.
    const bool tau_family = g.family == Family::A || g.family == Family::E8 ||
                            g.family == Family::E14c;
    if (!tau_family || std::abs(std::sin(o.theta)) < 1e-12)
      out.rep.checks.add(p + "/cells/star", star_residual(g, cs.W), tol);
    out.rep.checks.add(p + "/cells/loop-normalization",
                       loop_sum_residual(g, canonical_forms(g)), tol);
    if (o.do_solve) suite_solver(cfg, g, out.rep);
    payloads.push_back({p, cs});
  }
  }
  out.results = [payloads](JsonWriter& w) {
    w.key("systems").begin_arr();
    for (const auto& pl : payloads) {
      w.begin_obj();
      w.key("cells").begin_arr();
      for (const auto& [loop, val] : pl.cs.W) {
        w.begin_obj();
        w.key("im").value(val.imag());
        w.key("loop").begin_arr();
        for (int e : loop) w.value(e);
        w.end_arr();
        w.key("re").value(val.real());
        w.end_obj();
      }
      w.end_arr();
      w.key("graph").value(pl.tag);
      w.key("tau").value(pl.cs.params.tau);
      w.key("theta").value(pl.cs.params.theta);
      w.end_obj();
    }
    w.end_arr();
  };
  return out;
}

Output run_solve(const Options& o) {
  Output out;
  out.rep.command = "solve";
  out.rep.config = o.at(o.levels().front());
  struct ClassInfo {
    std::string tag;
    int classes = 0, converged = 0;
    std::vector<int> multiplicity;
    std::vector<double> match;
  };
  std::vector<ClassInfo> infos;
  for (int m : o.levels()) {
  const RunConfig cfg = o.at(m);
  for (const Graph& g : suite_graphs(cfg)) {
    const std::string p = family_name(g.family) + "_" + std::to_string(2 * g.m);
    SolveConfig sc;
    sc.restarts = cfg.solver_restarts;
    sc.seed = cfg.seed;
    const SolveResult sr = solve_cells(g, sc);
    const CellSystem cs = cell_closed_form(g);
    ClassInfo info;
    info.tag = p;
    info.classes = static_cast<int>(sr.representatives.size());
    info.converged = sr.converged;
    info.multiplicity = sr.multiplicity;
    bool matched = !sr.representatives.empty();
    for (const auto& W : sr.representatives) {
      const auto eq = find_equivalence(g, W, cs.W);
      if (eq)
        info.match.push_back(eq->residual);
      else
        matched = false;
    }
    out.rep.checks.add_flag(p + "/solve/found-solutions",
                            !sr.representatives.empty());
    out.rep.checks.add_flag(p + "/solve/gauge-equivalent-to-closed-form",
                            matched);
    std::ostringstream note;
    note << p << ": " << info.classes << " gauge class(es) from "
         << info.converged << "/" << sc.restarts << " converged restarts";
    out.rep.notes.push_back(note.str());
    infos.push_back(std::move(info));
  }
  }
  out.results = [infos](JsonWriter& w) {
    w.key("solves").begin_arr();
    for (const auto& info : infos) {
      w.begin_obj();
      w.key("classes").value(info.classes);
      w.key("converged").value(info.converged);
      w.key("graph").value(info.tag);
      w.key("match_residuals").begin_arr();
      for (double r : info.match) w.value(r);
      w.end_arr();
      w.key("multiplicity").begin_arr();
      for (int k : info.multiplicity) w.value(k);
      w.end_arr();
      w.end_obj();
    }
    w.end_arr();
  };
  return out;
}

Output run_pathalg(const Options& o) {
  Output out;
  out.rep.command = "pathalg";
  out.rep.config = o.at(o.levels().front());
  for (int m : o.levels()) {
    const RunConfig cfg = o.at(m);
    for (const Graph& g : suite_graphs(cfg)) suite_pathalg(cfg, g, out.rep);
  }
  return out;
}

Output run_hilbert(const Options& o) {
  Output out;
  out.rep.command = "hilbert";
  out.rep.config = o.at(o.levels().front());
  const bool want_direct = o.mode_direct || !o.mode_closed;
  const bool want_closed = o.mode_closed || !o.mode_direct;
  struct Series {
    std::string tag;
    std::vector<Eigen::MatrixXi> closed, direct;
  };
  std::vector<Series> all;
  for (int m : o.levels()) {
  const RunConfig cfg = o.at(m);
  const double tol = cfg.tolerance;
  for (const Graph& g : suite_graphs(cfg)) {
    const std::string p = family_name(g.family) + "_" + std::to_string(2 * g.m);
    const int pmax = cfg.hilbert_degree >= 0 ? cfg.hilbert_degree
                                             : std::min(2 * g.m + 2, 10);
    Series s;
    s.tag = p;
    if (want_closed) {
      const HilbertSeries hs = hilbert_closed(g, std::max(pmax, 2 * g.m + 2));
      s.closed.assign(hs.coeff.begin(), hs.coeff.begin() + pmax + 1);
      out.rep.checks.add(p + "/hilbert/integer-coefficients",
                         hs.rounding_error, tol);
      out.rep.checks.add_flag(p + "/hilbert/H1=adjacency",
                              hs.coeff[1] == g.adjacency().cast<int>());
      bool nonneg = true;
      for (const auto& c : hs.coeff) nonneg = nonneg && c.minCoeff() >= 0;
      out.rep.checks.add_flag(p + "/hilbert/coefficients-non-negative",
                              nonneg);
      bool vanish = true;
      for (int q = 2 * g.m + 1; q < static_cast<int>(hs.coeff.size()); ++q)
        vanish = vanish && hs.coeff[q].isZero();
      out.rep.checks.add_flag(p + "/hilbert/vanishing-beyond-2m", vanish);
    }
    if (want_direct) {
      const CellSystem cs = cell_closed_form(g);
      RankGap gap;
      s.direct = graded_dims_direct_all(g, cs.W, pmax, &gap);
      out.rep.checks.add_flag(
          p + "/hilbert/rank-gap-clean",
          gap.smallest_kept > 1e4 * std::max(gap.largest_dropped, 1e-14));
    }
    if (want_direct && want_closed) {
      bool equal = true;
      for (size_t q = 0; q < s.direct.size(); ++q)
        equal = equal && s.direct[q] == s.closed[q];
      out.rep.checks.add_flag(
          p + "/hilbert/direct==closed(<=deg " + std::to_string(pmax) + ")",
          equal);
    }
    const auto& dims = want_direct ? s.direct : s.closed;
    std::ostringstream note;
    note << p << ": graded dimensions";
    for (const auto& c : dims) note << " " << c.sum();
    out.rep.notes.push_back(note.str());
    all.push_back(std::move(s));
  }
  }
  out.results = [all](JsonWriter& w) {
    w.key("series").begin_arr();
    for (const auto& s : all) {
      w.begin_obj();
      w.key("closed").begin_arr();
      for (const auto& c : s.closed) emit_mati(w, c);
      w.end_arr();
      w.key("direct").begin_arr();
      for (const auto& c : s.direct) emit_mati(w, c);
      w.end_arr();
      w.key("graph").value(s.tag);
      w.end_obj();
    }
    w.end_arr();
  };
  return out;
}

Output run_all(const Options& o) {
  Output out;
  out.rep.command = "all";
  out.rep.config = o.at(o.levels().front());
  for (int m : o.levels()) {
    const Report r = run_suite(o.at(m));
    for (const auto& l : r.checks.lines) out.rep.checks.lines.push_back(l);
    for (const auto& n : r.notes) out.rep.notes.push_back(n);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "so3cat: verification toolkit for the SO(3) level-2m graph families\n"
      "(nimrep graphs, modular data, modular invariants, trivalent cells,\n"
      "path-algebra relations, preprojective Hilbert series)"};
  app.fallthrough();
  app.require_subcommand(1);

  Options o;
  app.add_option("-m,--m", o.cfg.m, "level index m (category SO(3)_{2m})")
      ->check(CLI::PositiveNumber);
  app.add_option("--family", o.family_names,
                 "family: A, sigma, E8, E8c, E14, E14c (repeatable; default: "
                 "all families at the level)");
  app.add_option("--all-m", o.all_m,
                 "sweep levels m = 1..N (A/sigma families only)");
  app.add_option("--format", o.format, "output format: text, json, dot, csv")
      ->check(CLI::IsMember({"text", "json", "dot", "csv"}));
  app.add_option("--tolerance", o.cfg.tolerance,
                 "pass/fail threshold for residual checks");
  app.add_option("--seed", o.cfg.seed, "base RNG seed (restart k uses seed+k)");

  auto* c_graph = app.add_subcommand(
      "graph", "build graphs; Perron-Frobenius and spectrum checks");
  auto* c_mod = app.add_subcommand(
      "modular", "modular S/T data: unitarity, relations, fusion, branching");
  auto* c_inv = app.add_subcommand(
      "invariants", "enumerate integer modular invariants");
  c_inv->add_option("--bound", o.cfg.invariant_bound,
                    "largest allowed matrix entry");
  auto* c_cells = app.add_subcommand(
      "cells", "closed-form trivalent cell systems and their relations");
  c_cells->add_option("--theta", o.theta,
                      "family parameter (gauge angle / triangle phase)");
  c_cells->add_flag("--solve", o.do_solve,
                    "also run the numerical solver and match gauge classes");
  c_cells->add_option("--restarts", o.cfg.solver_restarts,
                      "solver restarts (with --solve)");
  auto* c_solve = app.add_subcommand(
      "solve", "numerical cell solver; match classes to the closed forms");
  c_solve->add_option("--restarts", o.cfg.solver_restarts, "solver restarts");
  auto* c_path = app.add_subcommand(
      "pathalg", "path-algebra operators: relations, Markov trace, "
      "Jones-Wenzl tower, t-generator");
  c_path->add_option("--depth", o.cfg.depth, "relation depth (>= 4)");
  c_path->add_option("--markov-depth", o.cfg.markov_depth,
                     "Markov trace depth");
  c_path->add_option("--jmax", o.cfg.jw_jmax,
                     "Jones-Wenzl tower top (default min(2m, 4))");
  c_path->add_option("--t-max-m", o.cfg.t_operator_max_m,
                     "largest m for the A-family t-generator solve");
  auto* c_hil = app.add_subcommand(
      "hilbert", "preprojective Hilbert series: closed form vs direct scan");
  c_hil->add_flag("--direct", o.mode_direct, "direct graded dimensions only");
  c_hil->add_flag("--closed", o.mode_closed, "closed-form series only");
  c_hil->add_option("--max-degree", o.cfg.hilbert_degree,
                    "top degree (default min(2m+2, 10))");
  auto* c_all = app.add_subcommand(
      "all", "the full verification suite for the level");
  c_all->add_flag("--solve", o.cfg.with_solver, "include the cell solver");
  c_all->add_option("--restarts", o.cfg.solver_restarts, "solver restarts");
  c_all->add_option("--depth", o.cfg.depth, "relation depth (>= 4)");
  c_all->add_option("--jmax", o.cfg.jw_jmax, "Jones-Wenzl tower top");
  c_all->add_option("--max-degree", o.cfg.hilbert_degree,
                    "Hilbert cross-check top degree");

  for (auto* sc : {c_graph, c_mod, c_inv, c_cells, c_solve, c_path, c_hil,
                   c_all})
    sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (o.all_m > 0)
      for (const auto& s : o.family_names)
        if (parse_family(s) != Family::A && parse_family(s) != Family::Sigma)
          throw std::invalid_argument(
              "--all-m sweeps only the A/sigma families");
    Output out;
    if (c_graph->parsed()) out = run_graph(o);
    else if (c_mod->parsed()) out = run_modular(o);
    else if (c_inv->parsed()) out = run_invariants(o);
    else if (c_cells->parsed()) out = run_cells(o);
    else if (c_solve->parsed()) out = run_solve(o);
    else if (c_path->parsed()) out = run_pathalg(o);
    else if (c_hil->parsed()) out = run_hilbert(o);
    else out = run_all(o);
    return emit(o, out);
  } catch (const std::exception& ex) {
    std::cerr << "so3cat: " << ex.what() << "\n";
    return 2;
  }
}

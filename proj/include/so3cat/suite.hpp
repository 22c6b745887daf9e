#pragma once
// One-call verification suite over the SO(3) level-2m graph families.
//
// run_suite builds every requested graph at level 2m and checks, in order:
// Perron-Frobenius data and adjacency spectra, the modular data (unitarity,
// the (ST)^3 = S^2 relation, charge conjugation, Verlinde fusion, branching),
// the enumeration of integer modular invariants, the closed-form trivalent
// cell systems, optionally the numerical cell solver against the closed
// forms, the path-algebra relation suite (Temperley-Lieb and BMW images,
// Markov trace, Jones-Wenzl tower, and the extra t-generator on A_{2m}), and
// the preprojective Hilbert series cross-check (direct graded dimensions
// against the closed-form series).
//
// Every check lands in a Report as a named residual with its threshold; the
// text and JSON serializations are deterministic (sorted keys, floats at 17
// significant digits), so equal configs produce byte-identical output.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "so3cat/graph.hpp"
#include "so3cat/report.hpp"

namespace so3cat {

enum class OutputFormat { Text, Json, Dot, Csv };

OutputFormat parse_format(const std::string& s);  // throws on unknown name
std::string format_name(OutputFormat f);

struct RunConfig {
  int m = 2;                     // category index: SO(3)_{2m}
  std::vector<Family> families;  // empty = every family at level 2m
  double tolerance = 1e-8;       // pass/fail threshold for residual checks
  int depth = 4;                 // path-algebra relation depth (>= 4)
  int markov_depth = 4;          // Markov trace depth (full bases)
  int jw_jmax = -1;              // Jones-Wenzl tower top; -1 = min(2m, 4)
  int hilbert_degree = -1;       // Hilbert cross-check top degree; -1 = 2m+2
  bool with_solver = false;      // run the numerical cell solver
  int solver_restarts = 200;
  bool with_t_operator = true;   // t-generator on A_{2m} when m <= cap below
  int t_operator_max_m = 3;
  int invariant_bound = 4;       // entry bound for the invariant enumeration
  std::uint64_t seed = 1;        // base RNG seed (restart k uses seed + k)
  OutputFormat format = OutputFormat::Text;
};

struct Report {
  RunConfig config;
  std::string command;             // subcommand that produced the report
  CheckReport checks;
  std::vector<std::string> notes;  // informational lines (counts, classes)

  bool all_pass() const { return checks.all_pass(); }
  std::string to_text() const;
  // Schema "so3cat/1"; `results` (if given) fills the "results" object with
  // subcommand payloads -- callers emit its keys in sorted order.
  std::string to_json(
      const std::function<void(JsonWriter&)>& results = {}) const;
  std::string to_csv() const;  // the check table: name,residual,tol,pass
};

// Level-wide checks (modular data, invariant enumeration).  The invariant
// pass can hand back the enumerated matrices for export.
void suite_modular(const RunConfig& cfg, Report& rep);
void suite_invariants(const RunConfig& cfg, Report& rep,
                      std::vector<Eigen::MatrixXi>* out = nullptr);

// Per-graph check groups; names are prefixed "<family>_<2m>/<module>/...".
void suite_graph(const RunConfig& cfg, const Graph& g, Report& rep);
void suite_cells(const RunConfig& cfg, const Graph& g, Report& rep);
void suite_solver(const RunConfig& cfg, const Graph& g, Report& rep);
void suite_pathalg(const RunConfig& cfg, const Graph& g, Report& rep);
void suite_hilbert(const RunConfig& cfg, const Graph& g, Report& rep);

// The graphs cfg selects at level 2m (throws if a family is absent there).
std::vector<Graph> suite_graphs(const RunConfig& cfg);

// Everything above in order.  Exceptions from a check group are converted
// into a failed flag "<prefix>/error" plus a note with the message.
Report run_suite(const RunConfig& cfg);

}  // namespace so3cat

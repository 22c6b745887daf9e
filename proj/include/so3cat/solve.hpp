#pragma once
// Numerical rediscovery of cell systems: Levenberg-Marquardt on the stacked
// (R1)-(R3) residuals from random starts, plus a gauge-equivalence search
// used to deduplicate solutions and to match them against the closed forms.

#include <cstdint>
#include <optional>
#include <vector>

#include "so3cat/cells.hpp"

namespace so3cat {

// A gauge transform certifying equivalence: complex diagonal-plus-block edge
// matrix (self-loop phases, triangle scalar and its inverse on the reversed
// class, 2x2 orthogonal block at a double-loop vertex).
struct GaugeMatch {
  Eigen::MatrixXcd M;
  double residual = 0.0;  // max |gauge(W1, M) - W2| over loop classes
};

// Search the canonical gauge group for M with gauge(W1, M) = W2 within tol:
// enumerated 2x2 orthogonal blocks over a 1e-2 theta grid with local
// refinement (double-loop vertices), analytically solved unit phases on
// single self-loops, and a free scalar on each triangle class pair.
std::optional<GaugeMatch> find_equivalence(const Graph& g, const CellMap& W1,
                                           const CellMap& W2,
                                           double tol = 1e-6);

struct SolveConfig {
  int restarts = 200;
  int max_iter = 400;
  double tol = 1e-10;       // accept a restart whose final residual is below
  bool real_only = true;
  std::uint64_t seed = 1;   // restart k draws from seed + k
  double dedupe_tol = 1e-6;
};

struct SolveResult {
  std::vector<CellMap> representatives;  // one per equivalence class found
  std::vector<int> multiplicity;         // converged restarts per class
  int converged = 0;
};

SolveResult solve_cells(const Graph& g, const SolveConfig& cfg = {});

}  // namespace so3cat

#pragma once
// The SO(3) preprojective algebra of a nimrep graph: the graded quotient
//   Pi_p = (CG)_p / J_p,   J_p = sum_{i<p} Im e_i + Im u_i,
// its closed-form Hilbert series
//   H(t) = (1+t)(1+t^{2m+1}) (1 + (1-Delta)t + t^2)^{-1},
// and the five-term graded resolution
//   0 -> R[2m+3] -> A[3] -> R[2] + (A(x)V)[1] -> (A(x)V) + R[2m+1] -> A -> R -> 0
// with connecting maps
//   mu1(x(x)a) = xa
//   mu2(x(x)a) = psi2*(xa) - psi1*(psi2(x(x)a))  (+ the A_{2m} class of xa
//                into the R[2m+1] slot at top degree)
//   mu2|R[2](v) = sum_{b: s(b)=v} sqrt(phi_r(b)/phi_v) b (x) b~
//   mu3(x)      = sum_b sqrt(phi_r(b)/phi_s(b)) xb (x) b~
//   mu4         = inclusion of the one-dimensional top degree.

#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "so3cat/cells.hpp"
#include "so3cat/graph.hpp"
#include "so3cat/pathalg.hpp"

namespace so3cat {

// Coefficients H^p of the closed-form Hilbert series for degrees
// 0..max_degree (default 2m+4). Throws if a coefficient fails to round to an
// integer within 1e-6, or if any coefficient beyond degree 2m+2 is nonzero
// (a series blow-up).
struct HilbertSeries {
  int m = 0;
  std::vector<Eigen::MatrixXi> coeff;      // coeff[p] indexed by (x, y)
  double rounding_error = 0.0;             // worst |entry - nearest integer|
  int max_degree() const { return static_cast<int>(coeff.size()) - 1; }
};
HilbertSeries hilbert_closed(const Graph& g, int max_degree = -1);

// Audit trail for numerical rank decisions: tightest relative singular value
// kept and largest relative singular value discarded (cutoff 1e-8).
struct RankGap {
  double smallest_kept = std::numeric_limits<double>::infinity();
  double largest_dropped = 0.0;
};

// Graded dimension of Pi_p per block (x, y): the path count minus the rank
// of the span of the images of all e_i, u_i (1 <= i < p). Computed degree by
// degree: the joint kernel at degree p is (joint kernel at p-1).V intersected
// with ker([3] e_{p-1} + u_{p-1}), each intersection decided by singular
// values with relative threshold 1e-8.
Eigen::MatrixXi graded_dim_direct(const Graph& g, const CellMap& W, int p,
                                  RankGap* gap = nullptr);
// Same, for all degrees 0..pmax in one pass.
std::vector<Eigen::MatrixXi> graded_dims_direct_all(const Graph& g,
                                                    const CellMap& W, int pmax,
                                                    RankGap* gap = nullptr);

// Orthonormal bases of J_p^perp per block (real cell systems). pb holds the
// degree-p path blocks, U the #paths x H^p basis matrices.
struct QuotientBasis {
  PathBlocks pb;
  std::map<BlockKey, Eigen::MatrixXd> U;
};
std::vector<QuotientBasis> quotient_bases(const Graph& g, const CellMap& W,
                                          int pmax);

// Degree-by-degree verification of the resolution: composite residuals
// mu_i mu_{i+1} and integer exactness defects (rank-nullity) at every node,
// for degrees 0..max_degree (default 2m+3). Real cell systems only.
struct ResolutionReport {
  std::map<std::string, double> worst;  // per check name, max over all blocks
  std::vector<std::string> issues;      // entries exceeding tol
  double max_residual() const;
};
ResolutionReport resolution_check(const Graph& g, const CellMap& W,
                                  int max_degree = -1, double tol = 1e-8);

}  // namespace so3cat

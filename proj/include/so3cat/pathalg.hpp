#pragma once
// Path algebras of a nimrep graph: the tower A_n = (+)_{(x,y)} End(paths of
// length n from x to y), the SO(3) Temperley-Lieb generators e_j / u_j acting
// on edge positions (j, j+1), the Jones-Wenzl idempotents F_j built by the
// two-term recursion
//   F_{j+1} = P - [4j]/([2j+1][2j+2]) P e_j P - [4][2j]/([2][2j+2]) P u_j P,
//   P = F_j,  F_1 = 1,
// the weighted (Markov) trace, the BMW images
//   g_j = q^2 + (q^{-2}-1) e_j - (q^2+q^{-2}) u_j,
// and the extra generator t on the A_{2m} graphs with t^2 = F_m.

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "so3cat/cells.hpp"
#include "so3cat/graph.hpp"

namespace so3cat {

using Path = std::vector<int>;         // edge ids, head to tail
using BlockKey = std::pair<int, int>;  // (source vertex, range vertex)

// Length-n paths grouped by (source, range); each block sorted.
struct PathBlocks {
  int n = 0;
  std::map<BlockKey, std::vector<Path>> blocks;

  int total_paths() const;
  // Position of p in its (sorted) block; throws if absent.
  int index(const BlockKey& key, const Path& p) const;
};

PathBlocks path_blocks(const Graph& g, int n);

// Block-diagonal operator on a path space.
template <typename Scalar>
struct BlockOpT {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::map<BlockKey, Mat> mats;

  static BlockOpT zeros(const PathBlocks& pb);
  static BlockOpT identity(const PathBlocks& pb);

  BlockOpT operator+(const BlockOpT& o) const;
  BlockOpT operator-(const BlockOpT& o) const;
  BlockOpT operator*(Scalar c) const;
  BlockOpT operator*(const BlockOpT& o) const;  // blockwise product
  BlockOpT adjoint() const;
  BlockOpT inverse() const;
  double norm() const;  // Frobenius norm over all blocks
};

using BlockOpR = BlockOpT<double>;
using BlockOpC = BlockOpT<std::complex<double>>;

// Max absolute entry of a - b over all blocks.
template <typename Scalar>
double op_distance(const BlockOpT<Scalar>& a, const BlockOpT<Scalar>& b);

BlockOpC to_complex(const BlockOpR& x);
bool cells_are_real(const CellMap& W);

// e_j on A_n (1 <= j <= n-1): collapses an immediate backtrack (beta, ~beta)
// at positions (j, j+1) and re-expands it with weight
// sqrt(phi_r(beta) phi_r(gamma)) / phi_s(beta).
template <typename Scalar>
BlockOpT<Scalar> e_operator(const Graph& g, int j, const PathBlocks& pb);

// u_j on A_n: kernel sum_lam W(eta1 eta2 lam) conj(W(zeta1 zeta2 lam))
// / (phi_x phi_y) over the two-step segments at positions (j, j+1).
// The real instantiation requires a real cell system.
template <typename Scalar>
BlockOpT<Scalar> u_operator(const Graph& g, const CellMap& W, int j,
                            const PathBlocks& pb);

// Sparse forms of the generators (a few entries per row); these make the
// Jones-Wenzl recursion and the e/u rank computations cheap on big spaces.
template <typename Scalar>
using SparseBlocks = std::map<BlockKey, Eigen::SparseMatrix<Scalar>>;

template <typename Scalar>
SparseBlocks<Scalar> e_operator_sparse(const Graph& g, int j,
                                       const PathBlocks& pb);
template <typename Scalar>
SparseBlocks<Scalar> u_operator_sparse(const Graph& g, const CellMap& W, int j,
                                       const PathBlocks& pb);

// Embed X acting on the first `small.n` edge positions into the length-
// `big.n` path space (identity on the remaining positions).
template <typename Scalar>
BlockOpT<Scalar> embed_operator(const Graph& g, const BlockOpT<Scalar>& X,
                                const PathBlocks& small,
                                const PathBlocks& big);

// Weighted trace sum_p X_pp phi_r(p)/phi_s(p) scaled by [3]^{-n}.
template <typename Scalar>
double markov_trace(const Graph& g, const BlockOpT<Scalar>& X, int n);
// Per-vertex trace sum_{p: s(p)=v} X_pp phi_r(p)/phi_v; equals [2j+1] on
// the Jones-Wenzl idempotent F_j for every vertex v.
template <typename Scalar>
double vertex_trace(const Graph& g, const BlockOpT<Scalar>& X, int v);

// Jones-Wenzl tower: F[j] lives on its own length-j path space spaces[j].
template <typename Scalar>
struct JWTowerT {
  std::vector<PathBlocks> spaces;    // spaces[j], j = 0..jmax
  std::vector<BlockOpT<Scalar>> F;   // F[j], j = 1..jmax ([0] unused)
};
using JWTower = JWTowerT<double>;
using JWTowerC = JWTowerT<std::complex<double>>;

template <typename Scalar>
JWTowerT<Scalar> jones_wenzl_tower(const Graph& g, const CellMap& W, int jmax);

// --- residual suites --------------------------------------------------------

// All SO(3)-TL and BMW relation residuals on the depth-`depth` path space
// (depth >= 4 so that the BMW kernel element Phi_q is testable), keyed by a
// short relation name; includes "Phi_q".
std::map<std::string, double> tl_relation_residuals(const Graph& g,
                                                    const CellMap& W,
                                                    int depth = 4);

// Markov property tr(x e_{n-1}) = [3]^{-1} tr(x) checked against the full
// matrix-unit basis of A_{n-1} for n = 2..max_depth.
double markov_residual(const Graph& g, int max_depth = 5);

struct JWReport {
  double trace = 0.0;       // worst |trv(F_j) - [2j+1]| over j <= jmax, v
  double kills = 0.0;       // worst |e_i F_j|, |u_i F_j| for i < j
  double projection = 0.0;  // worst |F_j^2 - F_j|
};
JWReport jw_tower_residuals(const Graph& g, const CellMap& W, int jmax);

// --- the extra generator t on A_{2m} ----------------------------------------

// The palindromic m^2-letter word (E_m)(E_{m-1}E_{m+1})...(E_1E_3...E_{2m-1})
// ...(E_m) as an operator in A_{2m}; es[j] must hold e_j for j = 1..2m-1.
BlockOpR t_word(const Graph& g, int m, const std::vector<BlockOpR>& es);

struct TOperator {
  BlockOpR T;                    // real symmetric, on the length-m space
  double solver_residual = 0.0;  // final least-squares max-abs residual
  double square_residual = 0.0;  // |T^2 - F_m|
  double word_residual = 0.0;    // |T (word) T - [2m+1] F_{2m}|
  std::vector<int> vertex_ranks;             // rank of e_v F_{2m} per vertex
  std::map<BlockKey, double> block_traces;   // tr of each block of T
  double total_trace = 0.0;                  // weighted trace of T
};

// Solve for real symmetric T supported on the range of F_m with T^2 = F_m
// and T (word) T = [2m+1] F_{2m}, by randomly restarted least squares.
TOperator t_operator_solve(const Graph& g, const CellMap& W,
                           std::uint64_t seed = 0, int restarts = 30);

}  // namespace so3cat

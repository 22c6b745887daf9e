#pragma once
// Trivalent cell systems on the nimrep graphs: canonical bilinear forms,
// closed-form solutions for all six families, the three local relations
// (R1)-(R3), the star axiom, and gauge transformations.
//
// A cell system assigns a complex value W(abc) to every closed length-3
// loop (a,b,c) of directed edges; W is invariant under cyclic rotation, so
// values are stored under the lexicographically least rotation of the
// edge-id triple.
//
// Relations, with s/r the edge source/range maps and ~ the reversal:
//   (R1) sum_{b,c loops} W(abc) W(~c ~b ~d) = delta_{a,d} phi_{s(a)} phi_{r(a)}
//        for all a,d with s(a)=s(d), r(a)=r(d)
//   (R2) sum_{b: s(b)=r(a)} sqrt(phi_{r(b)}) W(a b ~b) = 0 for self-loops a
//   (R3) sqrt(phi_{s(a)} phi_{r(b)}) sum_e W(a e ~c) W(~e b ~d)
//      - sqrt(phi_{r(a)} phi_{r(c)}) sum_e W(a b e) W(~e ~d ~c)
//      = ([2]/[4]) ( phi_{r(a)} phi_{r(b)} phi_{r(c)} delta_{a,~b} delta_{c,~d}
//                  - phi_{s(a)} phi_{r(a)} phi_{r(b)} delta_{a,c} delta_{b,d} )

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "so3cat/graph.hpp"

namespace so3cat {

using Cplx = std::complex<double>;
using LoopKey = std::array<int, 3>;
using CellMap = std::map<LoopKey, Cplx>;

// Lexicographically least cyclic rotation of (a,b,c).
LoopKey canon_loop(int a, int b, int c);

// All closed length-3 loop classes of g, sorted.
std::vector<LoopKey> all_loops(const Graph& g);

// Value on the cyclic class of (a,b,c); zero-initializes missing classes
// never — throws std::out_of_range if the class is absent.
Cplx cell_value(const CellMap& W, int a, int b, int c);

// Store a value by named edges ("name" or "name~" for the reversed bond).
void set_cell(const Graph& g, CellMap& W,
              const std::vector<std::string>& loop_names, Cplx v);

// --- canonical bilinear forms ---------------------------------------------
// The canonical cup form is diagonal over partnered edges:
//   E(a) = sqrt(phi_{r(a)} / phi_{s(a)})   (= 1 on self-loops).
Eigen::VectorXd canonical_forms(const Graph& g);
// Closed-loop normalization: max_x | sum_{a: s(a)=x} E(a)^2 - [3]_q |.
double loop_sum_residual(const Graph& g, const Eigen::VectorXd& E);

// --- relation residuals ----------------------------------------------------
struct CellResiduals {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  double max() const;
};
// Max absolute violation of each relation over all index instances.
CellResiduals rel_residuals(const Graph& g, const CellMap& W);
// Star axiom: max |W(~c ~b ~a) - conj(W(abc))|.
double star_residual(const Graph& g, const CellMap& W);

// --- gauge transformations -------------------------------------------------
// W2(abc) = sum M(a,a1) M(b,b1) M(c,c1) W(a1 b1 c1) over composable triples;
// M is an ne x ne edge-basis change (block per parallel edge class).
CellMap gauge_transform(const Graph& g, const CellMap& W,
                        const Eigen::MatrixXd& M);
CellMap gauge_transform(const Graph& g, const CellMap& W,
                        const Eigen::MatrixXcd& M);
// Variants with the loop classes precomputed (hot paths).
CellMap gauge_transform(const Graph& g, const CellMap& W,
                        const Eigen::MatrixXd& M,
                        const std::vector<LoopKey>& loops);
CellMap gauge_transform(const Graph& g, const CellMap& W,
                        const Eigen::MatrixXcd& M,
                        const std::vector<LoopKey>& loops);
// 2x2 block u on the double-loop pair (g, g'), identity elsewhere.
CellMap double_loop_gauge(const Graph& g, const CellMap& W,
                          const Eigen::Matrix2d& u);
// Orthogonal 2x2 [[c, em s], [emp s, -em emp c]], em/emp in {+1,-1}.
Eigen::Matrix2d u_theta(double theta, int em = 1, int emp = 1);
// Cubic action of u on the double-loop quartet (W0,W1,W2,W3) =
// (W(ggg), W(ggg'), W(gg'g'), W(g'g'g')).
std::array<Cplx, 4> double_loop_cubic(const std::array<Cplx, 4>& w,
                                      const Eigen::Matrix2d& u);

// --- closed forms ----------------------------------------------------------
// A_{2m}.  eps: m signs (index 0 unused), tau on the unit circle scales the
// triangle pair; tau real gives a *-system.
CellMap cells_A(const Graph& g, Cplx tau = 1.0,
                const std::vector<int>& eps = {});
// sigma_{2m} chain cells; eps: m signs (index 0 used for the s0 loop).
CellMap cells_sigma_chain(const Graph& g, const std::vector<int>& eps);
// Double-loop quartet with W2 = 0 (the closed-form base point).
std::array<double, 4> sigma_double_w20(int m, int e1 = 1, int e2 = 1);
// sigma_{2m} from a double-loop quartet; the bond cells into the double
// vertex follow from (R2).
CellMap cells_sigma(const Graph& g, const std::array<Cplx, 4>& dbl,
                    const std::vector<int>& eps = {});
// Full theta-family: orbit of the W2=0 base under u_theta(theta, em, emp).
CellMap cells_sigma_family(const Graph& g, double theta, int em = 1,
                           int emp = 1, int e1 = 1, int e2 = 1,
                           const std::vector<int>& eps = {});
// E8 (m=4); tau on the unit circle, real tau gives a *-system.
CellMap cells_E8(const Graph& g, int e1 = 1, int e2 = 1, Cplx tau = 1.0);
// E8c (m=4) theta-family (theta=0 is the W2=0 base point).
CellMap cells_E8c(const Graph& g, double theta = 0.0, int e1 = 1, int e2 = 1,
                  int e3 = 1);
// E14 (m=7) theta-family.
CellMap cells_E14(const Graph& g, double theta = 0.0, int e1 = 1, int e2 = 1,
                  int e3 = 1);
// E14c (m=7); tau as for A/E8.
CellMap cells_E14c(const Graph& g, int e1 = 1, int e2 = 1, int e3 = 1,
                   Cplx tau = 1.0);

// --- parameterized dispatch -----------------------------------------------
struct CellParams {
  std::vector<int> eps;  // family sign choices; defaults to all +1
  double theta = 0.0;    // double-loop families (sigma, E8c, E14)
  Cplx tau = 1.0;        // triangle phase (A, E8, E14c)
};

struct CellSystem {
  Family family{Family::A};
  int m = 1;
  CellParams params;
  CellMap W;
};

// Closed form for g's family at g.m with the given parameters.
CellSystem cell_closed_form(const Graph& g, const CellParams& params = {});

// JSON: {"cells":[{"im":..,"loop":[a,b,c],"re":..}...],"graph":..,"params":..}
std::string cells_to_json(const Graph& g, const CellSystem& cs);

}  // namespace so3cat

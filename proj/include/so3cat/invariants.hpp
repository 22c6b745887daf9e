#pragma once
// Classification of modular invariants: integer matrices Z with Z_00 = 1,
// 0 <= Z_ij <= bound, commuting with both S and T.  The search runs inside
// the commutant of {S, T} (SVD nullspace of the stacked commutation
// constraints), enumerating integer values at a well-conditioned pivot set
// of matrix positions (QR column pivoting).

#include <Eigen/Dense>
#include <vector>

#include "so3cat/modular.hpp"

namespace so3cat {

// Basis of the real commutant {Z : ZS = SZ, ZT = TZ}; each column of the
// returned matrix is a vec (column-major) of one basis element.
Eigen::MatrixXd commutant_basis(const ModularData& md, double tol = 1e-9);

int commutant_dimension(const ModularData& md, double tol = 1e-9);

// All integer modular invariants with entries in [0, bound] and Z_00 = 1.
std::vector<Eigen::MatrixXi> enumerate_invariants(const ModularData& md,
                                                  int bound = 4);

// Named invariants known in closed form (diagonal, Q-swap, exceptional ones).
Eigen::MatrixXi invariant_diagonal(int m);
Eigen::MatrixXi invariant_qswap(int m);

// max-norm commutation defect of an integer matrix with S and T.
double invariant_residual(const ModularData& md, const Eigen::MatrixXi& z);

}  // namespace so3cat

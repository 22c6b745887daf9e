#pragma once
// Modular data of the SO(3) category at level 2m: primaries rho_0..rho_{m-1}
// and the two split sectors Q+, Q- (m+2 labels total), the Y/S/T matrices,
// charge conjugation, Verlinde fusion, and the branching intertwiner to the
// SU(2) level-4m (Kac-Peterson) modular data.

#include <Eigen/Dense>
#include <complex>

#include "so3cat/graph.hpp"

namespace so3cat {

struct ModularData {
  int m = 1;
  Eigen::VectorXd dims;    // quantum dimensions: [2j+1], and [2m+1]/2 twice
  Eigen::VectorXcd omega;  // twists: q^{-2j(j+1)}, q^{-2m(m+1)} twice
  Eigen::MatrixXcd Y;      // unnormalized S
  Eigen::MatrixXcd S;      // Y / |sigma|
  Eigen::MatrixXcd T;      // zeta * diag(conj(omega)), zeta^3 = conj(sigma)/|sigma|
  std::complex<double> sigma;  // Gauss sum  sum d^2 / omega
  int nlabels() const { return m + 2; }
};

ModularData modular_data(int m);

// Charge conjugation: identity for even m, Q+<->Q- swap for odd m.
Eigen::MatrixXd charge_conjugation(int m);

// Verlinde fusion matrix N_lambda[mu,nu] = sum_s S(l,s)S(mu,s)conj(S(nu,s))/S(0,s).
Eigen::MatrixXd verlinde(const Eigen::MatrixXcd& S, int lambda);

// Residuals of the defining relations, each the max-abs entry of the defect:
double unitarity_residual(const ModularData& md);          // S S* = 1
double stss_residual(const ModularData& md);               // (ST)^3 = S^2
double s2c_residual(const ModularData& md);                // S^2 = C
double global_dim_residual(const ModularData& md);         // |sigma|^2 = sum d^2
// max deviation of all N_lambda entries from nonnegative integers
double fusion_integrality(const ModularData& md);
// N_{rho_1} = adjacency(A_{2m}) for m >= 2; N_{Q+}+N_{Q-} at m = 1
double fusion_generator_residual(const ModularData& md);

// SU(2) level-k Kac-Peterson data.
void su2_data(int k, Eigen::MatrixXd& S, Eigen::MatrixXcd& T);

// (m+2) x (4m+1) branching intertwiner: rho_j <- (2j) + (4m-2j), Q+- <- (2m).
Eigen::MatrixXd branching_matrix(int m);
double branching_residual(const ModularData& md);  // max of S and T defects

}  // namespace so3cat

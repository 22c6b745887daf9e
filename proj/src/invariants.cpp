#include "so3cat/invariants.hpp"

#include <cmath>

namespace so3cat {

namespace {
using cd = std::complex<double>;

Eigen::MatrixXd commutation_constraints(const ModularData& md) {
  const int n = md.nlabels();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  // vec(ZX - XZ) = (X^T kron I - I kron X) vec(Z), column-major vec
  auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
  };
  const Eigen::MatrixXcd m1 =
      kron(md.S.transpose(), I) - kron(I, md.S);
  const Eigen::MatrixXcd m2 =
      kron(md.T.transpose(), I) - kron(I, md.T);
  Eigen::MatrixXd m(4 * n * n, n * n);
  m << m1.real(), m1.imag(), m2.real(), m2.imag();
  return m;
}
}  // namespace

Eigen::MatrixXd commutant_basis(const ModularData& md, double tol) {
  const Eigen::MatrixXd m = commutation_constraints(md);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;
  return svd.matrixV().rightCols(sv.size() - rank);
}

int commutant_dimension(const ModularData& md, double tol) {
  return static_cast<int>(commutant_basis(md, tol).cols());
}

std::vector<Eigen::MatrixXi> enumerate_invariants(const ModularData& md,
                                                  int bound) {
  const int n = md.nlabels();
  const Eigen::MatrixXd basis = commutant_basis(md);  // (n^2) x k
  const int k = static_cast<int>(basis.cols());
  std::vector<Eigen::MatrixXi> out;
  if (k == 0) return out;

  // pick k well-conditioned coordinate positions (rows of `basis`)
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis.transpose());
  const auto perm = qr.colsPermutation().indices();
  Eigen::MatrixXd bs(k, k);  // rows: chosen positions
  std::vector<int> pos(k);
  for (int i = 0; i < k; ++i) {
    pos[i] = perm[i];
    bs.row(i) = basis.row(perm[i]);
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bs);

  std::vector<int> vals(k, 0);
  const int radix = bound + 1;
  long total = 1;
  for (int i = 0; i < k; ++i) total *= radix;
  for (long it = 0; it < total; ++it) {
    long t = it;
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
      rhs[i] = static_cast<double>(t % radix);
      t /= radix;
    }
    const Eigen::VectorXd coef = lu.solve(rhs);
    const Eigen::VectorXd zvec = basis * coef;
    Eigen::MatrixXi z(n, n);
    bool ok = true;
    for (int c = 0; c < n && ok; ++c)
      for (int r = 0; r < n && ok; ++r) {
        const double v = zvec[c * n + r];
        const double rv = std::round(v);
        if (std::abs(v - rv) > 1e-6 || rv < -0.5 || rv > bound + 0.5) ok = false;
        z(r, c) = static_cast<int>(rv);
      }
    if (!ok || z(0, 0) != 1) continue;
    bool dup = false;
    for (const auto& u : out)
      if (u == z) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(z);
  }
  return out;
}

Eigen::MatrixXi invariant_diagonal(int m) {
  return Eigen::MatrixXi::Identity(m + 2, m + 2);
}

Eigen::MatrixXi invariant_qswap(int m) {
  Eigen::MatrixXi z = Eigen::MatrixXi::Identity(m + 2, m + 2);
  z(m, m) = z(m + 1, m + 1) = 0;
  z(m, m + 1) = z(m + 1, m) = 1;
  return z;
}

double invariant_residual(const ModularData& md, const Eigen::MatrixXi& z) {
  const Eigen::MatrixXcd zc = z.cast<double>().cast<cd>();
  const double rs = (zc * md.S - md.S * zc).cwiseAbs().maxCoeff();
  const double rt = (zc * md.T - md.T * zc).cwiseAbs().maxCoeff();
  return std::max(rs, rt);
}

}  // namespace so3cat

#include "so3cat/preproj.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "so3cat/qnum.hpp"

namespace so3cat {

// --- closed-form Hilbert series ----------------------------------------------

HilbertSeries hilbert_closed(const Graph& g, int max_degree) {
  const int m = g.m;
  if (max_degree < 0) max_degree = 2 * m + 4;
  const Eigen::MatrixXd D = g.adjacency();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(g.nv, g.nv);
  std::vector<Eigen::MatrixXd> H;
  H.reserve(max_degree + 1);
  for (int p = 0; p <= max_degree; ++p) {
    const double cp =
        (p == 0 || p == 1 || p == 2 * m + 1 || p == 2 * m + 2) ? 1.0 : 0.0;
    Eigen::MatrixXd Hp = cp * I;
    if (p >= 1) Hp -= (I - D) * H[p - 1];
    if (p >= 2) Hp -= H[p - 2];
    H.push_back(std::move(Hp));
  }
  HilbertSeries hs;
  hs.m = m;
  hs.coeff.reserve(max_degree + 1);
  for (int p = 0; p <= max_degree; ++p) {
    Eigen::MatrixXi R(g.nv, g.nv);
    for (int i = 0; i < g.nv; ++i)
      for (int j = 0; j < g.nv; ++j) {
        const double v = H[p](i, j);
        const double r = std::round(v);
        hs.rounding_error = std::max(hs.rounding_error, std::abs(v - r));
        R(i, j) = static_cast<int>(r);
      }
    if (hs.rounding_error > 1e-6)
      throw std::runtime_error(
          "hilbert_closed: non-integer coefficient at degree " +
          std::to_string(p));
    if (p > 2 * m + 2 && R.cwiseAbs().sum() != 0)
      throw std::runtime_error("hilbert_closed: series blow-up at degree " +
                               std::to_string(p));
    hs.coeff.push_back(std::move(R));
  }
  return hs;
}

// --- graded dimensions ----------------------------------------------------------

namespace {

constexpr double kRankCut = 1e-8;

// Orthonormal bases of the joint kernel of e_i, u_i (i < p) per degree. The
// kernel over i <= p-2 at degree p is spanned by (kernel at p-1).edge, so
// only the restriction of [3] e_{p-1} + u_{p-1} -- a positive semidefinite
// sum whose column span equals Im e_{p-1} + Im u_{p-1} -- needs a new rank
// decision at each degree.
template <typename Scalar>
struct KernelTower {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<PathBlocks> pb;
  std::vector<std::map<BlockKey, Mat>> U;
};

template <typename Scalar>
KernelTower<Scalar> kernel_tower(const Graph& g, const CellMap& W, int pmax,
                                 RankGap* gap) {
  using Mat = typename KernelTower<Scalar>::Mat;
  KernelTower<Scalar> t;
  t.pb.resize(pmax + 1);
  t.U.resize(pmax + 1);
  for (int p = 0; p <= pmax; ++p) t.pb[p] = path_blocks(g, p);
  for (const auto& [k, v] : t.pb[0].blocks) t.U[0][k] = Mat::Identity(1, 1);
  if (pmax >= 1)
    for (const auto& [k, v] : t.pb[1].blocks) {
      const int d = static_cast<int>(v.size());
      t.U[1][k] = Mat::Identity(d, d);
    }
  const double q3 = loop_weight(g.m);
  for (int p = 2; p <= pmax; ++p) {
    const PathBlocks& big = t.pb[p];
    const PathBlocks& small = t.pb[p - 1];
    const auto es = e_operator_sparse<Scalar>(g, p - 1, big);
    const auto us = u_operator_sparse<Scalar>(g, W, p - 1, big);
    for (const auto& [key, plist] : big.blocks) {
      const int d = static_cast<int>(plist.size());
      std::vector<std::pair<BlockKey, int>> groups;  // (head block, tail edge)
      int r = 0;
      for (int a = 0; a < g.ne(); ++a) {
        if (g.dst[a] != key.second) continue;
        const BlockKey sk{key.first, g.src[a]};
        const auto it = t.U[p - 1].find(sk);
        if (it == t.U[p - 1].end() || it->second.cols() == 0) continue;
        groups.emplace_back(sk, a);
        r += static_cast<int>(it->second.cols());
      }
      if (r == 0) {
        t.U[p][key] = Mat(d, 0);
        continue;
      }
      Mat B = Mat::Zero(d, r);
      int c0 = 0;
      Path q;
      for (const auto& [sk, a] : groups) {
        const auto& spaths = small.blocks.at(sk);
        const Mat& Uk = t.U[p - 1].at(sk);
        for (int i = 0; i < static_cast<int>(spaths.size()); ++i) {
          q = spaths[i];
          q.push_back(a);
          B.row(big.index(key, q)).segment(c0, Uk.cols()) = Uk.row(i);
        }
        c0 += static_cast<int>(Uk.cols());
      }
      const Mat SB = (es.at(key) * B) * Scalar(q3) + us.at(key) * B;
      Mat K = B.adjoint() * SB;
      K = ((K + Mat(K.adjoint())) * Scalar(0.5)).eval();
      Eigen::SelfAdjointEigenSolver<Mat> eig(K);
      const auto& ev = eig.eigenvalues();
      const double scale = std::max(ev(r - 1), 1.0);
      const double thr = kRankCut * scale;
      int nk = 0;
      while (nk < r && ev(nk) <= thr) ++nk;
      if (gap) {
        if (nk < r)
          gap->smallest_kept = std::min(gap->smallest_kept, ev(nk) / scale);
        if (nk > 0)
          gap->largest_dropped =
              std::max(gap->largest_dropped, std::abs(ev(nk - 1)) / scale);
      }
      t.U[p][key] = B * eig.eigenvectors().leftCols(nk);
    }
  }
  return t;
}

template <typename Scalar>
std::vector<Eigen::MatrixXi> collect_dims(const Graph& g, const CellMap& W,
                                          int pmax, RankGap* gap) {
  const auto t = kernel_tower<Scalar>(g, W, pmax, gap);
  std::vector<Eigen::MatrixXi> out;
  out.reserve(pmax + 1);
  for (int p = 0; p <= pmax; ++p) {
    Eigen::MatrixXi H = Eigen::MatrixXi::Zero(g.nv, g.nv);
    for (const auto& [k, U] : t.U[p])
      H(k.first, k.second) = static_cast<int>(U.cols());
    out.push_back(std::move(H));
  }
  return out;
}

}  // namespace

std::vector<Eigen::MatrixXi> graded_dims_direct_all(const Graph& g,
                                                    const CellMap& W, int pmax,
                                                    RankGap* gap) {
  if (pmax < 0) throw std::invalid_argument("graded_dims_direct_all: pmax < 0");
  return cells_are_real(W) ? collect_dims<double>(g, W, pmax, gap)
                           : collect_dims<Cplx>(g, W, pmax, gap);
}

Eigen::MatrixXi graded_dim_direct(const Graph& g, const CellMap& W, int p,
                                  RankGap* gap) {
  return graded_dims_direct_all(g, W, p, gap).back();
}

std::vector<QuotientBasis> quotient_bases(const Graph& g, const CellMap& W,
                                          int pmax) {
  if (!cells_are_real(W))
    throw std::invalid_argument("quotient_bases: real cell systems only");
  auto t = kernel_tower<double>(g, W, pmax, nullptr);
  std::vector<QuotientBasis> out(pmax + 1);
  for (int p = 0; p <= pmax; ++p) {
    out[p].pb = std::move(t.pb[p]);
    out[p].U = std::move(t.U[p]);
  }
  return out;
}

// --- resolution ------------------------------------------------------------------

namespace {

int svd_rank(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double thr = kRankCut * std::max(sv(0), 1.0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++r;
  return r;
}

}  // namespace

double ResolutionReport::max_residual() const {
  double w = 0.0;
  for (const auto& [k, v] : worst) w = std::max(w, v);
  return w;
}

ResolutionReport resolution_check(const Graph& g, const CellMap& W,
                                  int max_degree, double tol) {
  if (!cells_are_real(W))
    throw std::invalid_argument("resolution_check: real cell systems only");
  const int m = g.m;
  const int pmax = max_degree < 0 ? 2 * m + 3 : max_degree;
  const auto Us = quotient_bases(g, W, pmax);
  const Eigen::VectorXd& phi = g.phi;

  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;

  const auto A_dim = [&](int p, const BlockKey& k) -> int {
    if (p < 0 || p > pmax) return 0;
    const auto it = Us[p].U.find(k);
    return it == Us[p].U.end() ? 0 : static_cast<int>(it->second.cols());
  };

  // A_{p-1} (x) V: basis items (head block, class column, tensor edge),
  // grouped by the (source, range) block they land in.
  struct AVItem {
    BlockKey ak;
    int col;
    int edge;
  };
  using Layout = std::map<BlockKey, std::vector<AVItem>>;
  const auto av_layout = [&](int p) -> Layout {
    Layout lay;
    if (p - 1 < 0 || p - 1 > pmax) return lay;
    for (const auto& [k, basis] : Us[p - 1].U)
      for (int a : g.edges_from(k.second)) {
        const BlockKey tgt{k.first, g.dst[a]};
        for (int col = 0; col < static_cast<int>(basis.cols()); ++col)
          lay[tgt].push_back({k, col, a});
      }
    return lay;
  };

  const auto raw_to_class = [&](int p, const BlockKey& k, const Vec& v) -> Vec {
    const auto it = Us[p].U.find(k);
    if (it == Us[p].U.end() || it->second.cols() == 0) return Vec(0);
    return it->second.transpose() * v;
  };
  const auto lift = [&](int p, const BlockKey& k, int col) -> Vec {
    return Us[p].U.at(k).col(col);
  };
  // (combination of length-p paths in block k) . a, as raw degree-(p+1) coords
  const auto concat_vec = [&](int p, const BlockKey& k, const Vec& v,
                              int a) -> Vec {
    const auto& spaths = Us[p].pb.blocks.at(k);
    const BlockKey tk{k.first, g.dst[a]};
    const auto& tpaths = Us[p + 1].pb.blocks.at(tk);
    Vec out = Vec::Zero(static_cast<int>(tpaths.size()));
    Path q;
    for (int i = 0; i < static_cast<int>(spaths.size()); ++i) {
      if (v(i) == 0.0) continue;
      q = spaths[i];
      q.push_back(a);
      out(Us[p + 1].pb.index(tk, q)) += v(i);
    }
    return out;
  };
  const auto cell_or_zero = [&](int a, int b, int c) -> double {
    const auto it = W.find(canon_loop(a, b, c));
    return it == W.end() ? 0.0 : it->second.real();
  };
  // contraction coefficients of psi2 on the edge pair (a', a)
  const auto psi2_pair = [&](int ap, int a) {
    std::vector<std::pair<int, double>> out;
    const double den = std::sqrt(phi(g.src[ap]) * phi(g.dst[a]));
    for (int lam : g.edges_from(g.dst[a]))
      if (g.dst[lam] == g.src[ap]) {
        const double w = cell_or_zero(ap, a, lam);
        if (w != 0.0) out.emplace_back(lam, w / den);
      }
    return out;
  };

  ResolutionReport rep;
  const auto rec = [&](const char* name, double v, int p, const BlockKey& k) {
    auto [it, ins] = rep.worst.emplace(name, v);
    if (!ins) it->second = std::max(it->second, v);
    if (v > tol) {
      std::ostringstream os;
      os << name << " degree " << p << " block (" << k.first << "," << k.second
         << ") = " << v;
      rep.issues.push_back(os.str());
    }
  };

  using PosKey = std::tuple<int, int, int, int>;  // (block, column, edge)
  static const std::vector<AVItem> kEmpty;

  for (int p = 0; p <= pmax; ++p) {
    std::set<BlockKey> keys;
    for (int q = std::max(0, p - 3); q <= p; ++q)
      for (const auto& [k, u] : Us[q].U) keys.insert(k);
    for (int v = 0; v < g.nv; ++v) keys.insert({v, v});
    const Layout lay1 = av_layout(p);
    const Layout lay2 = av_layout(p - 1);
    const bool C1R = (p == 2 * m + 1);  // extra R summand in (A(x)V)+R[2m+1]
    const bool C2R = (p == 2);          // extra R summand in R[2]+(A(x)V)[1]
    const bool C4R = (p == 2 * m + 3);  // the left end R[2m+3]
    const auto items = [&](const Layout& lay,
                           const BlockKey& k) -> const std::vector<AVItem>& {
      const auto it = lay.find(k);
      return it == lay.end() ? kEmpty : it->second;
    };

    for (const BlockKey& k : keys) {
      const bool diag = k.first == k.second;
      const auto& it1 = items(lay1, k);
      const auto& it2 = items(lay2, k);
      const int d0 = A_dim(p, k);
      const int d1 = static_cast<int>(it1.size()) + (C1R && diag ? 1 : 0);
      const int d2 = (C2R && diag ? 1 : 0) + static_cast<int>(it2.size());
      const int d3 = A_dim(p - 3, k);
      const int d4 = (C4R && diag) ? 1 : 0;
      if (std::max({d0, d1, d2, d3, d4}) == 0) continue;

      Mat m1 = Mat::Zero(d0, d1), m2 = Mat::Zero(d1, d2),
          m3 = Mat::Zero(d2, d3), m4 = Mat::Zero(d3, d4);
      std::map<PosKey, int> pos1, pos2;
      for (int i = 0; i < static_cast<int>(it1.size()); ++i)
        pos1[{it1[i].ak.first, it1[i].ak.second, it1[i].col, it1[i].edge}] = i;
      for (int i = 0; i < static_cast<int>(it2.size()); ++i)
        pos2[{it2[i].ak.first, it2[i].ak.second, it2[i].col, it2[i].edge}] = i;

      // mu1: concatenate and project; the R[2m+1] summand maps to zero.
      // (mu0 mu1 = 0 is automatic: mu0 vanishes except at degree 0, where
      // it is the identity and d1 = 0.)
      if (d0 > 0)
        for (int j = 0; j < static_cast<int>(it1.size()); ++j) {
          const Vec raw = concat_vec(
              p - 1, it1[j].ak, lift(p - 1, it1[j].ak, it1[j].col),
              it1[j].edge);
          m1.col(j) = raw_to_class(p, k, raw);
        }

      // mu2 on the R[2] summand: v -> sum_b sqrt(phi_r(b)/phi_v) b (x) b~.
      int off2 = 0;
      if (C2R && diag) {
        const int v = k.first;
        for (int b : g.edges_from(v)) {
          const BlockKey bk{v, g.dst[b]};
          const int eb = Us[1].pb.index(bk, Path{b});
          m2(pos1.at({bk.first, bk.second, eb, g.partner[b]}), 0) +=
              std::sqrt(phi(g.dst[b]) / phi(v));
        }
        off2 = 1;
      }

      // mu2 on A_{p-2} (x) V: psi2*(xa) - psi1*(psi2(x (x) a)), plus the
      // class of xa in the R[2m+1] slot at the top degree.
      for (int j = 0; j < static_cast<int>(it2.size()); ++j) {
        const BlockKey ak = it2[j].ak;
        const int a = it2[j].edge;
        const int pdeg = p - 2;
        const int x = ak.first;
        const Vec x_vec = lift(pdeg, ak, it2[j].col);
        const Vec xa_raw = concat_vec(pdeg, ak, x_vec, a);
        const BlockKey xak{x, g.dst[a]};
        Vec out = Vec::Zero(d1);
        // psi2*: replace the last edge c of xa by pairs (b', b) weighted by
        // conj W(b'.b.c~) / sqrt(phi_s(b') phi_r(b)).
        const auto& blkXA = Us[pdeg + 1].pb.blocks.at(xak);
        for (int i = 0; i < static_cast<int>(blkXA.size()); ++i) {
          if (xa_raw(i) == 0.0) continue;
          const Path& q = blkXA[i];
          const int cc = q.back();
          for (int bp : g.edges_from(g.src[cc]))
            for (int b2 : g.edges_from(g.dst[bp])) {
              if (g.dst[b2] != g.dst[cc]) continue;
              const double w = cell_or_zero(bp, b2, g.partner[cc]);
              if (w == 0.0) continue;
              const double coeff =
                  w / std::sqrt(phi(g.src[bp]) * phi(g.dst[b2]));
              const BlockKey tgtAk{x, g.dst[bp]};
              Vec colv;
              if (pdeg == 0) {
                colv = Vec::Zero(
                    static_cast<int>(Us[1].pb.blocks.at(tgtAk).size()));
                colv(Us[1].pb.index(tgtAk, Path{bp})) = 1.0;
              } else {
                const BlockKey yk{x, g.src[bp]};
                const auto& blkY = Us[pdeg].pb.blocks.at(yk);
                Vec yv = Vec::Zero(static_cast<int>(blkY.size()));
                yv(Us[pdeg].pb.index(yk, Path(q.begin(), q.end() - 1))) = 1.0;
                colv = concat_vec(pdeg, yk, yv, bp);
              }
              const Vec cls = raw_to_class(pdeg + 1, tgtAk, colv);
              for (int colc = 0; colc < cls.size(); ++colc) {
                const auto itp =
                    pos1.find({tgtAk.first, tgtAk.second, colc, b2});
                if (itp != pos1.end())
                  out(itp->second) += xa_raw(i) * coeff * cls(colc);
              }
            }
        }
        // psi1* psi2: contract the last edge of x against a, then re-expand.
        if (pdeg >= 1) {
          const auto& blkX = Us[pdeg].pb.blocks.at(ak);
          for (int i = 0; i < static_cast<int>(blkX.size()); ++i) {
            if (x_vec(i) == 0.0) continue;
            const Path& q = blkX[i];
            const int apz = q.back();
            for (const auto& [lam, cf] : psi2_pair(apz, a)) {
              const int lt = g.partner[lam];
              const BlockKey zk{x, g.dst[lt]};
              Vec zraw;
              if (pdeg == 1) {
                zraw = Vec::Zero(
                    static_cast<int>(Us[1].pb.blocks.at(zk).size()));
                zraw(Us[1].pb.index(zk, Path{lt})) = 1.0;
              } else {
                const BlockKey xpk{x, g.src[apz]};
                const auto& blkXp = Us[pdeg - 1].pb.blocks.at(xpk);
                Vec xpv = Vec::Zero(static_cast<int>(blkXp.size()));
                xpv(Us[pdeg - 1].pb.index(xpk,
                                          Path(q.begin(), q.end() - 1))) = 1.0;
                zraw = concat_vec(pdeg - 1, xpk, xpv, lt);
              }
              for (int cp : g.edges_from(g.dst[a])) {
                const double w2 = std::sqrt(phi(g.dst[cp]) / phi(g.dst[a]));
                const Vec zc = concat_vec(pdeg, zk, zraw, cp);
                const BlockKey tgt{x, g.dst[cp]};
                const Vec cls = raw_to_class(pdeg + 1, tgt, zc);
                for (int colc = 0; colc < cls.size(); ++colc) {
                  const auto itp =
                      pos1.find({tgt.first, tgt.second, colc, g.partner[cp]});
                  if (itp != pos1.end())
                    out(itp->second) -= x_vec(i) * cf * w2 * cls(colc);
                }
              }
            }
          }
        }
        if (C1R && diag) {
          const Vec cls = raw_to_class(pdeg + 1, xak, xa_raw);
          if (x == g.dst[a] && cls.size()) out(d1 - 1) += cls(0);
        }
        m2.col(off2 + j) += out;
      }

      // mu3: x -> sum_b sqrt(phi_r(b)/phi_s(b)) xb (x) b~; R[2]-component 0.
      const int off_r2 = (C2R && diag) ? 1 : 0;
      for (int col = 0; col < d3; ++col) {
        const Vec vec = lift(p - 3, k, col);
        for (int b : g.edges_from(k.second)) {
          const double coeff = std::sqrt(phi(g.dst[b]) / phi(k.second));
          const Vec raw = concat_vec(p - 3, k, vec, b);
          const BlockKey tgt{k.first, g.dst[b]};
          const Vec cls = raw_to_class(p - 2, tgt, raw);
          for (int colc = 0; colc < cls.size(); ++colc) {
            const auto itp =
                pos2.find({tgt.first, tgt.second, colc, g.partner[b]});
            if (itp != pos2.end())
              m3(off_r2 + itp->second, col) += coeff * cls(colc);
          }
        }
      }

      // mu4: inclusion of the one-dimensional top-degree block.
      if (C4R && diag && d3 == 1) m4(0, 0) = 1.0;

      const auto mx = [](const Mat& M) {
        return M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
      };
      rec("mu1.mu2", mx(m1 * m2), p, k);
      rec("mu2.mu3", mx(m2 * m3), p, k);
      rec("mu3.mu4", mx(m3 * m4), p, k);
      const int rk1 = svd_rank(m1), rk2 = svd_rank(m2), rk3 = svd_rank(m3),
                rk4 = svd_rank(m4);
      const int ker0 = p > 0 ? d0 : 0;  // mu0 is the identity at degree 0
      rec("exact@A", std::abs(rk1 - ker0), p, k);
      rec("exact@AV", std::abs((d1 - rk1) - rk2), p, k);
      rec("exact@RAV", std::abs((d2 - rk2) - rk3), p, k);
      rec("exact@A3", std::abs((d3 - rk3) - rk4), p, k);
      rec("mu4-inj", std::abs(d4 - rk4), p, k);
      const int chi = d0 - d1 + d2 - d3 + d4 - ((p == 0 && diag) ? 1 : 0);
      rec("euler", std::abs(chi), p, k);
    }
  }
  return rep;
}

}  // namespace so3cat

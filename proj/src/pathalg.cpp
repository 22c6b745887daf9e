#include "so3cat/pathalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "so3cat/parallel.hpp"
#include "so3cat/qnum.hpp"

namespace so3cat {

namespace {

std::vector<std::vector<int>> out_edges(const Graph& g) {
  std::vector<std::vector<int>> out(g.nv);
  for (int e = 0; e < g.ne(); ++e) out[g.src[e]].push_back(e);
  return out;
}

template <typename Scalar>
Scalar cast_cell(const Cplx& v) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return v.real();
  } else {
    return v;
  }
}

}  // namespace

// --- path spaces -------------------------------------------------------------

int PathBlocks::total_paths() const {
  int t = 0;
  for (const auto& [k, v] : blocks) t += static_cast<int>(v.size());
  return t;
}

int PathBlocks::index(const BlockKey& key, const Path& p) const {
  const auto& v = blocks.at(key);
  auto it = std::lower_bound(v.begin(), v.end(), p);
  if (it == v.end() || *it != p) throw std::out_of_range("path not in block");
  return static_cast<int>(it - v.begin());
}

PathBlocks path_blocks(const Graph& g, int n) {
  if (n < 0) throw std::invalid_argument("path_blocks: negative length");
  PathBlocks pb;
  pb.n = n;
  if (n == 0) {
    for (int v = 0; v < g.nv; ++v) pb.blocks[{v, v}] = {Path{}};
    return pb;
  }
  const auto out = out_edges(g);
  std::vector<Path> frontier;
  frontier.reserve(g.ne());
  for (int e = 0; e < g.ne(); ++e) frontier.push_back({e});
  for (int step = 1; step < n; ++step) {
    std::vector<Path> next;
    next.reserve(frontier.size() * 3);
    for (const Path& p : frontier)
      for (int e : out[g.dst[p.back()]]) {
        Path q = p;
        q.push_back(e);
        next.push_back(std::move(q));
      }
    frontier = std::move(next);
  }
  for (Path& p : frontier) {
    const BlockKey key{g.src[p.front()], g.dst[p.back()]};
    pb.blocks[key].push_back(std::move(p));
  }
  for (auto& [k, v] : pb.blocks) std::sort(v.begin(), v.end());
  return pb;
}

// --- block operators ----------------------------------------------------------

template <typename Scalar>
BlockOpT<Scalar> BlockOpT<Scalar>::zeros(const PathBlocks& pb) {
  BlockOpT r;
  for (const auto& [k, v] : pb.blocks)
    r.mats[k] = Mat::Zero(static_cast<int>(v.size()), static_cast<int>(v.size()));
  return r;
}

template <typename Scalar>
BlockOpT<Scalar> BlockOpT<Scalar>::identity(const PathBlocks& pb) {
  BlockOpT r;
  for (const auto& [k, v] : pb.blocks)
    r.mats[k] =
        Mat::Identity(static_cast<int>(v.size()), static_cast<int>(v.size()));
  return r;
}

template <typename Scalar>
BlockOpT<Scalar> BlockOpT<Scalar>::operator+(const BlockOpT& o) const {
  BlockOpT r;
  for (const auto& [k, a] : mats) r.mats[k] = a + o.mats.at(k);
  return r;
}

template <typename Scalar>
BlockOpT<Scalar> BlockOpT<Scalar>::operator-(const BlockOpT& o) const {
  BlockOpT r;
  for (const auto& [k, a] : mats) r.mats[k] = a - o.mats.at(k);
  return r;
}

template <typename Scalar>
BlockOpT<Scalar> BlockOpT<Scalar>::operator*(Scalar c) const {
  BlockOpT r;
  for (const auto& [k, a] : mats) r.mats[k] = a * c;
  return r;
}

template <typename Scalar>
BlockOpT<Scalar> BlockOpT<Scalar>::operator*(const BlockOpT& o) const {
  BlockOpT r;
  std::vector<const BlockKey*> keys;
  double flops = 0.0;
  for (const auto& [k, a] : mats) {
    r.mats[k] = Mat();
    keys.push_back(&k);
    const double nrow = static_cast<double>(a.rows());
    flops += nrow * nrow * nrow;
  }
  // Parallelize over blocks only when the product is genuinely large.
  if (flops < 1e8) {
    for (const auto& [k, a] : mats) r.mats.at(k) = a * o.mats.at(k);
  } else {
    parallel_for(static_cast<int>(keys.size()), [&](int i) {
      const BlockKey& k = *keys[i];
      r.mats.at(k) = mats.at(k) * o.mats.at(k);
    });
  }
  return r;
}

template <typename Scalar>
BlockOpT<Scalar> BlockOpT<Scalar>::adjoint() const {
  BlockOpT r;
  for (const auto& [k, a] : mats) r.mats[k] = a.adjoint();
  return r;
}

template <typename Scalar>
BlockOpT<Scalar> BlockOpT<Scalar>::inverse() const {
  BlockOpT r;
  for (const auto& [k, a] : mats) r.mats[k] = a.partialPivLu().inverse();
  return r;
}

template <typename Scalar>
double BlockOpT<Scalar>::norm() const {
  double s = 0.0;
  for (const auto& [k, a] : mats) s += a.squaredNorm();
  return std::sqrt(s);
}

template <typename Scalar>
double op_distance(const BlockOpT<Scalar>& a, const BlockOpT<Scalar>& b) {
  double d = 0.0;
  for (const auto& [k, m] : a.mats) {
    const auto& n = b.mats.at(k);
    if (m.size()) d = std::max(d, (m - n).cwiseAbs().maxCoeff());
  }
  return d;
}

BlockOpC to_complex(const BlockOpR& x) {
  BlockOpC r;
  for (const auto& [k, m] : x.mats) r.mats[k] = m.cast<Cplx>();
  return r;
}

bool cells_are_real(const CellMap& W) {
  for (const auto& [k, v] : W)
    if (std::abs(v.imag()) > 1e-15) return false;
  return true;
}

// --- generators --------------------------------------------------------------

namespace {

template <typename Scalar>
using TripletMap = std::map<BlockKey, std::vector<Eigen::Triplet<Scalar>>>;

template <typename Scalar>
TripletMap<Scalar> e_triplets(const Graph& g, int j, const PathBlocks& pb) {
  if (j < 1 || j >= pb.n)
    throw std::invalid_argument("e_operator: position out of range");
  const auto out = out_edges(g);
  TripletMap<Scalar> trip;
  for (const auto& [key, plist] : pb.blocks) {
    auto& tl = trip[key];
    Path pp;
    for (int i = 0; i < static_cast<int>(plist.size()); ++i) {
      const Path& p = plist[i];
      const int beta = p[j - 1];
      if (p[j] != g.partner[beta]) continue;
      const int x = g.src[beta];
      pp = p;
      for (int gam : out[x]) {
        pp[j - 1] = gam;
        pp[j] = g.partner[gam];
        const double coef =
            std::sqrt(g.phi(g.dst[beta]) * g.phi(g.dst[gam])) / g.phi(x);
        tl.emplace_back(i, pb.index(key, pp), Scalar(coef));
      }
    }
  }
  return trip;
}

template <typename Scalar>
TripletMap<Scalar> u_triplets(const Graph& g, const CellMap& W, int j,
                              const PathBlocks& pb) {
  if (j < 1 || j >= pb.n)
    throw std::invalid_argument("u_operator: position out of range");
  if (std::is_same_v<Scalar, double> && !cells_are_real(W))
    throw std::invalid_argument("u_operator: complex cells need BlockOpC");
  const auto out = out_edges(g);
  TripletMap<Scalar> trip;
  for (const auto& [key, plist] : pb.blocks) {
    auto& tl = trip[key];
    Path pp;
    for (int i = 0; i < static_cast<int>(plist.size()); ++i) {
      const Path& p = plist[i];
      const int eta1 = p[j - 1], eta2 = p[j];
      const int x = g.src[eta1], y = g.dst[eta2];
      std::vector<int> lams;
      for (int l : out[y])
        if (g.dst[l] == x) lams.push_back(l);
      pp = p;
      for (int z1 : out[x]) {
        for (int z2 : out[g.dst[z1]]) {
          if (g.dst[z2] != y) continue;
          Cplx val = 0.0;
          for (int lam : lams)
            val += cell_value(W, eta1, eta2, lam) *
                   std::conj(cell_value(W, z1, z2, lam));
          if (val == 0.0) continue;
          pp[j - 1] = z1;
          pp[j] = z2;
          tl.emplace_back(i, pb.index(key, pp),
                          cast_cell<Scalar>(val / (g.phi(x) * g.phi(y))));
        }
      }
    }
  }
  return trip;
}

template <typename Scalar>
BlockOpT<Scalar> dense_from(const TripletMap<Scalar>& trip,
                            const PathBlocks& pb) {
  auto X = BlockOpT<Scalar>::zeros(pb);
  for (const auto& [k, tl] : trip) {
    auto& M = X.mats.at(k);
    for (const auto& t : tl) M(t.row(), t.col()) += t.value();
  }
  return X;
}

template <typename Scalar>
SparseBlocks<Scalar> sparse_from(const TripletMap<Scalar>& trip,
                                 const PathBlocks& pb) {
  SparseBlocks<Scalar> X;
  for (const auto& [k, v] : pb.blocks) {
    const int d = static_cast<int>(v.size());
    Eigen::SparseMatrix<Scalar> M(d, d);
    const auto it = trip.find(k);
    if (it != trip.end()) M.setFromTriplets(it->second.begin(), it->second.end());
    X[k] = std::move(M);
  }
  return X;
}

}  // namespace

template <typename Scalar>
BlockOpT<Scalar> e_operator(const Graph& g, int j, const PathBlocks& pb) {
  return dense_from(e_triplets<Scalar>(g, j, pb), pb);
}

template <typename Scalar>
BlockOpT<Scalar> u_operator(const Graph& g, const CellMap& W, int j,
                            const PathBlocks& pb) {
  return dense_from(u_triplets<Scalar>(g, W, j, pb), pb);
}

template <typename Scalar>
SparseBlocks<Scalar> e_operator_sparse(const Graph& g, int j,
                                       const PathBlocks& pb) {
  return sparse_from(e_triplets<Scalar>(g, j, pb), pb);
}

template <typename Scalar>
SparseBlocks<Scalar> u_operator_sparse(const Graph& g, const CellMap& W, int j,
                                       const PathBlocks& pb) {
  return sparse_from(u_triplets<Scalar>(g, W, j, pb), pb);
}

template <typename Scalar>
BlockOpT<Scalar> embed_operator(const Graph& g, const BlockOpT<Scalar>& X,
                                const PathBlocks& small,
                                const PathBlocks& big) {
  const int ns = small.n;
  if (ns > big.n)
    throw std::invalid_argument("embed_operator: small space is larger");
  auto Y = BlockOpT<Scalar>::zeros(big);
  for (const auto& [key, plist] : big.blocks) {
    auto& M = Y.mats.at(key);
    Path head(ns), col;
    for (int i = 0; i < static_cast<int>(plist.size()); ++i) {
      const Path& p = plist[i];
      std::copy(p.begin(), p.begin() + ns, head.begin());
      const int z = ns ? g.dst[head.back()] : key.first;
      const BlockKey sk{key.first, z};
      const auto& sp = small.blocks.at(sk);
      const auto& Tm = X.mats.at(sk);
      const int ih = small.index(sk, head);
      col = p;
      for (int c = 0; c < static_cast<int>(sp.size()); ++c) {
        const Scalar v = Tm(ih, c);
        if (v == Scalar(0)) continue;
        std::copy(sp[c].begin(), sp[c].end(), col.begin());
        M(i, big.index(key, col)) += v;
      }
    }
  }
  return Y;
}

// --- traces --------------------------------------------------------------------

template <typename Scalar>
double markov_trace(const Graph& g, const BlockOpT<Scalar>& X, int n) {
  double t = 0.0;
  for (const auto& [k, m] : X.mats) {
    if (!m.size()) continue;
    double d = 0.0;
    for (int i = 0; i < m.rows(); ++i) d += std::real(m(i, i));
    t += d * g.phi(k.second) / g.phi(k.first);
  }
  return t * std::pow(loop_weight(g.m), -n);
}

template <typename Scalar>
double vertex_trace(const Graph& g, const BlockOpT<Scalar>& X, int v) {
  double t = 0.0;
  for (const auto& [k, m] : X.mats) {
    if (k.first != v || !m.size()) continue;
    double d = 0.0;
    for (int i = 0; i < m.rows(); ++i) d += std::real(m(i, i));
    t += d * g.phi(k.second) / g.phi(v);
  }
  return t;
}

// --- Jones-Wenzl tower -----------------------------------------------------------

template <typename Scalar>
JWTowerT<Scalar> jones_wenzl_tower(const Graph& g, const CellMap& W, int jmax) {
  if (jmax < 1) throw std::invalid_argument("jones_wenzl_tower: jmax < 1");
  JWTowerT<Scalar> t;
  t.spaces.resize(jmax + 1);
  t.F.resize(jmax + 1);
  for (int j = 0; j <= jmax; ++j) t.spaces[j] = path_blocks(g, j);
  t.F[1] = BlockOpT<Scalar>::identity(t.spaces[1]);
  const int m = g.m;
  for (int j = 1; j < jmax; ++j) {
    const double c1 = qnum(4 * j, m) / (qnum(2 * j + 1, m) * qnum(2 * j + 2, m));
    const double c2 =
        qnum(4, m) * qnum(2 * j, m) / (qnum(2, m) * qnum(2 * j + 2, m));
    const PathBlocks& sp = t.spaces[j + 1];
    const auto P = embed_operator(g, t.F[j], t.spaces[j], sp);
    // Assemble the sparse middle factor c1 e_j + c2 u_j so each level costs a
    // single dense product P * ((c1 e + c2 u) * P) instead of four.
    const auto te = e_triplets<Scalar>(g, j, sp);
    const auto tu = u_triplets<Scalar>(g, W, j, sp);
    BlockOpT<Scalar> K;
    for (const auto& [key, plist] : sp.blocks) {
      const int d = static_cast<int>(plist.size());
      std::vector<Eigen::Triplet<Scalar>> all;
      if (auto it = te.find(key); it != te.end())
        for (const auto& trp : it->second)
          all.emplace_back(trp.row(), trp.col(), trp.value() * Scalar(c1));
      if (auto it = tu.find(key); it != tu.end())
        for (const auto& trp : it->second)
          all.emplace_back(trp.row(), trp.col(), trp.value() * Scalar(c2));
      Eigen::SparseMatrix<Scalar> M(d, d);
      M.setFromTriplets(all.begin(), all.end());
      K.mats[key] = M * P.mats.at(key);
    }
    t.F[j + 1] = P - P * K;
  }
  return t;
}

// --- relation suite ---------------------------------------------------------------

std::map<std::string, double> tl_relation_residuals(const Graph& g,
                                                    const CellMap& W,
                                                    int depth) {
  if (depth < 4)
    throw std::invalid_argument("tl_relation_residuals: depth must be >= 4");
  const int n = depth, m = g.m;
  const PathBlocks pb = path_blocks(g, n);
  std::vector<BlockOpC> e(n), u(n);
  for (int j = 1; j < n; ++j) {
    e[j] = e_operator<Cplx>(g, j, pb);
    u[j] = u_operator<Cplx>(g, W, j, pb);
  }
  const Cplx q = qval(m);
  const Cplx q2 = q * q, qm2 = 1.0 / q2, q4 = q2 * q2, qm4 = qm2 * qm2;
  auto qd = [m](int k) { return qnum(k, m); };
  const BlockOpC I = BlockOpC::identity(pb);

  std::map<std::string, double> bad;
  auto rec = [&bad](const std::string& name, double v) {
    auto [it, inserted] = bad.emplace(name, v);
    if (!inserted) it->second = std::max(it->second, v);
  };

  for (int j = 1; j < n; ++j) {
    rec("herm", op_distance(e[j], e[j].adjoint()));
    rec("herm", op_distance(u[j], u[j].adjoint()));
    rec("e^2=[3]e", op_distance(e[j] * e[j], e[j] * Cplx(qd(3))));
    rec("u^2=u", op_distance(u[j] * u[j], u[j]));
    rec("ue=0", (u[j] * e[j]).norm());
    rec("eu=0", (e[j] * u[j]).norm());
  }
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      if (std::abs(i - j) <= 1) continue;
      rec("far-comm", op_distance(e[i] * e[j], e[j] * e[i]));
      rec("far-comm", op_distance(u[i] * u[j], u[j] * u[i]));
      rec("far-comm", op_distance(u[i] * e[j], e[j] * u[i]));
    }
  for (int i = 1; i < n; ++i)
    for (int s : {-1, 1}) {
      const int k = i + s;
      if (k < 1 || k >= n) continue;
      rec("eee=e", op_distance(e[i] * e[k] * e[i], e[i]));
      rec("eue=e", op_distance(e[i] * u[k] * e[i], e[i]));
      // cleared-denominator form (valid even where [6] = 0)
      const auto lhs = (u[i] * u[k] * e[i]) * Cplx(qd(3) * qd(4));
      const auto mid = u[i] * e[k] * e[i];
      rec("uue=uee", op_distance(lhs, mid * Cplx(qd(6))));
      const auto rhs =
          u[k] * e[i] + (e[k] * e[i] - e[i]) * Cplx(qd(2) / qd(4));
      rec("uee=ue+..", op_distance(mid, rhs));
    }
  for (int i = 1; i + 1 < n; ++i) {
    const int k = i + 1;
    const Cplx c = qd(2) / qd(4);
    const auto lhsE =
        u[i] * e[k] * u[i] - (u[i] * e[k] + e[k] * u[i]) * c + e[k] * (c * c);
    const auto rhsE =
        u[k] * e[i] * u[k] - (u[k] * e[i] + e[i] * u[k]) * c + e[i] * (c * c);
    rec("exchange-E", op_distance(lhsE, rhsE));
    const Cplx cc = (qd(6) - qd(2) * qd(3)) / (qd(3) * qd(4));
    const Cplx c2 = c * c;
    const auto lhsU = u[i] * u[k] * u[i] - (u[i] * e[k] * u[i]) * cc - u[i] * c2;
    const auto rhsU = u[k] * u[i] * u[k] - (u[k] * e[i] * u[k]) * cc - u[k] * c2;
    rec("exchange-U", op_distance(lhsU, rhsU));
  }

  // BMW images g_j = q^2 + (q^-2 - 1) e_j - (q^2 + q^-2) u_j.
  std::vector<BlockOpC> gi(n), giv(n);
  for (int j = 1; j < n; ++j) {
    gi[j] = I * q2 + e[j] * (qm2 - 1.0) - u[j] * (q2 + qm2);
    giv[j] = gi[j].inverse();
  }
  for (int j = 1; j < n; ++j) {
    rec("g g^-1", op_distance(gi[j] * giv[j], I));
    rec("g-g^-1", op_distance(gi[j] - giv[j], (I - e[j]) * (q2 - qm2)));
    rec("ge=q^-4 e", op_distance(gi[j] * e[j], e[j] * qm4));
    rec("eg=q^-4 e", op_distance(e[j] * gi[j], e[j] * qm4));
    const auto quad = (gi[j] - I * q2) * (gi[j] + I * qm2);
    rec("g-quad", op_distance(quad, e[j] * (-qm4 * (q2 - qm2))));
  }
  for (int i = 1; i + 1 < n; ++i)
    rec("braid",
        op_distance(gi[i] * gi[i + 1] * gi[i], gi[i + 1] * gi[i] * gi[i + 1]));
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j)
      if (std::abs(i - j) > 1)
        rec("braid-far", op_distance(gi[i] * gi[j], gi[j] * gi[i]));
  for (int i = 1; i < n; ++i)
    for (int s : {-1, 1}) {
      const int k = i + s;
      if (k < 1 || k >= n) continue;
      rec("ege=q^4 e", op_distance(e[i] * gi[k] * e[i], e[i] * q4));
      rec("eg^-1e=q^-4 e", op_distance(e[i] * giv[k] * e[i], e[i] * qm4));
      rec("gee=g^-1e", op_distance(gi[i] * e[k] * e[i], giv[k] * e[i]));
    }

  // The BMW kernel element Phi_q must vanish in every representation.
  {
    const Cplx qm6 = qm4 * qm2, qm8 = qm4 * qm4;
    const Cplx a = 1.0 + (1.0 - qm2) * (1.0 - qm2);
    const Cplx den = (q2 + qm2) * (q2 + qm2);
    const Cplx b = (a + (1.0 - q2) * (1.0 - q2)) / den;
    const Cplx cq = (q2 - qm2 + 2.0 * qm4 - 2.0 * qm6 + qm8) / den;
    const Cplx dq = (q - 1.0 / q) * (q - 1.0 / q);
    const auto Fq = u[1] * u[3];
    const auto E2121 = e[2] * e[1] * e[3] * e[2];
    const auto inner = e[2] * q2 + E2121 * (qm2 - 1.0) -
                       (e[2] * u[1] * e[3] * e[2]) * (q2 + qm2);
    const auto Phi = (Fq * e[2] * Fq) * a - Fq * b - (Fq * E2121 * Fq) * cq +
                     (Fq * inner * Fq) * dq;
    rec("Phi_q", Phi.norm());
  }
  return bad;
}

double markov_residual(const Graph& g, int max_depth) {
  if (max_depth < 2)
    throw std::invalid_argument("markov_residual: max_depth < 2");
  double worst = 0.0;
  const double q3 = loop_weight(g.m);
  const auto out = out_edges(g);
  for (int n = 2; n <= max_depth; ++n) {
    const PathBlocks big = path_blocks(g, n);
    const PathBlocks small = path_blocks(g, n - 1);
    const BlockOpR E = e_operator<double>(g, n - 1, big);
    const double scale = std::pow(q3, -n);
    // tr(x e_{n-1}) = [3]^{-1} tr(x) checked on every matrix unit of A_{n-1}:
    // the unit (p,q) pairs give sum_t E[(q,t),(p,t)] phi_{r(t)} / ([3]^n phi_x)
    // against delta_{pq} phi_{r(p)} / ([3]^n phi_x).
    for (const auto& [sk, sp] : small.blocks) {
      const int x = sk.first, z = sk.second;
      Path bp, bq;
      for (int ip = 0; ip < static_cast<int>(sp.size()); ++ip)
        for (int iq = 0; iq < static_cast<int>(sp.size()); ++iq) {
          double lhs = 0.0;
          for (int t : out[z]) {
            bp = sp[ip];
            bp.push_back(t);
            bq = sp[iq];
            bq.push_back(t);
            const BlockKey bk{x, g.dst[t]};
            lhs += E.mats.at(bk)(big.index(bk, bq), big.index(bk, bp)) *
                   g.phi(g.dst[t]);
          }
          lhs *= scale / g.phi(x);
          const double rhs = ip == iq ? scale * g.phi(z) / g.phi(x) : 0.0;
          worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
  }
  return worst;
}

namespace {

template <typename Scalar>
JWReport jw_residuals_impl(const Graph& g, const CellMap& W, int jmax) {
  const auto tower = jones_wenzl_tower<Scalar>(g, W, jmax);
  JWReport rep;
  for (int j = 1; j <= jmax; ++j) {
    const auto& F = tower.F[j];
    for (int v = 0; v < g.nv; ++v)
      rep.trace = std::max(
          rep.trace, std::abs(vertex_trace(g, F, v) - qnum(2 * j + 1, g.m)));
    rep.projection = std::max(rep.projection, op_distance(F * F, F));
    const auto sp_norm = [&F](const SparseBlocks<Scalar>& X) {
      double s = 0.0;
      for (const auto& [k, M] : X) s += (M * F.mats.at(k)).squaredNorm();
      return std::sqrt(s);
    };
    for (int i = 1; i < j; ++i) {
      rep.kills = std::max(
          rep.kills, sp_norm(e_operator_sparse<Scalar>(g, i, tower.spaces[j])));
      rep.kills = std::max(
          rep.kills,
          sp_norm(u_operator_sparse<Scalar>(g, W, i, tower.spaces[j])));
    }
  }
  return rep;
}

}  // namespace

JWReport jw_tower_residuals(const Graph& g, const CellMap& W, int jmax) {
  return cells_are_real(W) ? jw_residuals_impl<double>(g, W, jmax)
                           : jw_residuals_impl<Cplx>(g, W, jmax);
}

// --- the extra generator t ---------------------------------------------------------

BlockOpR t_word(const Graph& g, int m, const std::vector<BlockOpR>& es) {
  (void)g;
  std::vector<std::vector<int>> groups;
  for (int k = 1; k <= m; ++k) {
    std::vector<int> gp;
    for (int i = m - k + 1; i < m + k; i += 2) gp.push_back(i);
    groups.push_back(std::move(gp));
  }
  for (int k = m - 1; k >= 1; --k) {
    std::vector<int> gp;
    for (int i = m - k + 1; i < m + k; i += 2) gp.push_back(i);
    groups.push_back(std::move(gp));
  }
  BlockOpR word;
  bool first = true;
  for (const auto& gp : groups)
    for (int i : gp) {
      word = first ? es.at(i) : word * es.at(i);
      first = false;
    }
  return word;
}

namespace {

// Dense Levenberg-Marquardt with forward-difference Jacobian; `fn` must be
// safe to call concurrently (columns of the Jacobian run in parallel).
Eigen::VectorXd lm_fit(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
    Eigen::VectorXd x, int max_iter, double* out_resid) {
  Eigen::VectorXd r = fn(x);
  double best = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  double lambda = 1e-3;
  const int np = static_cast<int>(x.size());
  for (int it = 0; it < max_iter && best > 1e-12; ++it) {
    Eigen::MatrixXd J(r.size(), np);
    const double h = 1e-7;
    parallel_for(np, [&](int k) {
      Eigen::VectorXd xk = x;
      xk(k) += h;
      J.col(k) = (fn(xk) - r) / h;
    });
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd grad = J.transpose() * r;
    bool accepted = false;
    while (!accepted && lambda < 1e14) {
      Eigen::MatrixXd Ad = A;
      Ad.diagonal().array() += lambda;
      const Eigen::VectorXd xn = x - Ad.ldlt().solve(grad);
      const Eigen::VectorXd rn = fn(xn);
      if (rn.squaredNorm() < r.squaredNorm()) {
        x = xn;
        r = rn;
        best = r.cwiseAbs().maxCoeff();
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 3.0;
      }
    }
    if (!accepted) break;
  }
  if (out_resid) *out_resid = best;
  return x;
}

}  // namespace

TOperator t_operator_solve(const Graph& g, const CellMap& W,
                           std::uint64_t seed, int restarts) {
  if (!cells_are_real(W))
    throw std::invalid_argument("t_operator_solve: needs a real cell system");
  const int m = g.m, n2 = 2 * m;
  const auto tower = jones_wenzl_tower<double>(g, W, n2);
  const PathBlocks& bm = tower.spaces[m];
  const PathBlocks& b2 = tower.spaces[n2];
  const BlockOpR& Fm = tower.F[m];

  std::vector<BlockOpR> es(n2);
  for (int j = 1; j < n2; ++j) es[j] = e_operator<double>(g, j, b2);
  const BlockOpR word = t_word(g, m, es);
  const BlockOpR target = tower.F[n2] * qnum(2 * m + 1, m);

  // Parameterize T = V Msym V^T on the range basis of F_m per block.
  std::vector<BlockKey> keys;
  for (const auto& [k, v] : bm.blocks) keys.push_back(k);
  std::vector<Eigen::MatrixXd> basis(keys.size());
  std::vector<int> rank(keys.size());
  std::map<BlockKey, int> key_index;
  int nparam = 0;
  for (size_t ki = 0; ki < keys.size(); ++ki) {
    key_index[keys[ki]] = static_cast<int>(ki);
    const auto& Fb = Fm.mats.at(keys[ki]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Fb);
    int r = 0;
    for (int i = 0; i < Fb.rows(); ++i)
      if (eig.eigenvalues()(i) > 0.5) ++r;
    basis[ki] = eig.eigenvectors().rightCols(r);
    rank[ki] = r;
    nparam += r * (r + 1) / 2;
  }

  auto unpack = [&](const Eigen::VectorXd& th) {
    BlockOpR T = BlockOpR::zeros(bm);
    int off = 0;
    for (size_t ki = 0; ki < keys.size(); ++ki) {
      const int r = rank[ki];
      Eigen::MatrixXd Ms = Eigen::MatrixXd::Zero(r, r);
      for (int i = 0; i < r; ++i)
        for (int jj = i; jj < r; ++jj) {
          Ms(i, jj) = Ms(jj, i) = th(off);
          ++off;
        }
      T.mats.at(keys[ki]) = basis[ki] * Ms * basis[ki].transpose();
    }
    return T;
  };

  // Precompute the scatter map realizing embed(T) into the length-2m space.
  std::vector<BlockKey> bigkeys;
  for (const auto& [k, v] : b2.blocks) bigkeys.push_back(k);
  struct Ent {
    int bb, row, col, sb, ih, ic;
  };
  std::vector<Ent> scatter;
  {
    Path head(m), col;
    for (size_t bi = 0; bi < bigkeys.size(); ++bi) {
      const BlockKey& bk = bigkeys[bi];
      const auto& plist = b2.blocks.at(bk);
      for (int ip = 0; ip < static_cast<int>(plist.size()); ++ip) {
        const Path& p = plist[ip];
        std::copy(p.begin(), p.begin() + m, head.begin());
        const BlockKey sk{bk.first, g.dst[head.back()]};
        const int sb = key_index.at(sk);
        if (rank[sb] == 0) continue;
        const int ih = bm.index(sk, head);
        const auto& sp = bm.blocks.at(sk);
        col = p;
        for (int ic = 0; ic < static_cast<int>(sp.size()); ++ic) {
          std::copy(sp[ic].begin(), sp[ic].end(), col.begin());
          scatter.push_back({static_cast<int>(bi), ip, b2.index(bk, col),
                             sb, ih, ic});
        }
      }
    }
  }
  auto embed_T = [&](const BlockOpR& T) {
    BlockOpR Tb = BlockOpR::zeros(b2);
    std::vector<Eigen::MatrixXd*> bp(bigkeys.size());
    std::vector<const Eigen::MatrixXd*> sp(keys.size());
    for (size_t i = 0; i < bigkeys.size(); ++i) bp[i] = &Tb.mats.at(bigkeys[i]);
    for (size_t i = 0; i < keys.size(); ++i) sp[i] = &T.mats.at(keys[i]);
    for (const Ent& e : scatter)
      (*bp[e.bb])(e.row, e.col) = (*sp[e.sb])(e.ih, e.ic);
    return Tb;
  };

  int dim1 = 0, dim2 = 0;
  for (const auto& [k, v] : bm.blocks) dim1 += static_cast<int>(v.size() * v.size());
  for (const auto& [k, v] : b2.blocks) dim2 += static_cast<int>(v.size() * v.size());

  auto resid = [&](const Eigen::VectorXd& th) {
    const BlockOpR T = unpack(th);
    const BlockOpR Tb = embed_T(T);
    const BlockOpR r1 = T * T - Fm;
    const BlockOpR r2 = Tb * word * Tb - target;
    Eigen::VectorXd out(dim1 + dim2);
    int off = 0;
    for (const auto& [k, mat] : r1.mats) {
      out.segment(off, mat.size()) =
          Eigen::Map<const Eigen::VectorXd>(mat.data(), mat.size());
      off += static_cast<int>(mat.size());
    }
    for (const auto& [k, mat] : r2.mats) {
      out.segment(off, mat.size()) =
          Eigen::Map<const Eigen::VectorXd>(mat.data(), mat.size());
      off += static_cast<int>(mat.size());
    }
    return out;
  };

  double best_res = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  for (int trial = 0; trial < restarts; ++trial) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    Eigen::VectorXd x0(nparam);
    for (int i = 0; i < nparam; ++i) x0(i) = uni(rng);
    double res = 0.0;
    const Eigen::VectorXd x = lm_fit(resid, x0, 200, &res);
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
    if (best_res < 1e-10) break;
  }

  TOperator out;
  out.T = unpack(best_x);
  out.solver_residual = best_res;
  out.square_residual = op_distance(out.T * out.T, Fm);
  const BlockOpR Tb = embed_T(out.T);
  out.word_residual = op_distance(Tb * word * Tb, target);
  for (int v = 0; v < g.nv; ++v) {
    int total = 0;
    for (const auto& [k, mat] : tower.F[n2].mats) {
      if (k.first != v || !mat.size()) continue;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mat,
                                                         Eigen::EigenvaluesOnly);
      for (int i = 0; i < mat.rows(); ++i)
        if (eig.eigenvalues()(i) > 0.5) ++total;
    }
    out.vertex_ranks.push_back(total);
  }
  for (const auto& [k, mat] : out.T.mats)
    out.block_traces[k] = mat.size() ? std::real(mat.trace()) : 0.0;
  for (int v = 0; v < g.nv; ++v) out.total_trace += vertex_trace(g, out.T, v);
  return out;
}

// --- explicit instantiations ----------------------------------------------------

template struct BlockOpT<double>;
template struct BlockOpT<Cplx>;

template double op_distance<double>(const BlockOpR&, const BlockOpR&);
template double op_distance<Cplx>(const BlockOpC&, const BlockOpC&);

template BlockOpR e_operator<double>(const Graph&, int, const PathBlocks&);
template BlockOpC e_operator<Cplx>(const Graph&, int, const PathBlocks&);
template BlockOpR u_operator<double>(const Graph&, const CellMap&, int,
                                     const PathBlocks&);
template BlockOpC u_operator<Cplx>(const Graph&, const CellMap&, int,
                                   const PathBlocks&);
template SparseBlocks<double> e_operator_sparse<double>(const Graph&, int,
                                                        const PathBlocks&);
template SparseBlocks<Cplx> e_operator_sparse<Cplx>(const Graph&, int,
                                                    const PathBlocks&);
template SparseBlocks<double> u_operator_sparse<double>(const Graph&,
                                                        const CellMap&, int,
                                                        const PathBlocks&);
template SparseBlocks<Cplx> u_operator_sparse<Cplx>(const Graph&,
                                                    const CellMap&, int,
                                                    const PathBlocks&);
template BlockOpR embed_operator<double>(const Graph&, const BlockOpR&,
                                         const PathBlocks&, const PathBlocks&);
template BlockOpC embed_operator<Cplx>(const Graph&, const BlockOpC&,
                                       const PathBlocks&, const PathBlocks&);
template double markov_trace<double>(const Graph&, const BlockOpR&, int);
template double markov_trace<Cplx>(const Graph&, const BlockOpC&, int);
template double vertex_trace<double>(const Graph&, const BlockOpR&, int);
template double vertex_trace<Cplx>(const Graph&, const BlockOpC&, int);
template JWTowerT<double> jones_wenzl_tower<double>(const Graph&,
                                                    const CellMap&, int);
template JWTowerT<Cplx> jones_wenzl_tower<Cplx>(const Graph&, const CellMap&,
                                                int);

}  // namespace so3cat

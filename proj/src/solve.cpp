#include "so3cat/solve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "so3cat/parallel.hpp"
#include "so3cat/qnum.hpp"

namespace so3cat {

namespace {

// ------------------------------------------------------------- equivalence

struct SlotLayout {
  std::vector<LoopKey> loops;
  // triangle pairs (L, reversed L), stored once with L < reversed L
  std::vector<std::pair<LoopKey, LoopKey>> phase_pairs;
  // single self-loops (excluding a double-loop pair)
  std::vector<int> self_loops;
  int dbl_g = -1, dbl_gp = -1;  // double-loop edge ids, -1 if absent
};

LoopKey reversed_class(const Graph& g, const LoopKey& k) {
  return canon_loop(g.partner[k[2]], g.partner[k[1]], g.partner[k[0]]);
}

SlotLayout slot_layout(const Graph& g) {
  SlotLayout s;
  s.loops = all_loops(g);
  for (const LoopKey& L : s.loops) {
    const LoopKey R = reversed_class(g, L);
    if (L < R) s.phase_pairs.emplace_back(L, R);
  }
  // A double loop is two distinct self-partnered edges at one vertex.
  std::map<int, std::vector<int>> loops_at;
  for (int e = 0; e < g.ne(); ++e)
    if (g.partner[e] == e) loops_at[g.src[e]].push_back(e);
  for (const auto& [v, es] : loops_at) {
    if (es.size() == 2) {
      s.dbl_g = es[0];
      s.dbl_gp = es[1];
    } else {
      for (int e : es) s.self_loops.push_back(e);
    }
  }
  return s;
}

int occurrences(const LoopKey& k, int e) {
  return (k[0] == e) + (k[1] == e) + (k[2] == e);
}

constexpr double kMismatch = 1e30;

// Distance from Wg to W2 after solving the analytic slots: a scalar per
// single self-loop (must be unit modulus) and a free scalar per triangle
// pair.  Slot values are reported through the out-parameters when non-null.
double slot_distance(const SlotLayout& lay, const CellMap& Wg,
                     const CellMap& W2, std::map<int, Cplx>* loop_scale_out,
                     std::map<LoopKey, Cplx>* pair_scale_out) {
  std::map<int, Cplx> loop_scale;
  for (int s : lay.self_loops) {
    // reference: largest cell containing s exactly once
    double best = 0.0;
    Cplx eta = 1.0;
    bool found = false;
    for (const LoopKey& L : lay.loops) {
      if (occurrences(L, s) != 1) continue;
      const double w = std::abs(Wg.at(L));
      if (w > best && w > 1e-12) {
        best = w;
        eta = W2.at(L) / Wg.at(L);
        found = true;
      }
    }
    if (found && std::abs(std::abs(eta) - 1.0) > 5e-2) return kMismatch;
    loop_scale[s] = found ? eta : 1.0;
  }
  std::map<LoopKey, Cplx> scaled;
  for (const LoopKey& L : lay.loops) {
    Cplx v = Wg.at(L);
    for (const auto& [s, eta] : loop_scale)
      for (int k = 0; k < occurrences(L, s); ++k) v *= eta;
    scaled[L] = v;
  }
  std::map<LoopKey, Cplx> pair_scale;
  for (const auto& [L, R] : lay.phase_pairs) {
    Cplx alpha = 1.0;
    if (std::abs(scaled[L]) > 1e-12) alpha = W2.at(L) / scaled[L];
    scaled[L] *= alpha;
    scaled[R] /= alpha;
    pair_scale[L] = alpha;
  }
  double dist = 0.0;
  for (const LoopKey& L : lay.loops)
    dist = std::max(dist, std::abs(scaled[L] - W2.at(L)));
  if (loop_scale_out) *loop_scale_out = loop_scale;
  if (pair_scale_out) *pair_scale_out = pair_scale;
  return dist;
}

Eigen::MatrixXd block_matrix(const Graph& g, const SlotLayout& lay,
                             double theta, int em, int emp) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(g.ne(), g.ne());
  if (lay.dbl_g >= 0) {
    const Eigen::Matrix2d u = u_theta(theta, em, emp);
    M(lay.dbl_g, lay.dbl_g) = u(0, 0);
    M(lay.dbl_g, lay.dbl_gp) = u(0, 1);
    M(lay.dbl_gp, lay.dbl_g) = u(1, 0);
    M(lay.dbl_gp, lay.dbl_gp) = u(1, 1);
  }
  return M;
}

}  // namespace

std::optional<GaugeMatch> find_equivalence(const Graph& g, const CellMap& W1,
                                           const CellMap& W2, double tol) {
  const SlotLayout lay = slot_layout(g);
  const bool has_dbl = lay.dbl_g >= 0;

  const auto dist_at = [&](double theta, int em, int emp) {
    const Eigen::MatrixXd M = block_matrix(g, lay, theta, em, emp);
    const CellMap Wg = gauge_transform(g, W1, M, lay.loops);
    return slot_distance(lay, Wg, W2, nullptr, nullptr);
  };

  double best = kMismatch;
  double best_theta = 0.0;
  int best_em = 1, best_emp = 1;
  if (!has_dbl) {
    best = dist_at(0.0, 1, 1);
  } else {
    for (int em : {1, -1})
      for (int emp : {1, -1})
        for (double theta = 0.0; theta < 2 * M_PI; theta += 1e-2) {
          const double d = dist_at(theta, em, emp);
          if (d < best) {
            best = d;
            best_theta = theta;
            best_em = em;
            best_emp = emp;
          }
        }
    // golden-section refinement around the grid minimum
    if (best < kMismatch) {
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      double a = best_theta - 1.1e-2, b = best_theta + 1.1e-2;
      double c = b - gr * (b - a), d = a + gr * (b - a);
      double fc = dist_at(c, best_em, best_emp);
      double fd = dist_at(d, best_em, best_emp);
      for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - gr * (b - a);
          fc = dist_at(c, best_em, best_emp);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + gr * (b - a);
          fd = dist_at(d, best_em, best_emp);
        }
      }
      const double mid = 0.5 * (a + b);
      const double fm = dist_at(mid, best_em, best_emp);
      if (fm < best) {
        best = fm;
        best_theta = mid;
      }
    }
  }
  if (best > tol) return std::nullopt;

  // reconstruct the full complex gauge matrix at the optimum
  const Eigen::MatrixXd Mr =
      block_matrix(g, lay, best_theta, best_em, best_emp);
  const CellMap Wg = gauge_transform(g, W1, Mr, lay.loops);
  std::map<int, Cplx> loop_scale;
  std::map<LoopKey, Cplx> pair_scale;
  slot_distance(lay, Wg, W2, &loop_scale, &pair_scale);
  Eigen::MatrixXcd M = Mr.cast<Cplx>();
  for (const auto& [s, eta] : loop_scale) M(s, s) = eta;
  for (const auto& [L, alpha] : pair_scale) {
    for (int e : {L[0], L[1], L[2]}) {
      if (g.partner[e] != e) {  // fold the pair scalar into one bond edge
        M(e, e) *= alpha;
        M(g.partner[e], g.partner[e]) /= alpha;
        break;
      }
    }
  }
  GaugeMatch match;
  match.M = M;
  const CellMap Wfull = gauge_transform(g, W1, M, lay.loops);
  double res = 0.0;
  for (const LoopKey& L : lay.loops)
    res = std::max(res, std::abs(Wfull.at(L) - W2.at(L)));
  match.residual = res;
  if (res > tol) return std::nullopt;
  return match;
}

// ----------------------------------------------------------------- solver

namespace {

struct Term {
  double coef;
  int i, j;  // j == -1: linear in unknown i
};

struct Instance {
  std::vector<Term> terms;
  double rhs;
};

struct Program {
  std::vector<LoopKey> loops;
  std::vector<Instance> instances;
};

Program residual_program(const Graph& g) {
  Program p;
  p.loops = all_loops(g);
  std::map<LoopKey, int> idx;
  for (size_t i = 0; i < p.loops.size(); ++i)
    idx[p.loops[i]] = static_cast<int>(i);
  const auto id = [&](int a, int b, int c) {
    return idx.at(canon_loop(a, b, c));
  };
  const int ne = g.ne();
  const auto& phi = g.phi;
  const auto& pt = g.partner;
  const auto& s = g.src;
  const auto& r = g.dst;
  // R1
  for (int a = 0; a < ne; ++a)
    for (int d = 0; d < ne; ++d) {
      if (s[a] != s[d] || r[a] != r[d]) continue;
      Instance ins;
      for (int b = 0; b < ne; ++b) {
        if (s[b] != r[a]) continue;
        for (int c = 0; c < ne; ++c)
          if (s[c] == r[b] && r[c] == s[a])
            ins.terms.push_back({1.0, id(a, b, c), id(pt[c], pt[b], pt[d])});
      }
      ins.rhs = (a == d) ? phi[s[a]] * phi[r[a]] : 0.0;
      p.instances.push_back(std::move(ins));
    }
  // R2
  for (int a = 0; a < ne; ++a) {
    if (pt[a] != a || s[a] != r[a]) continue;
    Instance ins;
    for (int b = 0; b < ne; ++b)
      if (s[b] == r[a])
        ins.terms.push_back({std::sqrt(phi[r[b]]), id(a, b, pt[b]), -1});
    ins.rhs = 0.0;
    p.instances.push_back(std::move(ins));
  }
  // R3
  const double q24 = qnum(2, g.m) / qnum(4, g.m);
  for (int a = 0; a < ne; ++a)
    for (int b = 0; b < ne; ++b) {
      if (s[b] != r[a]) continue;
      for (int c = 0; c < ne; ++c) {
        if (s[c] != s[a]) continue;
        for (int d = 0; d < ne; ++d) {
          if (s[d] != r[c] || r[d] != r[b]) continue;
          Instance ins;
          const double c1 = std::sqrt(phi[s[a]] * phi[r[b]]);
          const double c2 = -std::sqrt(phi[r[a]] * phi[r[c]]);
          for (int e = 0; e < ne; ++e)
            if (s[e] == r[a] && r[e] == r[c])
              ins.terms.push_back({c1, id(a, e, pt[c]), id(pt[e], b, pt[d])});
          for (int e = 0; e < ne; ++e)
            if (s[e] == r[b] && r[e] == s[a])
              ins.terms.push_back({c2, id(a, b, e), id(pt[e], pt[d], pt[c])});
          ins.rhs = q24 * (phi[r[a]] * phi[r[b]] * phi[r[c]] *
                               ((a == pt[b] && c == pt[d]) ? 1.0 : 0.0) -
                           phi[s[a]] * phi[r[a]] * phi[r[b]] *
                               ((a == c && b == d) ? 1.0 : 0.0));
          p.instances.push_back(std::move(ins));
        }
      }
    }
  return p;
}

// unknown vector -> cell values (real layout or interleaved re/im)
Eigen::VectorXcd unpack(const Eigen::VectorXd& x, int ncells, bool real_only) {
  Eigen::VectorXcd w(ncells);
  for (int i = 0; i < ncells; ++i)
    w[i] = real_only ? Cplx(x[i], 0.0) : Cplx(x[2 * i], x[2 * i + 1]);
  return w;
}

Eigen::VectorXd eval_residuals(const Program& p, const Eigen::VectorXd& x,
                               bool real_only) {
  const int ncells = static_cast<int>(p.loops.size());
  const Eigen::VectorXcd w = unpack(x, ncells, real_only);
  const int rows = static_cast<int>(p.instances.size()) * (real_only ? 1 : 2);
  Eigen::VectorXd r(rows);
  for (size_t k = 0; k < p.instances.size(); ++k) {
    Cplx tot = -p.instances[k].rhs;
    for (const Term& t : p.instances[k].terms)
      tot += (t.j < 0) ? t.coef * w[t.i] : t.coef * w[t.i] * w[t.j];
    if (real_only) {
      r[k] = tot.real();
    } else {
      r[2 * k] = tot.real();
      r[2 * k + 1] = tot.imag();
    }
  }
  return r;
}

// Levenberg-Marquardt with forward-difference Jacobian.
double lm_minimize(const Program& p, bool real_only, Eigen::VectorXd& x,
                   int max_iter) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd r = eval_residuals(p, x, real_only);
  double c2 = r.squaredNorm();
  double lambda = 1e-3;
  const double h = 1e-7;
  Eigen::MatrixXd J(r.size(), n);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (r.lpNorm<Eigen::Infinity>() < 1e-13) break;
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xp = x;
      xp[j] += h;
      J.col(j) = (eval_residuals(p, xp, real_only) - r) / h;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jtr = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda;
      const Eigen::VectorXd delta = A.ldlt().solve(-Jtr);
      const Eigen::VectorXd xt = x + delta;
      const Eigen::VectorXd rt = eval_residuals(p, xt, real_only);
      const double ct = rt.squaredNorm();
      if (ct < c2) {
        x = xt;
        r = rt;
        c2 = ct;
        lambda = std::max(lambda / 3.0, 1e-14);
        improved = true;
        break;
      }
      lambda *= 3.0;
      if (lambda > 1e14) break;
    }
    if (!improved) break;
  }
  return r.lpNorm<Eigen::Infinity>();
}

}  // namespace

SolveResult solve_cells(const Graph& g, const SolveConfig& cfg) {
  const Program prog = residual_program(g);
  const int ncells = static_cast<int>(prog.loops.size());
  const int nvars = cfg.real_only ? ncells : 2 * ncells;
  const double d = loop_weight(g.m) * g.phi.maxCoeff();

  std::vector<std::optional<CellMap>> found(cfg.restarts);
  parallel_for(cfg.restarts, [&](int k) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> uni(-d, d);
    Eigen::VectorXd x(nvars);
    for (int i = 0; i < nvars; ++i) x[i] = uni(rng);
    const double res = lm_minimize(prog, cfg.real_only, x, cfg.max_iter);
    if (res < cfg.tol) {
      const Eigen::VectorXcd w = unpack(x, ncells, cfg.real_only);
      CellMap W;
      for (int i = 0; i < ncells; ++i) W[prog.loops[i]] = w[i];
      found[k] = std::move(W);
    }
  });

  SolveResult out;
  for (int k = 0; k < cfg.restarts; ++k) {
    if (!found[k]) continue;
    ++out.converged;
    bool merged = false;
    for (size_t i = 0; i < out.representatives.size(); ++i) {
      if (find_equivalence(g, out.representatives[i], *found[k],
                           cfg.dedupe_tol)) {
        ++out.multiplicity[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.representatives.push_back(*found[k]);
      out.multiplicity.push_back(1);
    }
  }
  return out;
}

}  // namespace so3cat

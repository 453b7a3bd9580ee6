#include "secbf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secbf/matcore.hpp"

namespace secbf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Real standard form:
//   min <C, X> + c^T w   s.t.  <A_i, X> + (G w)_i = b_i,  X >= 0, w >= 0.
struct Conic {
  RMat C;
  std::vector<RMat> A;
  RVec b;
  RMat G;
  RVec c;
};

struct ConicResult {
  RMat X, Z;
  RVec w, zw, y;
  SdpStatus status = SdpStatus::MaxIter;
  int iterations = 0;
  double pobj = 0, dobj = 0;
  bool diverged = false;
};

RMat sym(const RMat& m) { return 0.5 * (m + m.transpose()); }

RMat embed(const CMat& a) {
  const Eigen::Index n = a.rows();
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a.real();
  out.topRightCorner(n, n) = -a.imag();
  out.bottomLeftCorner(n, n) = a.imag();
  out.bottomRightCorner(n, n) = a.real();
  return out;
}

// Inverse of embed on the structured subspace (averages the redundant blocks).
CMat project(const RMat& m) {
  const Eigen::Index n = m.rows() / 2;
  CMat out(n, n);
  out.real() = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n));
  out.imag() = 0.5 * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n));
  return hermitian_part(out);
}

// Largest alpha with X + alpha dX >= 0 (infinite if dX keeps X PSD).
double max_step_psd(const RMat& x, const RMat& dx) {
  Eigen::LLT<RMat> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const RMat l = llt.matrixL();
  RMat t = l.triangularView<Eigen::Lower>().solve(dx);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose().eval()).transpose();
  Eigen::SelfAdjointEigenSolver<RMat> es(sym(t), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo >= 0 ? kInf : -1.0 / lo;
}

double max_step_lp(const RVec& w, const RVec& dw) {
  double a = kInf;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (dw(i) < 0) a = std::min(a, -w(i) / dw(i));
  return a;
}

ConicResult solve_conic(const Conic& p, const SdpOptions& opt) {
  const Eigen::Index n = p.C.rows();
  const Eigen::Index m = p.b.size();
  const Eigen::Index k = p.G.cols();
  const auto apply_a = [&](const RMat& x) {
    RVec v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = p.A[i].cwiseProduct(x).sum();
    return v;
  };
  const auto apply_at = [&](const RVec& y) {
    RMat s = RMat::Zero(n, n);
    for (Eigen::Index i = 0; i < m; ++i) s += y(i) * p.A[i];
    return s;
  };

  double max_a = 0;
  for (const auto& a : p.A) max_a = std::max(max_a, a.norm());
  double xi = std::max({10.0, std::sqrt(double(n)), 1.0});
  for (Eigen::Index i = 0; i < m; ++i)
    xi = std::max(xi, double(n) * (1 + std::abs(p.b(i))) / (1 + p.A[i].norm()));
  const double eta = std::max({10.0, std::sqrt(double(n)), max_a, p.C.norm(), p.c.size() ? p.c.lpNorm<Eigen::Infinity>() : 0.0});

  ConicResult r;
  r.X = xi * RMat::Identity(n, n);
  r.Z = eta * RMat::Identity(n, n);
  r.w = RVec::Constant(k, xi);
  r.zw = RVec::Constant(k, eta);
  r.y = RVec::Zero(m);

  const double norm_b = p.b.norm();
  const double norm_c = std::sqrt(p.C.squaredNorm() + p.c.squaredNorm());
  const double dof = double(n + k);

  double best_err = kInf;
  ConicResult best = r;
  int stalls = 0;

  for (int it = 0; it < opt.max_iter; ++it) {
    r.iterations = it;
    const RVec rp = p.b - apply_a(r.X) - p.G * r.w;
    const RMat rd = p.C - apply_at(r.y) - r.Z;
    const RVec rdw = p.c - p.G.transpose() * r.y - r.zw;
    r.pobj = p.C.cwiseProduct(r.X).sum() + p.c.dot(r.w);
    r.dobj = p.b.dot(r.y);
    const double compl_sum = r.X.cwiseProduct(r.Z).sum() + r.w.dot(r.zw);
    const double mu = compl_sum / dof;
    const double denom = 1 + std::abs(r.pobj) + std::abs(r.dobj);
    const double pinf = rp.norm() / (1 + norm_b);
    const double dinf = std::sqrt(rd.squaredNorm() + rdw.squaredNorm()) / (1 + norm_c);
    const double gap = std::max(std::abs(r.pobj - r.dobj), std::abs(compl_sum)) / denom;
    const double err = std::max({pinf, dinf, gap});
    if (err < best_err) {
      best_err = err;
      best = r;
    }
    if (err <= opt.tol) {
      r.status = SdpStatus::Optimal;
      return r;
    }
    if (r.X.norm() > 1e12 || r.y.norm() > 1e12 || r.Z.norm() > 1e14) {
      r.diverged = true;
      break;
    }

    Eigen::LLT<RMat> zchol(r.Z);
    if (zchol.info() != Eigen::Success) break;
    const RMat zinv = sym(zchol.solve(RMat::Identity(n, n)));

    // Schur complement M_ij = <A_i, X A_j Z^{-1}> + (G D G^T)_ij.
    std::vector<RMat> t(m);
    for (Eigen::Index j = 0; j < m; ++j) t[j] = r.X * p.A[j] * zinv;
    RMat schur(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) schur(i, j) = p.A[i].cwiseProduct(t[j]).sum();
    const RVec dscale = r.w.cwiseQuotient(r.zw);
    schur = sym(schur) + p.G * dscale.asDiagonal() * p.G.transpose();
    Eigen::LDLT<RMat> schur_fact(schur);
    if (schur_fact.info() != Eigen::Success) break;

    const RMat x_rd_zinv = r.X * rd * zinv;
    struct Dir {
      RMat dX, dZ;
      RVec dy, dw, dzw;
    };
    const auto direction = [&](const RMat& rc_zinv, const RVec& rcw_over_zw) {
      Dir d;
      const RMat psi = sym(rc_zinv - x_rd_zinv);
      const RVec rhs = rp - apply_a(psi) - p.G * (rcw_over_zw - dscale.cwiseProduct(rdw));
      d.dy = schur_fact.solve(rhs);
      const RMat at_dy = apply_at(d.dy);
      d.dZ = rd - at_dy;
      d.dX = psi + sym(r.X * at_dy * zinv);
      d.dzw = rdw - p.G.transpose() * d.dy;
      d.dw = rcw_over_zw - dscale.cwiseProduct(d.dzw);
      return d;
    };
    const auto steps = [&](const Dir& d, double tau) {
      const double ap = std::min({1.0, tau * max_step_psd(r.X, d.dX), tau * max_step_lp(r.w, d.dw)});
      const double ad = std::min({1.0, tau * max_step_psd(r.Z, d.dZ), tau * max_step_lp(r.zw, d.dzw)});
      return std::pair{ap, ad};
    };

    // Predictor.
    const Dir aff = direction(-r.X, -r.w);
    const auto [ap_aff, ad_aff] = steps(aff, 1.0);
    const double mu_aff = ((r.X + ap_aff * aff.dX).cwiseProduct(r.Z + ad_aff * aff.dZ).sum() +
                           (r.w + ap_aff * aff.dw).dot(r.zw + ad_aff * aff.dzw)) /
                          dof;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector.
    const RMat rc_zinv = sigma * mu * zinv - r.X - aff.dX * aff.dZ * zinv;
    const RVec rcw = ((sigma * mu) * RVec::Ones(k) - r.w.cwiseProduct(r.zw) - aff.dw.cwiseProduct(aff.dzw))
                         .cwiseQuotient(r.zw);
    const Dir d = direction(rc_zinv, rcw);
    const double tau = std::max(0.9, 1.0 - 10.0 * std::min(1.0, mu));
    const auto [ap, ad] = steps(d, std::min(tau, 0.995));

    r.X = sym(r.X + ap * d.dX);
    r.w += ap * d.dw;
    r.y += ad * d.dy;
    r.Z = sym(r.Z + ad * d.dZ);
    r.zw += ad * d.dzw;

    stalls = (ap < 1e-8 && ad < 1e-8) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }

  best.status = best_err <= opt.accept_tol ? SdpStatus::Optimal : SdpStatus::MaxIter;
  best.diverged = r.diverged;
  best.iterations = r.iterations;
  return best;
}

// Row and variable scaling applied before embedding.
struct Scaling {
  std::vector<double> row;  // ||embed(A_i)||_F
  double obj = 1;           // ||embed(C)||_F, or 1 for C = 0
  double var = 1;           // X = var * project(X_real)
};

Conic build_conic(const SdpProblem& p, Scaling& sc) {
  const std::size_t m = p.m();
  Conic out;
  const RMat ec = embed(p.C);
  sc.obj = ec.norm() > 0 ? ec.norm() : 1.0;
  out.C = ec / sc.obj;
  sc.row.resize(m);
  RVec b(m);
  std::vector<Eigen::Index> ineq;
  for (std::size_t i = 0; i < m; ++i) {
    const RMat ea = embed(p.constraints[i].A);
    sc.row[i] = ea.norm() > 0 ? ea.norm() : 1.0;
    out.A.push_back(ea / sc.row[i]);
    b(Eigen::Index(i)) = 2.0 * p.constraints[i].b / sc.row[i];
    if (p.constraints[i].sense != Sense::EQ) ineq.push_back(Eigen::Index(i));
  }
  const double bmax = m ? b.cwiseAbs().maxCoeff() : 0.0;
  sc.var = bmax > 0 ? bmax : 1.0;
  out.b = b / sc.var;
  out.G = RMat::Zero(Eigen::Index(m), Eigen::Index(ineq.size()));
  for (std::size_t j = 0; j < ineq.size(); ++j)
    out.G(ineq[j], Eigen::Index(j)) = p.constraints[std::size_t(ineq[j])].sense == Sense::LE ? 1.0 : -1.0;
  out.c = RVec::Zero(Eigen::Index(ineq.size()));
  return out;
}

// Big-M feasibility phase: min sum(p + q) with elastic rows and a trace cap.
bool phase_one_infeasible(const Conic& c, const SdpOptions& opt) {
  const Eigen::Index n = c.C.rows();
  const Eigen::Index m = c.b.size();
  const Eigen::Index k = c.G.cols();
  constexpr double kBigM = 1e6;
  Conic f;
  f.C = RMat::Zero(n, n);
  f.A = c.A;
  f.A.push_back(RMat::Identity(n, n) / std::sqrt(double(n)));
  f.b.resize(m + 1);
  f.b.head(m) = c.b;
  f.b(m) = kBigM;
  f.G = RMat::Zero(m + 1, k + 2 * m + 1);
  f.G.topLeftCorner(m, k) = c.G;
  f.G.block(0, k, m, m) = RMat::Identity(m, m);
  f.G.block(0, k + m, m, m) = -RMat::Identity(m, m);
  f.G(m, k + 2 * m) = 1.0;
  f.c = RVec::Zero(k + 2 * m + 1);
  f.c.segment(k, 2 * m).setOnes();
  const ConicResult r = solve_conic(f, opt);
  if (r.status != SdpStatus::Optimal) return false;
  return r.pobj > 1e-6 * (1 + c.b.norm());
}

}  // namespace

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  if (C.rows() != C.cols() || C.rows() == 0) throw DimensionError("SdpProblem: C must be square");
  if (C.rows() > 64) throw DimensionError("SdpProblem: n > 64 is out of scope");
  if (constraints.size() > 16) throw DimensionError("SdpProblem: more than 16 constraints");
  if (!C.allFinite()) throw DataError("SdpProblem: non-finite objective");
  const double tol = 1e-12;
  if ((C - C.adjoint()).norm() > tol * std::max(1.0, C.norm())) throw DataError("SdpProblem: C not Hermitian");
  for (const auto& con : constraints) {
    if (con.A.rows() != C.rows() || con.A.cols() != C.cols())
      throw DimensionError("SdpProblem: constraint matrix size mismatch");
    if (!con.A.allFinite() || !std::isfinite(con.b)) throw DataError("SdpProblem: non-finite constraint");
    if ((con.A - con.A.adjoint()).norm() > tol * std::max(1.0, con.A.norm()))
      throw DataError("SdpProblem: constraint matrix not Hermitian");
  }
}

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt) {
  p.validate();
  Scaling sc;
  const Conic conic = build_conic(p, sc);
  const ConicResult r = solve_conic(conic, opt);

  SdpSolution out;
  out.iterations = r.iterations;
  out.status = r.status;
  if (r.status != SdpStatus::Optimal && phase_one_infeasible(conic, opt)) out.status = SdpStatus::Infeasible;

  out.X = project(sc.var * r.X);
  out.Z = project(sc.obj * r.Z);
  out.duals.resize(Eigen::Index(p.m()));
  for (std::size_t i = 0; i < p.m(); ++i) out.duals(Eigen::Index(i)) = r.y(Eigen::Index(i)) * sc.obj / sc.row[i];
  out.objective = trace_product(p.C, out.X);
  out.dual_objective = 0;
  for (std::size_t i = 0; i < p.m(); ++i) out.dual_objective += p.constraints[i].b * out.duals(Eigen::Index(i));
  return out;
}

SdpResiduals sdp_residuals(const SdpProblem& p, const SdpSolution& s) {
  SdpResiduals res;
  const double scale = std::max(1.0, std::abs(s.objective));
  CMat stationarity = p.C - s.Z;
  double slack_compl = 0;
  for (std::size_t i = 0; i < p.m(); ++i) {
    const auto& con = p.constraints[i];
    const double y = s.duals(Eigen::Index(i));
    const double val = trace_product(con.A, s.X);
    double viol = 0;
    switch (con.sense) {
      case Sense::EQ: viol = std::abs(val - con.b); break;
      case Sense::LE:
        viol = std::max(0.0, val - con.b);
        res.dual_sign = std::max(res.dual_sign, std::max(0.0, y));
        slack_compl += std::abs(y * (val - con.b));
        break;
      case Sense::GE:
        viol = std::max(0.0, con.b - val);
        res.dual_sign = std::max(res.dual_sign, std::max(0.0, -y));
        slack_compl += std::abs(y * (val - con.b));
        break;
    }
    res.primal = std::max(res.primal, viol / std::max(1.0, std::abs(con.b)));
    stationarity -= y * con.A;
  }
  res.dual = stationarity.norm() / std::max(1.0, p.C.norm());
  res.complementarity = (std::abs(trace_product(s.X, s.Z)) + slack_compl) / scale;
  res.gap = std::abs(s.objective - s.dual_objective) / scale;
  res.min_eig_x = lambda_min(s.X);
  res.min_eig_z = lambda_min(s.Z);
  return res;
}

SdpSolution rank_reduce(const SdpSolution& sol, const SdpProblem& p) {
  if (sol.status != SdpStatus::Optimal) throw PreconditionError("rank_reduce: solution is not optimal");
  const std::size_t m = p.m();
  CMat x = hermitian_part(sol.X);
  for (Eigen::Index guard = 0; guard < x.rows(); ++guard) {
    const auto eig = hermitian_eig(x);
    const double top = eig.eigenvalues.maxCoeff();
    if (top <= 0) break;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
      if (eig.eigenvalues(i) > kRankThreshold * top) keep.push_back(i);
    const auto r = Eigen::Index(keep.size());
    if (std::size_t(r * r) <= m) break;
    CMat v(x.rows(), r);
    for (Eigen::Index j = 0; j < r; ++j)
      v.col(j) = eig.eigenvectors.col(keep[std::size_t(j)]) * std::sqrt(eig.eigenvalues(keep[std::size_t(j)]));

    // Homogeneous system Tr(V^H A_i V Delta) = 0 over Hermitian r x r Delta,
    // parametrised by r^2 reals. The objective row is added when it still
    // leaves a nontrivial null space.
    std::vector<CMat> rows;
    for (const auto& con : p.constraints) rows.push_back(v.adjoint() * con.A * v);
    if (std::size_t(r * r) > m + 1) rows.push_back(v.adjoint() * p.C * v);
    RMat sys(Eigen::Index(rows.size()), r * r);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      const CMat& b = rows[q];
      Eigen::Index col = 0;
      for (Eigen::Index a = 0; a < r; ++a) sys(Eigen::Index(q), col++) = b(a, a).real();
      for (Eigen::Index a = 0; a < r; ++a)
        for (Eigen::Index c = a + 1; c < r; ++c) {
          sys(Eigen::Index(q), col++) = 2.0 * b(c, a).real();
          sys(Eigen::Index(q), col++) = -2.0 * b(c, a).imag();
        }
    }
    Eigen::JacobiSVD<RMat> svd(sys, Eigen::ComputeFullV);
    const RVec nul = svd.matrixV().col(r * r - 1);
    CMat delta = CMat::Zero(r, r);
    Eigen::Index col = 0;
    for (Eigen::Index a = 0; a < r; ++a) delta(a, a) = nul(col++);
    for (Eigen::Index a = 0; a < r; ++a)
      for (Eigen::Index c = a + 1; c < r; ++c) {
        delta(a, c) = cd(nul(col), nul(col + 1));
        delta(c, a) = std::conj(delta(a, c));
        col += 2;
      }
    const auto dev = hermitian_eig(delta).eigenvalues;
    const double lead = std::abs(dev.maxCoeff()) >= std::abs(dev.minCoeff()) ? dev.maxCoeff() : dev.minCoeff();
    if (lead == 0) break;
    const CMat shrink = CMat::Identity(r, r) - delta / lead;
    x = hermitian_part(v * shrink * v.adjoint());
  }
  SdpSolution out = sol;
  out.X = x;
  out.objective = trace_product(p.C, x);
  return out;
}

CVec extract_rank_one(const CMat& X, double max_ratio) {
  const auto eig = hermitian_eig(X);
  const Eigen::Index n = X.rows();
  const double l1 = eig.eigenvalues(n - 1);
  if (!(l1 > 0)) throw RankError("extract_rank_one: matrix has no positive eigenvalue");
  const double l2 = n > 1 ? std::max(0.0, eig.eigenvalues(n - 2)) : 0.0;
  if (l2 / l1 > max_ratio) throw RankError("extract_rank_one: matrix is not numerically rank one");
  CVec u = eig.eigenvectors.col(n - 1) * std::sqrt(l1);
  Eigen::Index big = 0;
  u.cwiseAbs().maxCoeff(&big);
  return u * (std::abs(u(big)) / u(big));
}

}  // namespace secbf

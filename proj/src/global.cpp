#include "secbf/global.hpp"

#include <cmath>
#include <limits>

#include "secbf/matcore.hpp"
#include "secbf/sdp.hpp"

namespace secbf {

const char* to_string(SingleStreamBranch b) { return b == SingleStreamBranch::Eigen ? "eigen" : "sdr"; }

namespace {

// H^H (I + H X H^H)^{-1} H.
CMat whitened_gram(const CMat& h, const CMat& x) {
  const Eigen::Index r = h.rows();
  const CMat n = CMat::Identity(r, r) + h * x * h.adjoint();
  return hermitian_part(h.adjoint() * solve_hpd(n, h));
}

}  // namespace

SingleStreamSolution solve_single_stream(const ChannelPair& ch, const DesignBudget& budget, bool force_sdr) {
  require_feasible(ch, budget);
  const Eigen::Index n = ch.n_t();
  const double pt = budget.power_total;
  const double c = harvest_threshold(ch, budget);
  const CMat eye = CMat::Identity(n, n);
  const CMat q_e = eye / pt + ch.energy_gram();
  const CMat q_i = eye / pt + ch.info_gram();

  SingleStreamSolution out;
  CVec u;
  if (!force_sdr && eh_vacuous(ch, budget)) {
    u = min_rayleigh_vec(q_e, q_i).vector;
    out.branch = SingleStreamBranch::Eigen;
  } else {
    SdpProblem p;
    p.C = q_e;
    p.constraints = {{q_i, 1.0, Sense::EQ}, {(c / pt) * eye - ch.energy_gram(), 0.0, Sense::LE}};
    const auto sol = solve_sdp(p);
    if (sol.status != SdpStatus::Optimal)
      throw SolverError(std::string("single-stream SDR: ") + to_string(sol.status));
    u = extract_rank_one(rank_reduce(sol, p).X);
    out.branch = SingleStreamBranch::Sdr;
  }
  out.v = std::sqrt(pt) * u / u.norm();
  out.rate = secrecy_rate(ch, Beamformer(out.v));
  out.nonpositive_rate = out.rate <= 0;
  return out;
}

CMat secrecy_gram(const ChannelPair& ch) { return ch.info_gram() - ch.energy_gram(); }

bool secrecy_gram_psd(const ChannelPair& ch) {
  const auto ev = hermitian_eig(secrecy_gram(ch)).eigenvalues;
  return ev(0) >= -1e-9 * std::max(ev(ev.size() - 1), 0.0);
}

double covariance_rate_nats(const ChannelPair& ch, const CMat& X) {
  const auto gain = [&X](const CMat& h) {
    return logdet_hpd(CMat::Identity(h.rows(), h.rows()) + h * X * h.adjoint());
  };
  return gain(ch.info()) - gain(ch.energy());
}

CMat covariance_rate_gradient(const ChannelPair& ch, const CMat& X) {
  return whitened_gram(ch.info(), X) - whitened_gram(ch.energy(), X);
}

namespace {

// Orthonormal real basis of n x n Hermitian matrices under Re Tr(A B).
std::vector<CMat> hermitian_basis(Eigen::Index n) {
  std::vector<CMat> basis;
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index a = 0; a < n; ++a) {
    CMat e = CMat::Zero(n, n);
    e(a, a) = 1;
    basis.push_back(e);
  }
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) {
      CMat re = CMat::Zero(n, n);
      re(a, b) = re(b, a) = s;
      basis.push_back(re);
      CMat im = CMat::Zero(n, n);
      im(a, b) = cd(0, s);
      im(b, a) = cd(0, -s);
      basis.push_back(im);
    }
  return basis;
}

struct FullStreamSet {
  const ChannelPair& ch;
  double power;
  double threshold;  // lower bound on Tr(K X)

  bool eh_active() const { return threshold > 0; }
};

// Log-barrier path following on
//   t phi(X) + log det X + log(P_T - Tr X) [+ log(Tr K X - c)].
// Returns a strictly feasible point with barrier gap nu / t <= gap_target.
CMat barrier_seed(const FullStreamSet& set, double gap_target) {
  const ChannelPair& ch = set.ch;
  const Eigen::Index n = ch.n_t();
  const CMat eye = CMat::Identity(n, n);
  const CMat& k = ch.energy_gram();
  const auto keig = hermitian_eig(k);
  const CVec q = keig.eigenvectors.col(n - 1);
  const double kmax = std::max(keig.eigenvalues(n - 1), 0.0);

  // Interior start between P_T q q^H and the scaled identity.
  const double ratio = set.eh_active() ? set.threshold / (set.power * kmax) : 0.0;
  const double s = 1.0 - (1.0 - ratio) / 4.0;
  const double mix = (1.0 - ratio) / 4.0;
  CMat x = set.power * s * ((1.0 - mix) * q * q.adjoint() + (mix / double(n)) * eye);

  const auto basis = hermitian_basis(n);
  const auto dim = Eigen::Index(basis.size());
  const double nu = double(n) + 1.0 + (set.eh_active() ? 1.0 : 0.0);

  const auto value = [&](const CMat& y, double t) {
    Eigen::LLT<CMat> llt(hermitian_part(y));
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const double slack = set.power - std::real(y.trace());
    const double harvest = trace_product(k, y) - set.threshold;
    if (!(slack > 0) || (set.eh_active() && !(harvest > 0))) return -std::numeric_limits<double>::infinity();
    double v = t * covariance_rate_nats(ch, y) + 2.0 * llt.matrixLLT().diagonal().real().array().log().sum() +
               std::log(slack);
    if (set.eh_active()) v += std::log(harvest);
    return v;
  };

  for (double t = 1.0; nu / t > gap_target / 10.0; t *= 10.0) {
    for (int it = 0; it < 100; ++it) {
      const CMat bi = whitened_gram(ch.info(), x);
      const CMat be = whitened_gram(ch.energy(), x);
      const CMat xinv = inverse_hpd(x);
      const double slack = set.power - std::real(x.trace());
      const double harvest = trace_product(k, x) - set.threshold;
      CMat grad = t * (bi - be) + xinv - eye / slack;
      if (set.eh_active()) grad += k / harvest;

      RVec g(dim);
      RMat hess(dim, dim);
      std::vector<CMat> bik, bek, xik;
      RVec tr(dim), trk(dim);
      for (Eigen::Index a = 0; a < dim; ++a) {
        const CMat& e = basis[std::size_t(a)];
        g(a) = trace_product(grad, e);
        bik.push_back(bi * e * bi);
        bek.push_back(be * e * be);
        xik.push_back(xinv * e * xinv);
        tr(a) = std::real(e.trace());
        trk(a) = trace_product(k, e);
      }
      for (Eigen::Index a = 0; a < dim; ++a)
        for (Eigen::Index b = a; b < dim; ++b) {
          const CMat& e = basis[std::size_t(b)];
          double h = t * (trace_product(bek[std::size_t(a)], e) - trace_product(bik[std::size_t(a)], e)) -
                     trace_product(xik[std::size_t(a)], e) - tr(a) * tr(b) / (slack * slack);
          if (set.eh_active()) h -= trk(a) * trk(b) / (harvest * harvest);
          hess(a, b) = hess(b, a) = h;
        }
      // The barrier dominates, so -hess is positive definite.
      const Eigen::LDLT<RMat> ldlt(-hess);
      RVec step = ldlt.solve(g);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) step = g;
      const double decrement = g.dot(step);
      if (decrement / 2.0 < 1e-13) break;
      CMat dx = CMat::Zero(n, n);
      for (Eigen::Index a = 0; a < dim; ++a) dx += step(a) * basis[std::size_t(a)];

      const double base = value(x, t);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const CMat trial = x + alpha * dx;
        if (value(trial, t) >= base + 0.25 * alpha * decrement) {
          x = hermitian_part(trial);
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  return x;
}

// argmax Tr(G S) over {S >= 0, Tr S <= P_T, Tr(K S) >= c}.
CMat linear_oracle(const FullStreamSet& set, const CMat& grad) {
  const ChannelPair& ch = set.ch;
  const Eigen::Index n = ch.n_t();
  const auto eig = hermitian_eig(grad);
  const double top = eig.eigenvalues(n - 1);
  if (top >= 0) {
    const CVec q = eig.eigenvectors.col(n - 1);
    const CMat s = set.power * q * q.adjoint();
    if (trace_product(ch.energy_gram(), s) >= set.threshold) return s;
  } else if (!set.eh_active()) {
    return CMat::Zero(n, n);
  }
  SdpProblem p;
  p.C = -grad;
  p.constraints = {{CMat::Identity(n, n), set.power, Sense::LE}};
  if (set.eh_active()) p.constraints.push_back({ch.energy_gram(), set.threshold, Sense::GE});
  const auto sol = solve_sdp(p);
  if (sol.status != SdpStatus::Optimal)
    throw SolverError(std::string("full-stream direction SDP: ") + to_string(sol.status));
  return sol.X;
}

}  // namespace

FullStreamSolution solve_full_stream(const ChannelPair& ch, const DesignBudget& budget,
                                     const FullStreamOptions& opt) {
  if (!secrecy_gram_psd(ch))
    throw PreconditionError("full-stream solver needs H_I^H H_I - H_E^H H_E PSD; use the IBCD solver");
  require_feasible(ch, budget);
  const Eigen::Index n = ch.n_t();
  const FullStreamSet set{ch, budget.power_total, harvest_threshold(ch, budget)};

  CMat x;
  const auto keig = hermitian_eig(ch.energy_gram());
  const double kmax = keig.eigenvalues(n - 1);
  const bool has_interior = !set.eh_active() || set.threshold < set.power * kmax * (1.0 - 1e-9);
  if (opt.barrier_seed && has_interior) {
    x = barrier_seed(set, std::min(opt.tol_nats, 1e-6) * 1e-3);
  } else {
    const CVec q = keig.eigenvectors.col(n - 1);
    x = set.power * q * q.adjoint();
  }

  FullStreamSolution out;
  double phi = covariance_rate_nats(ch, x);
  out.objective_trace.push_back(phi);
  constexpr double kGolden = 0.6180339887498949;
  int it = 0;
  for (;; ++it) {
    const CMat grad = covariance_rate_gradient(ch, x);
    const CMat s = linear_oracle(set, grad);
    out.fw_gap = trace_product(grad, s) - trace_product(grad, x);
    if (out.fw_gap <= opt.tol_nats || it >= opt.max_iter) break;

    const CMat dir = s - x;
    const auto along = [&](double g) { return covariance_rate_nats(ch, hermitian_part(x + g * dir)); };
    double lo = 0, hi = 1;
    double m1 = hi - kGolden * (hi - lo), m2 = lo + kGolden * (hi - lo);
    double f1 = along(m1), f2 = along(m2);
    while (hi - lo > 1e-10) {
      if (f1 < f2) {
        lo = m1;
        m1 = m2;
        f1 = f2;
        m2 = lo + kGolden * (hi - lo);
        f2 = along(m2);
      } else {
        hi = m2;
        m2 = m1;
        f2 = f1;
        m1 = hi - kGolden * (hi - lo);
        f1 = along(m1);
      }
    }
    double gamma = 0.5 * (lo + hi);
    double best = along(gamma);
    const double at_one = along(1.0);
    if (at_one > best) {
      gamma = 1.0;
      best = at_one;
    }
    if (!(best > phi)) break;
    x = hermitian_part(x + gamma * dir);
    phi = best;
    out.objective_trace.push_back(phi);
  }
  out.iterations = it;

  const auto eig = hermitian_eig(x);
  const RVec root = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  out.V = eig.eigenvectors * root.cast<cd>().asDiagonal();
  out.X = out.V * out.V.adjoint();
  out.rate = nats_to_bits(covariance_rate_nats(ch, out.X));
  out.nonpositive_rate = out.rate <= 0;
  return out;
}

double concave_form_identity_check(const ChannelPair& ch, const CMat& X) {
  const Eigen::Index n = ch.n_t();
  const CMat eye = CMat::Identity(n, n);
  const CMat& k = ch.energy_gram();
  const CMat& he = ch.energy();
  const CMat root_f = psd_sqrt(secrecy_gram(ch));

  const CMat y = (eye + X * k).partialPivLu().solve(X);
  const CMat ne = CMat::Identity(he.rows(), he.rows()) + he * X * he.adjoint();
  const CMat y_alt = X - X * he.adjoint() * solve_hpd(ne, CMat(he * X));

  const double direct = covariance_rate_nats(ch, X);
  const double concave = logdet_hpd(hermitian_part(eye + root_f * y * root_f));
  return std::max(std::abs(direct - concave), (y - y_alt).cwiseAbs().maxCoeff());
}

CMat schur_lmi(const ChannelPair& ch, const CMat& X, const CMat& Y) {
  const Eigen::Index n = ch.n_t();
  const Eigen::Index ne = ch.n_e();
  const CMat& he = ch.energy();
  CMat m(n + ne, n + ne);
  m.topLeftCorner(n, n) = X - Y;
  m.topRightCorner(n, ne) = X * he.adjoint();
  m.bottomLeftCorner(ne, n) = he * X;
  m.bottomRightCorner(ne, ne) = CMat::Identity(ne, ne) + he * X * he.adjoint();
  return m;
}

}  // namespace secbf

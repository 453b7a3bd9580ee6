#include "secbf/anopt.hpp"

#include <cmath>

#include "secbf/matcore.hpp"

namespace secbf {

namespace {

double logdet_checked(const CMat& w, const char* what) {
  const Eigen::LLT<CMat> llt(hermitian_part(w));
  if (llt.info() != Eigen::Success) throw DomainError(std::string(what) + " is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

void require_shapes(const ChannelPair& ch, const CMat& V, const CMat& V_E) {
  const Eigen::Index nt = ch.n_t();
  if (V.rows() != nt) throw DimensionError("V has wrong row count");
  if (V_E.rows() != nt || V_E.cols() != nt) throw DimensionError("V_E must be N_T x N_T");
  if (!V.allFinite() || !V_E.allFinite()) throw DataError("non-finite beamformer");
}

CMat eye(Eigen::Index n) { return CMat::Identity(n, n); }

}  // namespace

AnAux an_update_aux(const ChannelPair& ch, const CMat& V, const CMat& V_E) {
  require_shapes(ch, V, V_E);
  const CMat& hi = ch.info();
  const CMat& he = ch.energy();
  const CMat hv = hi * V;
  const CMat hn = hi * V_E;
  const CMat ev = he * V;
  const CMat en = he * V_E;
  const CMat jam = eye(he.rows()) + en * en.adjoint();

  AnAux aux;
  aux.U1 = solve_hpd(CMat(eye(hi.rows()) + hn * hn.adjoint() + hv * hv.adjoint()), hv);
  aux.U2 = solve_hpd(jam, en);
  aux.W1 = inverse_hpd(an_mse_info(ch, aux.U1, V, V_E));
  aux.W2 = inverse_hpd(an_mse_noise(ch, aux.U2, V_E));
  aux.W3 = inverse_hpd(CMat(jam + ev * ev.adjoint()));
  return aux;
}

CMat an_mse_info(const ChannelPair& ch, const CMat& U1, const CMat& V, const CMat& V_E) {
  const CMat r = eye(V.cols()) - U1.adjoint() * ch.info() * V;
  const CMat un = U1.adjoint() * ch.info() * V_E;
  return hermitian_part(r * r.adjoint() + U1.adjoint() * U1 + un * un.adjoint());
}

CMat an_mse_noise(const ChannelPair& ch, const CMat& U2, const CMat& V_E) {
  const CMat r = eye(V_E.cols()) - U2.adjoint() * ch.energy() * V_E;
  return hermitian_part(r * r.adjoint() + U2.adjoint() * U2);
}

double an_objective(const ChannelPair& ch, const CMat& V, const CMat& V_E, const AnAux& aux) {
  require_shapes(ch, V, V_E);
  const CMat& he = ch.energy();
  const CMat ev = he * V;
  const CMat en = he * V_E;
  const CMat total = eye(he.rows()) + ev * ev.adjoint() + en * en.adjoint();
  const double f1 = logdet_checked(aux.W1, "W1") - trace_product(aux.W1, an_mse_info(ch, aux.U1, V, V_E)) +
                    double(V.cols());
  const double f2 = logdet_checked(aux.W2, "W2") - trace_product(aux.W2, an_mse_noise(ch, aux.U2, V_E)) +
                    double(V_E.cols());
  const double minus_f3 = logdet_checked(aux.W3, "W3") - trace_product(aux.W3, total) + double(he.rows());
  return f1 + f2 + minus_f3;
}

BlockQp an_linearized_subproblem(const ChannelPair& ch, const CMat& V_t, const CMat& VE_t, const AnAux& aux,
                                 const DesignBudget& budget) {
  require_shapes(ch, V_t, VE_t);
  const CMat& hi = ch.info();
  const CMat& he = ch.energy();
  const CMat& k = ch.energy_gram();
  const CMat hu = hi.adjoint() * aux.U1;
  const CMat eu = he.adjoint() * aux.U2;
  const CMat shared = hu * aux.W1 * hu.adjoint() + he.adjoint() * aux.W3 * he;

  QpBlock v{hermitian_part(shared), hu * aux.W1, k * V_t};
  QpBlock n{hermitian_part(shared + eu * aux.W2 * eu.adjoint()), eu * aux.W2, k * VE_t};
  const double bound = harvest_threshold(ch, budget) + energy_quadratic(ch, V_t) + energy_quadratic(ch, VE_t);
  return BlockQp({std::move(v), std::move(n)}, budget.power_total, bound);
}

AnSubproblemSolution an_solve_subproblem(const ChannelPair& ch, const CMat& V_t, const CMat& VE_t,
                                         const AnAux& aux, const DesignBudget& budget, double eps) {
  const BlockQp qp = an_linearized_subproblem(ch, V_t, VE_t, aux, budget);
  const std::vector<CMat> inc{V_t, VE_t};
  const auto sol = qp.solve(eps, &inc);
  return {sol.X[0], sol.X[1], sol.lambda, sol.mu, sol.kept_incumbent};
}

AnIbcdResult an_ibcd_solve(const ChannelPair& ch, const DesignBudget& budget, const AnBeamformer& init,
                           const IbcdOptions& opt) {
  require_shapes(ch, init.V, init.V_E);
  if (!is_feasible(ch, budget, init.total_covariance()))
    throw PreconditionError("an_ibcd_solve: initial point violates the power or harvesting constraint");

  CMat v = init.V;
  CMat ve = init.V_E;
  double rate = an_secrecy_rate_nats(ch, v, ve);
  AnIbcdResult out{init, {}, 0, 0, false};
  auto& tr = out.trace;
  const auto record = [&](double r) {
    tr.rates_bits.push_back(nats_to_bits(r));
    tr.power_w.push_back(v.squaredNorm() + ve.squaredNorm());
    tr.eh_margin_w.push_back(harvested_power(ch, CMat(v * v.adjoint() + ve * ve.adjoint())) - budget.power_harvest);
    tr.an_power_w.push_back(ve.squaredNorm());
  };
  record(rate);

  int it = 0;
  while (it < opt.max_iter) {
    ++it;
    const AnAux aux = an_update_aux(ch, v, ve);
    const auto sub = an_solve_subproblem(ch, v, ve, aux, budget, opt.eps_bisection);
    tr.lambda = sub.lambda;
    tr.mu = sub.mu;
    if (sub.kept_incumbent) break;
    const double next = an_secrecy_rate_nats(ch, sub.V, sub.V_E);
    if (next < rate) break;
    v = sub.V;
    ve = sub.V_E;
    const double gain = next - rate;
    rate = next;
    record(rate);
    if (gain <= opt.eps) break;
  }
  out.bf = AnBeamformer(v, ve);
  out.iterations = it;
  out.rate = nats_to_bits(rate);
  out.nonpositive_rate = out.rate <= 0;
  return out;
}

AnBeamformer an_warmstart(const ChannelPair& ch, Eigen::Index d, const DesignBudget& budget, std::uint64_t seed) {
  const Eigen::Index nt = ch.n_t();
  const double pt = budget.power_total;
  const CMat v = std::sqrt(0.95) * warmstart(ch, d, budget, seed).V;
  const CMat iso = std::sqrt(0.05 * pt / double(nt)) * eye(nt);
  const double c = harvest_threshold(ch, budget);
  if (energy_quadratic(ch, v) + energy_quadratic(ch, iso) >= c) return AnBeamformer(v, iso);

  const auto keig = hermitian_eig(ch.energy_gram());
  const CVec q = keig.eigenvectors.col(nt - 1);
  return AnBeamformer(v, std::sqrt(0.05 * pt) * CMat(q * q.adjoint()));
}

}  // namespace secbf

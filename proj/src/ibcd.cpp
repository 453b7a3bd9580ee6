#include "secbf/ibcd.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "secbf/matcore.hpp"
#include "secbf/sdp.hpp"

namespace secbf {

namespace {

// H^H (I + H V V^H H^H)^{-1} H.
CMat whitened_gram(const CMat& h, const CMat& v) {
  const CMat hv = h * v;
  const CMat n = CMat::Identity(h.rows(), h.rows()) + hv * hv.adjoint();
  return hermitian_part(h.adjoint() * solve_hpd(n, h));
}

double logdet_checked(const CMat& w, const char* what) {
  const Eigen::LLT<CMat> llt(hermitian_part(w));
  if (llt.info() != Eigen::Success) throw DomainError(std::string(what) + " is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

CMat random_v(Eigen::Index nt, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMat v(nt, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < nt; ++i) v(i, j) = cd(g(rng), g(rng));
  return v;
}

void require_streams(const ChannelPair& ch, Eigen::Index d) {
  if (d < 1 || d > ch.n_t()) throw DimensionError("need 1 <= d <= N_T");
}

}  // namespace

WmmseAux update_aux(const ChannelPair& ch, const CMat& V) {
  if (V.rows() != ch.n_t()) throw DimensionError("update_aux: V has wrong row count");
  if (!V.allFinite()) throw DataError("update_aux: non-finite V");
  const CMat& hi = ch.info();
  const CMat& he = ch.energy();
  const CMat hv = hi * V;
  const CMat ev = he * V;
  WmmseAux aux;
  aux.U = solve_hpd(CMat(CMat::Identity(hi.rows(), hi.rows()) + hv * hv.adjoint()), hv);
  aux.W_I = hermitian_part(CMat::Identity(V.cols(), V.cols()) + hv.adjoint() * hv);
  aux.W_E = inverse_hpd(CMat(CMat::Identity(he.rows(), he.rows()) + ev * ev.adjoint()));
  return aux;
}

CMat mse_matrix(const ChannelPair& ch, const CMat& U, const CMat& V) {
  const CMat r = CMat::Identity(V.cols(), V.cols()) - U.adjoint() * ch.info() * V;
  return r * r.adjoint() + U.adjoint() * U;
}

double objective_f(const ChannelPair& ch, const CMat& V, const CMat& U, const CMat& W_I, const CMat& W_E) {
  const CMat& he = ch.energy();
  const CMat ev = he * V;
  const double d = double(V.cols());
  const double ne = double(he.rows());
  const CMat noise = CMat::Identity(he.rows(), he.rows()) + ev * ev.adjoint();
  return logdet_checked(W_I, "W_I") - trace_product(W_I, mse_matrix(ch, U, V)) + d + logdet_checked(W_E, "W_E") -
         trace_product(W_E, noise) + ne;
}

BlockQp linearized_subproblem(const ChannelPair& ch, const CMat& V_tilde, const WmmseAux& aux,
                              const DesignBudget& budget) {
  const CMat& hi = ch.info();
  const CMat& he = ch.energy();
  const CMat hu = hi.adjoint() * aux.U;
  QpBlock blk;
  blk.A = hermitian_part(hu * aux.W_I * hu.adjoint() + he.adjoint() * aux.W_E * he);
  blk.B = hu * aux.W_I;
  blk.D = ch.energy_gram() * V_tilde;
  const double bound = harvest_threshold(ch, budget) + energy_quadratic(ch, V_tilde);
  return BlockQp({std::move(blk)}, budget.power_total, bound);
}

SubproblemSolution solve_linearized_subproblem(const ChannelPair& ch, const CMat& V_tilde, const WmmseAux& aux,
                                               const DesignBudget& budget, double eps) {
  const BlockQp qp = linearized_subproblem(ch, V_tilde, aux, budget);
  const std::vector<CMat> inc{V_tilde};
  const auto sol = qp.solve(eps, &inc);
  return {sol.X[0], sol.lambda, sol.mu, sol.kept_incumbent};
}

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace) {
  const bool an = !trace.an_power_w.empty();
  os << "iter,rate_bits,power_w,eh_margin_w" << (an ? ",an_power_w" : "") << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < trace.rates_bits.size(); ++i) {
    os << i << ',' << trace.rates_bits[i] << ',' << trace.power_w[i] << ',' << trace.eh_margin_w[i];
    if (an) os << ',' << trace.an_power_w[i];
    os << '\n';
  }
}

IbcdResult ibcd_solve(const ChannelPair& ch, const DesignBudget& budget, const Beamformer& V0,
                      const IbcdOptions& opt) {
  if (V0.V.rows() != ch.n_t()) throw DimensionError("ibcd_solve: V0 has wrong row count");
  if (!is_feasible(ch, budget, V0.V * V0.V.adjoint()))
    throw PreconditionError("ibcd_solve: initial point violates the power or harvesting constraint");

  CMat v = V0.V;
  double rate = secrecy_rate_nats(ch, v);
  IbcdResult out{Beamformer(v), {}, 0, 0, false};
  auto& tr = out.trace;
  const auto record = [&](const CMat& x, double r) {
    tr.rates_bits.push_back(nats_to_bits(r));
    tr.power_w.push_back(x.squaredNorm());
    tr.eh_margin_w.push_back(harvested_power(ch, x * x.adjoint()) - budget.power_harvest);
  };
  record(v, rate);

  int it = 0;
  while (it < opt.max_iter) {
    ++it;
    const WmmseAux aux = update_aux(ch, v);
    const auto sub = solve_linearized_subproblem(ch, v, aux, budget, opt.eps_bisection);
    tr.lambda = sub.lambda;
    tr.mu = sub.mu;
    if (sub.kept_incumbent) break;
    const double next = secrecy_rate_nats(ch, sub.V);
    if (next < rate) break;
    v = sub.V;
    const double gain = next - rate;
    rate = next;
    record(v, rate);
    if (gain <= opt.eps) break;
  }
  out.bf = Beamformer(v);
  out.iterations = it;
  out.rate = nats_to_bits(rate);
  out.nonpositive_rate = out.rate <= 0;
  return out;
}

CMat enforce_budget(const ChannelPair& ch, const DesignBudget& budget, const CMat& V) {
  require_feasible(ch, budget);
  const double pt = budget.power_total;
  // Aim slightly inside the boundary so the margin survives rounding.
  const double c = harvest_threshold(ch, budget) * (1 + 1e-12);
  const auto keig = hermitian_eig(ch.energy_gram());
  const CVec q = keig.eigenvectors.col(ch.n_t() - 1);
  const auto full = [pt](const CMat& x) { return CMat(x * (std::sqrt(pt) / x.norm())); };

  CMat strong = CMat::Zero(V.rows(), V.cols());
  strong.col(0) = std::sqrt(pt) * q;
  if (V.norm() == 0) return strong;
  const CMat v = full(V);
  if (energy_quadratic(ch, v) >= c) return v;

  const cd overlap = (q.adjoint() * v.col(0))(0, 0);
  if (std::abs(overlap) > 0) strong *= overlap / std::abs(overlap);
  double lo = 0, hi = 1;
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    (energy_quadratic(ch, full((1 - mid) * v + mid * strong)) >= c ? hi : lo) = mid;
  }
  return hi >= 1 ? strong : full((1 - hi) * v + hi * strong);
}

Beamformer random_feasible_start(const ChannelPair& ch, Eigen::Index d, const DesignBudget& budget,
                                 std::uint64_t seed) {
  require_streams(ch, d);
  return Beamformer(enforce_budget(ch, budget, random_v(ch.n_t(), d, seed)));
}

Beamformer warmstart(const ChannelPair& ch, Eigen::Index d, const DesignBudget& budget, std::uint64_t seed) {
  require_streams(ch, d);
  require_feasible(ch, budget);
  const Eigen::Index nt = ch.n_t();
  const CMat vr = random_v(nt, d, seed);
  const WmmseAux aux = update_aux(ch, vr);
  const CMat& hi = ch.info();
  const CMat& he = ch.energy();
  const CMat hu = hi.adjoint() * aux.U;
  const CMat a = hermitian_part(hu * aux.W_I * hu.adjoint() + he.adjoint() * aux.W_E * he);
  const CMat b = hu * aux.W_I;

  // Lifted variable Z = [v; 1][v; 1]^H with v = vec(V).
  const Eigen::Index n = nt * d;
  const CVec bvec = Eigen::Map<const CVec>(b.data(), n);
  SdpProblem p;
  p.C = CMat::Zero(n + 1, n + 1);
  CMat power = CMat::Zero(n + 1, n + 1);
  CMat harvest = CMat::Zero(n + 1, n + 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    p.C.block(j * nt, j * nt, nt, nt) = a;
    harvest.block(j * nt, j * nt, nt, nt) = ch.energy_gram();
  }
  p.C.topRightCorner(n, 1) = -bvec;
  p.C.bottomLeftCorner(1, n) = -bvec.adjoint();
  power.topLeftCorner(n, n).setIdentity();
  CMat corner = CMat::Zero(n + 1, n + 1);
  corner(n, n) = 1;
  p.constraints = {{power, budget.power_total, Sense::LE},
                   {harvest, harvest_threshold(ch, budget), Sense::GE},
                   {corner, 1.0, Sense::EQ}};

  try {
    const auto sol = solve_sdp(p);
    if (sol.status == SdpStatus::Optimal) {
      const CVec z = extract_rank_one(rank_reduce(sol, p).X);
      if (std::abs(z(n)) > 1e-12 * z.norm()) {
        const CVec v = z.head(n) / z(n);
        const CMat vm = Eigen::Map<const CMat>(v.data(), nt, d);
        return Beamformer(enforce_budget(ch, budget, vm));
      }
    }
  } catch (const Error&) {
  }
  const auto keig = hermitian_eig(ch.energy_gram());
  const CMat top = keig.eigenvectors.rightCols(d).rowwise().reverse();
  return Beamformer(enforce_budget(ch, budget, std::sqrt(budget.power_total / double(d)) * top));
}

double kkt_residual(const ChannelPair& ch, const DesignBudget& budget, const CMat& V, double lambda, double mu) {
  const Eigen::Index nt = ch.n_t();
  const CMat m = -whitened_gram(ch.info(), V) + whitened_gram(ch.energy(), V) +
                 lambda * CMat::Identity(nt, nt) - mu * ch.energy_gram();
  const double stationarity = (m * V).norm() / std::max(1.0, V.norm());
  const double power = V.squaredNorm();
  const double g = energy_quadratic(ch, V);
  const double c = harvest_threshold(ch, budget);
  return std::max({stationarity, std::abs(lambda * (power - budget.power_total)), std::abs(mu * (g - c)),
                   std::max(0.0, power - budget.power_total), std::max(0.0, c - g)});
}

}  // namespace secbf

#include "secbf/model.hpp"

#include <iomanip>
#include <sstream>

#include "secbf/matcore.hpp"

namespace secbf {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0) || !std::isfinite(x)) throw DataError(std::string(what) + " must be positive and finite");
}

// log det(I + H C H^H) computed on the smaller side of H.
double logdet_gain(const CMat& h, const CMat& v) {
  const CMat hv = h * v;
  if (hv.rows() <= hv.cols()) {
    return logdet_hpd(CMat::Identity(hv.rows(), hv.rows()) + hv * hv.adjoint());
  }
  return logdet_hpd(CMat::Identity(hv.cols(), hv.cols()) + hv.adjoint() * hv);
}

}  // namespace

ChannelPair::ChannelPair(CMat h_info_raw, CMat h_energy_raw, double sigma2_info, double sigma2_energy,
                         double zeta)
    : h_info_raw_(std::move(h_info_raw)),
      h_energy_raw_(std::move(h_energy_raw)),
      sigma2_info_(sigma2_info),
      sigma2_energy_(sigma2_energy),
      zeta_(zeta) {
  if (h_info_raw_.size() == 0 || h_energy_raw_.size() == 0) throw DimensionError("ChannelPair: empty channel");
  if (h_info_raw_.cols() != h_energy_raw_.cols())
    throw DimensionError("ChannelPair: channels disagree on transmit antenna count");
  require_positive(sigma2_info_, "sigma2_I");
  require_positive(sigma2_energy_, "sigma2_E");
  if (!(zeta_ > 0 && zeta_ <= 1)) throw DataError("zeta must lie in (0, 1]");
  if (!h_info_raw_.allFinite() || !h_energy_raw_.allFinite()) throw DataError("ChannelPair: non-finite channel");
  h_info_ = h_info_raw_ / std::sqrt(sigma2_info_);
  h_energy_ = h_energy_raw_ / std::sqrt(sigma2_energy_);
  if (!h_info_.allFinite() || !h_energy_.allFinite()) throw DataError("ChannelPair: normalized channel overflow");
  info_gram_ = hermitian_part(h_info_.adjoint() * h_info_);
  energy_gram_ = hermitian_part(h_energy_.adjoint() * h_energy_);
}

DesignBudget::DesignBudget(double p_total, double p_harvest) : power_total(p_total), power_harvest(p_harvest) {
  require_positive(power_total, "P_T");
  if (!(power_harvest >= 0) || !std::isfinite(power_harvest)) throw DataError("P_E must be non-negative");
}

DesignBudget DesignBudget::from_dbm(double p_total_dbm, double p_harvest_dbm) {
  return {dbm_to_watts(p_total_dbm), dbm_to_watts(p_harvest_dbm)};
}

Beamformer::Beamformer(CMat v) : V(std::move(v)) {
  if (V.cols() < 1 || V.cols() > V.rows()) throw DimensionError("Beamformer: need 1 <= d <= N_T");
  if (!V.allFinite()) throw DataError("Beamformer: non-finite entries");
}

AnBeamformer::AnBeamformer(CMat v, CMat v_e) : V(std::move(v)), V_E(std::move(v_e)) {
  if (V.cols() < 1 || V.cols() > V.rows()) throw DimensionError("AnBeamformer: need 1 <= d <= N_T");
  if (V_E.rows() != V.rows() || V_E.cols() != V.rows())
    throw DimensionError("AnBeamformer: V_E must be N_T x N_T");
  if (!V.allFinite() || !V_E.allFinite()) throw DataError("AnBeamformer: non-finite entries");
}

double secrecy_rate_nats(const ChannelPair& ch, const CMat& V) {
  if (V.rows() != ch.n_t()) throw DimensionError("secrecy_rate: V has wrong row count");
  return logdet_gain(ch.info(), V) - logdet_gain(ch.energy(), V);
}

double secrecy_rate(const ChannelPair& ch, const Beamformer& bf) {
  return nats_to_bits(secrecy_rate_nats(ch, bf.V));
}

double an_secrecy_rate_nats(const ChannelPair& ch, const CMat& V, const CMat& V_E) {
  if (V.rows() != ch.n_t() || V_E.rows() != ch.n_t()) throw DimensionError("an_secrecy_rate: wrong row count");
  // log det(N + S) - log det(N) per receiver, N the noise-plus-jamming covariance.
  const auto leg = [](const CMat& h, const CMat& v, const CMat& ve) {
    const CMat hv = h * v;
    const CMat hn = h * ve;
    const CMat noise = CMat::Identity(h.rows(), h.rows()) + hn * hn.adjoint();
    return logdet_hpd(noise + hv * hv.adjoint()) - logdet_hpd(noise);
  };
  return leg(ch.info(), V, V_E) - leg(ch.energy(), V, V_E);
}

double an_secrecy_rate(const ChannelPair& ch, const AnBeamformer& bf) {
  return nats_to_bits(an_secrecy_rate_nats(ch, bf.V, bf.V_E));
}

double harvested_power(const ChannelPair& ch, const CMat& covariance) {
  if (covariance.rows() != ch.n_t() || covariance.cols() != ch.n_t())
    throw DimensionError("harvested_power: covariance must be N_T x N_T");
  return ch.zeta() * ch.sigma2_energy() * trace_product(ch.energy_gram(), covariance);
}

double energy_quadratic(const ChannelPair& ch, const CMat& V) { return (ch.energy() * V).squaredNorm(); }

double harvest_threshold(const ChannelPair& ch, const DesignBudget& budget) {
  return budget.power_harvest / (ch.zeta() * ch.sigma2_energy());
}

Feasibility feasibility(const ChannelPair& ch, const DesignBudget& budget) {
  const double top = std::max(0.0, lambda_max(ch.energy_gram()));
  const double best = ch.zeta() * ch.sigma2_energy() * budget.power_total * top;
  return {best >= budget.power_harvest, best - budget.power_harvest};
}

void require_feasible(const ChannelPair& ch, const DesignBudget& budget) {
  const auto f = feasibility(ch, budget);
  if (f.feasible) return;
  std::ostringstream msg;
  msg << "harvesting target unreachable at full power (margin " << std::setprecision(4) << f.margin << " W)";
  throw FeasibilityError(msg.str());
}

bool eh_vacuous(const ChannelPair& ch, const DesignBudget& budget) {
  const double bottom = std::max(0.0, lambda_min(ch.energy_gram()));
  return ch.zeta() * ch.sigma2_energy() * budget.power_total * bottom >= budget.power_harvest;
}

bool is_feasible(const ChannelPair& ch, const DesignBudget& budget, const CMat& covariance, double power_tol,
                 double harvest_tol) {
  const double power = std::real(covariance.trace());
  return power <= budget.power_total * (1 + power_tol) &&
         harvested_power(ch, covariance) >= budget.power_harvest * (1 - harvest_tol);
}

}  // namespace secbf

#pragma once

// System model: a transmitter with N_T antennas serving an information
// receiver (N_I antennas) and an energy receiver (N_E antennas) that may also
// eavesdrop. Rates are computed with natural logarithms internally; the
// *_bits variants divide by ln 2.

#include <cmath>
#include <numbers>

#include "secbf/types.hpp"

namespace secbf {

inline constexpr double kLn2 = std::numbers::ln2;

inline double nats_to_bits(double nats) { return nats / kLn2; }
inline double bits_to_nats(double bits) { return bits * kLn2; }

/// 10^((dbm - 30) / 10).
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

/// Raw channels plus receiver noise powers (watts) and conversion efficiency.
/// The noise-normalized channels H = H_raw / sigma are computed once at
/// construction; instances are immutable afterwards.
class ChannelPair {
 public:
  ChannelPair(CMat h_info_raw, CMat h_energy_raw, double sigma2_info, double sigma2_energy, double zeta);

  const CMat& info_raw() const { return h_info_raw_; }
  const CMat& energy_raw() const { return h_energy_raw_; }
  /// Noise-normalized H_I.
  const CMat& info() const { return h_info_; }
  /// Noise-normalized H_E.
  const CMat& energy() const { return h_energy_; }
  /// H_I^H H_I.
  const CMat& info_gram() const { return info_gram_; }
  /// H_E^H H_E.
  const CMat& energy_gram() const { return energy_gram_; }

  double sigma2_info() const { return sigma2_info_; }
  double sigma2_energy() const { return sigma2_energy_; }
  double zeta() const { return zeta_; }

  Eigen::Index n_t() const { return h_info_.cols(); }
  Eigen::Index n_i() const { return h_info_.rows(); }
  Eigen::Index n_e() const { return h_energy_.rows(); }

 private:
  CMat h_info_raw_, h_energy_raw_;
  double sigma2_info_, sigma2_energy_, zeta_;
  CMat h_info_, h_energy_, info_gram_, energy_gram_;
};

/// Power budget and harvesting target, both in watts.
struct DesignBudget {
  double power_total;
  double power_harvest;

  DesignBudget(double p_total, double p_harvest);
  static DesignBudget from_dbm(double p_total_dbm, double p_harvest_dbm);
};

/// Transmit matrix V (N_T x d).
struct Beamformer {
  CMat V;

  explicit Beamformer(CMat v);
  Eigen::Index streams() const { return V.cols(); }
  double power() const { return V.squaredNorm(); }
};

/// Information beamformer plus artificial-noise factor V_E (N_T x N_T); the
/// noise covariance is Z = V_E V_E^H.
struct AnBeamformer {
  CMat V;
  CMat V_E;

  AnBeamformer(CMat v, CMat v_e);
  CMat noise_covariance() const { return V_E * V_E.adjoint(); }
  CMat total_covariance() const { return V * V.adjoint() + V_E * V_E.adjoint(); }
  double power() const { return V.squaredNorm() + V_E.squaredNorm(); }
};

/// log det(I + H_I V V^H H_I^H) - log det(I + H_E V V^H H_E^H), in nats.
double secrecy_rate_nats(const ChannelPair& ch, const CMat& V);
double secrecy_rate(const ChannelPair& ch, const Beamformer& bf);

/// Secrecy rate with artificial noise Z = V_E V_E^H treated as interference at
/// both receivers, in nats.
double an_secrecy_rate_nats(const ChannelPair& ch, const CMat& V, const CMat& V_E);
double an_secrecy_rate(const ChannelPair& ch, const AnBeamformer& bf);

/// zeta * Tr(H_E_raw Cov H_E_raw^H) in watts.
double harvested_power(const ChannelPair& ch, const CMat& covariance);

/// Tr(V^H H_E^H H_E V): the quantity the harvesting constraint bounds below.
double energy_quadratic(const ChannelPair& ch, const CMat& V);

/// P_E / (zeta sigma_E^2): the lower bound on energy_quadratic.
double harvest_threshold(const ChannelPair& ch, const DesignBudget& budget);

struct Feasibility {
  bool feasible;
  /// zeta sigma_E^2 P_T lambda_max(H_E^H H_E) - P_E, watts.
  double margin;
};

Feasibility feasibility(const ChannelPair& ch, const DesignBudget& budget);

/// Throws FeasibilityError, quoting the margin, when feasibility() fails.
void require_feasible(const ChannelPair& ch, const DesignBudget& budget);

/// True when every direction at full power meets the harvesting target.
bool eh_vacuous(const ChannelPair& ch, const DesignBudget& budget);

/// Checks V against both constraints with relative slack.
bool is_feasible(const ChannelPair& ch, const DesignBudget& budget, const CMat& covariance,
                 double power_tol = 1e-8, double harvest_tol = 1e-7);

}  // namespace secbf

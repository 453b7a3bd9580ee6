#pragma once

// Secrecy-rate maximization with artificial noise. The transmit covariance is
// V V^H + V_E V_E^H, where V_E V_E^H is noise that jams the eavesdropping
// energy receiver and still counts toward harvested power. The rate
//
//   log det(I + H_I V V^H H_I^H N_1^{-1}) + log det(I + H_E V_E V_E^H H_E^H)
//     - log det(I + H_E (V V^H + V_E V_E^H) H_E^H),   N_1 = I + H_I V_E V_E^H H_I^H,
//
// is rewritten with three weighted-MSE terms and solved by the same inexact
// block coordinate descent as the no-noise case, with a two-block V update.

#include <cstdint>

#include "secbf/bisection.hpp"
#include "secbf/ibcd.hpp"
#include "secbf/model.hpp"

namespace secbf {

struct AnAux {
  CMat U1;  // N_I x d
  CMat U2;  // N_E x N_T
  CMat W1;  // d x d
  CMat W2;  // N_T x N_T
  CMat W3;  // N_E x N_E
};

/// MMSE receivers and weights that maximize each term at (V, V_E).
AnAux an_update_aux(const ChannelPair& ch, const CMat& V, const CMat& V_E);

/// E_1 = (I - U_1^H H_I V)(.)^H + U_1^H N_1 U_1.
CMat an_mse_info(const ChannelPair& ch, const CMat& U1, const CMat& V, const CMat& V_E);
/// E_2 = (I - U_2^H H_E V_E)(.)^H + U_2^H U_2.
CMat an_mse_noise(const ChannelPair& ch, const CMat& U2, const CMat& V_E);

/// Sum of the three weighted-MSE terms including their constants d, N_T and
/// N_E; equals the rate in nats at an_update_aux outputs.
double an_objective(const ChannelPair& ch, const CMat& V, const CMat& V_E, const AnAux& aux);

/// Blocks {V, V_E} of the quadratic surrogate with the harvesting constraint
/// linearized at (V_t, VE_t).
BlockQp an_linearized_subproblem(const ChannelPair& ch, const CMat& V_t, const CMat& VE_t, const AnAux& aux,
                                 const DesignBudget& budget);

struct AnSubproblemSolution {
  CMat V;
  CMat V_E;
  double lambda = 0;
  double mu = 0;
  bool kept_incumbent = false;
};

AnSubproblemSolution an_solve_subproblem(const ChannelPair& ch, const CMat& V_t, const CMat& VE_t,
                                         const AnAux& aux, const DesignBudget& budget, double eps = 1e-6);

struct AnIbcdResult {
  AnBeamformer bf;
  ConvergenceTrace trace;
  int iterations = 0;
  double rate = 0;  // bits
  bool nonpositive_rate = false;
};

AnIbcdResult an_ibcd_solve(const ChannelPair& ch, const DesignBudget& budget, const AnBeamformer& init,
                           const IbcdOptions& opt = {});

/// The no-noise warmstart scaled to 95% of the budget plus isotropic noise
/// with the remaining 5%. If that misses the harvesting target the noise is
/// steered along the strongest energy direction instead.
AnBeamformer an_warmstart(const ChannelPair& ch, Eigen::Index d, const DesignBudget& budget, std::uint64_t seed);

}  // namespace secbf

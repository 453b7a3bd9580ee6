#pragma once

// Inexact block coordinate descent for the general multi-stream problem.
// The rate is rewritten with MMSE receivers U and weights W_I, W_E; U and the
// weights have closed forms, and V is updated by a convex surrogate in which
// the harvesting constraint is linearized at the current point.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "secbf/bisection.hpp"
#include "secbf/model.hpp"

namespace secbf {

struct WmmseAux {
  CMat U;    // N_I x d
  CMat W_I;  // d x d
  CMat W_E;  // N_E x N_E
};

/// U = (I + H_I V V^H H_I^H)^{-1} H_I V, W_I = I + V^H H_I^H H_I V,
/// W_E = (I + H_E V V^H H_E^H)^{-1}.
WmmseAux update_aux(const ChannelPair& ch, const CMat& V);

/// (I - U^H H_I V)(I - U^H H_I V)^H + U^H U.
CMat mse_matrix(const ChannelPair& ch, const CMat& U, const CMat& V);

/// log det W_I - Tr(W_I E(U, V)) + d + log det W_E - Tr(W_E (I + H_E V V^H H_E^H)) + N_E.
double objective_f(const ChannelPair& ch, const CMat& V, const CMat& U, const CMat& W_I, const CMat& W_E);

/// The V-subproblem at fixed auxiliaries with the harvesting constraint
/// linearized at V_tilde, as a single-block BlockQp.
BlockQp linearized_subproblem(const ChannelPair& ch, const CMat& V_tilde, const WmmseAux& aux,
                              const DesignBudget& budget);

struct SubproblemSolution {
  CMat V;
  double lambda = 0;
  double mu = 0;
  bool kept_incumbent = false;
};

SubproblemSolution solve_linearized_subproblem(const ChannelPair& ch, const CMat& V_tilde, const WmmseAux& aux,
                                               const DesignBudget& budget, double eps = 1e-6);

struct ConvergenceTrace {
  std::vector<double> rates_bits;
  std::vector<double> power_w;
  std::vector<double> eh_margin_w;
  /// Tr(V_E V_E^H) per iteration; empty without artificial noise.
  std::vector<double> an_power_w;
  double lambda = 0;
  double mu = 0;
};

/// Writes iter, rate_bits, power_w, eh_margin_w (and an_power_w when present).
void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace);

struct IbcdOptions {
  /// Outer stop: C(V) - C(V_tilde) <= eps nats.
  double eps = 1e-6;
  /// Bisection stop: lambda_u - lambda_l <= eps_bisection.
  double eps_bisection = 1e-6;
  int max_iter = 5000;
};

struct IbcdResult {
  Beamformer bf;
  ConvergenceTrace trace;
  int iterations = 0;
  double rate = 0;  // bits
  bool nonpositive_rate = false;
};

IbcdResult ibcd_solve(const ChannelPair& ch, const DesignBudget& budget, const Beamformer& V0,
                      const IbcdOptions& opt = {});

/// Rescales V to full power and, if the harvesting target is then missed,
/// blends it toward the strongest energy direction until it is met.
CMat enforce_budget(const ChannelPair& ch, const DesignBudget& budget, const CMat& V);

/// Random draw, one auxiliary update, then the exact V-subproblem solved by a
/// lifted SDR with rank reduction. Falls back to the top-d energy eigenvectors.
Beamformer warmstart(const ChannelPair& ch, Eigen::Index d, const DesignBudget& budget, std::uint64_t seed);

/// A random V pushed onto the feasible set by enforce_budget.
Beamformer random_feasible_start(const ChannelPair& ch, Eigen::Index d, const DesignBudget& budget,
                                 std::uint64_t seed);

/// Largest of: the stationarity residual
/// ||(-H_I^H N_I^{-1} H_I + H_E^H N_E^{-1} H_E + lambda I - mu H_E^H H_E) V||_F / max(1, ||V||_F),
/// both complementarity products and both primal violations.
double kkt_residual(const ChannelPair& ch, const DesignBudget& budget, const CMat& V, double lambda, double mu);

}  // namespace secbf

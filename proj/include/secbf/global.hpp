#pragma once

// Globally optimal designs for two special cases: a single data stream, and
// full-rank transmission when H_I^H H_I - H_E^H H_E is PSD.

#include <vector>

#include "secbf/model.hpp"

namespace secbf {

enum class SingleStreamBranch { Eigen, Sdr };

const char* to_string(SingleStreamBranch b);

struct SingleStreamSolution {
  CVec v;
  double rate = 0;  // bits
  SingleStreamBranch branch = SingleStreamBranch::Eigen;
  bool nonpositive_rate = false;
};

/// Maximizes the rate ratio over beam directions at full power. When every
/// direction already meets the harvesting target the problem is a generalized
/// eigenproblem; otherwise a two-constraint SDR is solved and reduced to rank one.
/// `force_sdr` skips the eigen shortcut.
SingleStreamSolution solve_single_stream(const ChannelPair& ch, const DesignBudget& budget, bool force_sdr = false);

struct FullStreamOptions {
  double tol_nats = 1e-6;
  int max_iter = 5000;
  /// Start conditional gradient from a log-barrier Newton point instead of
  /// P_T q q^H with q the top eigenvector of H_E^H H_E.
  bool barrier_seed = true;
};

struct FullStreamSolution {
  CMat X;
  /// N_T x N_T factor with V V^H = X.
  CMat V;
  double rate = 0;  // bits
  /// Final linearization gap max_S Tr(grad (S - X)), nats.
  double fw_gap = 0;
  int iterations = 0;
  /// phi(X_k) in nats at every conditional-gradient iterate.
  std::vector<double> objective_trace;
  bool nonpositive_rate = false;
};

/// H_I^H H_I - H_E^H H_E.
CMat secrecy_gram(const ChannelPair& ch);

/// lambda_min(F) >= -1e-9 lambda_max(F).
bool secrecy_gram_psd(const ChannelPair& ch);

/// log det(I + H_I X H_I^H) - log det(I + H_E X H_E^H), nats.
double covariance_rate_nats(const ChannelPair& ch, const CMat& X);

/// Gradient of covariance_rate_nats with respect to X.
CMat covariance_rate_gradient(const ChannelPair& ch, const CMat& X);

FullStreamSolution solve_full_stream(const ChannelPair& ch, const DesignBudget& budget,
                                     const FullStreamOptions& opt = {});

/// Largest deviation among the two matrix identities underlying the convex
/// reformulation: the F^{1/2} form of the rate, and
/// (I + X K)^{-1} X = X - X H_E^H (I + H_E X H_E^H)^{-1} H_E X.
double concave_form_identity_check(const ChannelPair& ch, const CMat& X);

/// [X - Y, X H_E^H; H_E X, I + H_E X H_E^H].
CMat schur_lmi(const ChannelPair& ch, const CMat& X, const CMat& Y);

}  // namespace secbf

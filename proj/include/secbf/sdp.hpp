#pragma once

// Small dense complex-Hermitian semidefinite programs:
//
//   minimize   Tr(C X)
//   subject to Tr(A_i X) {=, <=, >=} b_i,   i = 1..m
//              X >= 0 (Hermitian PSD)
//
// solved by a primal-dual path-following method (HKM direction with Mehrotra
// predictor-corrector) on the real symmetric embedding
// A = R + jJ  ->  [R -J; J R].  Inequalities carry non-negative slacks.

#include <vector>

#include "secbf/types.hpp"

namespace secbf {

enum class Sense { EQ, LE, GE };

struct SdpConstraint {
  CMat A;
  double b;
  Sense sense;
};

struct SdpProblem {
  CMat C;
  std::vector<SdpConstraint> constraints;

  Eigen::Index n() const { return C.rows(); }
  std::size_t m() const { return constraints.size(); }
  /// Throws DimensionError / DataError when the problem is malformed.
  void validate() const;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter };

const char* to_string(SdpStatus s);

struct SdpSolution {
  CMat X;
  /// Dual slack Z = C - sum_i y_i A_i.
  CMat Z;
  /// Multipliers y_i. For a minimisation, LE rows have y_i <= 0 and GE rows y_i >= 0.
  RVec duals;
  double objective = 0;
  double dual_objective = 0;
  SdpStatus status = SdpStatus::MaxIter;
  int iterations = 0;
};

struct SdpOptions {
  int max_iter = 200;
  /// Relative gap and infeasibility target.
  double tol = 1e-10;
  /// Looser level accepted as Optimal when progress stalls.
  double accept_tol = 1e-8;
};

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt = {});

/// Relative residuals of a candidate solution, used for certification.
struct SdpResiduals {
  double primal = 0;          // max_i |Tr(A_i X) - b_i| violation / max(1, |b_i|)
  double dual = 0;            // ||C - sum y A - Z||_F / max(1, ||C||_F)
  double complementarity = 0; // |Tr(X Z)| / max(1, |objective|)
  double gap = 0;             // |primal obj - dual obj| / max(1, |objective|)
  double min_eig_x = 0;
  double min_eig_z = 0;
  double dual_sign = 0;       // largest wrong-signed multiplier magnitude
};

SdpResiduals sdp_residuals(const SdpProblem& p, const SdpSolution& s);

/// Lowers the rank of an optimal X without moving the objective or any
/// constraint value; terminates with rank r where r^2 <= m.
SdpSolution rank_reduce(const SdpSolution& sol, const SdpProblem& p);

/// sqrt(lambda_1) u_1 for a numerically rank-one PSD X (lambda_2 / lambda_1 <= 1e-6).
CVec extract_rank_one(const CMat& X, double max_ratio = 1e-6);

}  // namespace secbf

#pragma once

// Convex quadratic programs over a list of matrix blocks X_k:
//
//   minimize   sum_k Tr(X_k^H A_k X_k) - 2 Re Tr(B_k^H X_k)
//   subject to sum_k ||X_k||_F^2 <= P
//              sum_k 2 Re Tr(D_k^H X_k) >= b
//
// with A_k Hermitian PSD. The power constraint is dualized with multiplier
// lambda; for fixed lambda the linear constraint has a closed-form multiplier
// mu and X_k = (A_k + lambda I)^{-1} (B_k + mu D_k). lambda is found by
// bisection on the dual derivative sum_k ||X_k(lambda)||^2 - P.

#include <vector>

#include "secbf/types.hpp"

namespace secbf {

struct QpBlock {
  CMat A;
  CMat B;
  CMat D;
};

struct QpSolution {
  std::vector<CMat> X;
  double lambda = 0;
  double mu = 0;
  /// The incumbent was returned because the bisection point did not improve on it.
  bool kept_incumbent = false;
  int steps = 0;
};

class BlockQp {
 public:
  BlockQp(std::vector<QpBlock> blocks, double power, double bound);

  double power() const { return power_; }
  double bound() const { return bound_; }
  std::size_t size() const { return blocks_.size(); }

  /// Closed-form mu*(lambda), clamped at zero. Pseudo-inverses are used at lambda = 0.
  double mu_at(double lambda) const;
  std::vector<CMat> x_at(double lambda) const;
  std::vector<CMat> x_at(double lambda, double mu) const;
  double power_at(double lambda) const;

  double objective(const std::vector<CMat>& x) const;
  double linear_value(const std::vector<CMat>& x) const;
  double total_power(const std::vector<CMat>& x) const;

  /// Bisection to |lambda_u - lambda_l| <= eps, trying lambda = 0 first. When
  /// an incumbent is supplied and the bisection point is worse or infeasible,
  /// the incumbent is returned instead.
  QpSolution solve(double eps, const std::vector<CMat>* incumbent = nullptr) const;

 private:
  struct Factored {
    CMat P;
    RVec sigma;
    CMat pb;  // P^H B
    CMat pd;  // P^H D
  };

  RVec inverse_diag(const RVec& sigma, double lambda) const;

  std::vector<QpBlock> blocks_;
  std::vector<Factored> factored_;
  double power_;
  double bound_;
  double sigma_max_ = 0;
};

}  // namespace secbf

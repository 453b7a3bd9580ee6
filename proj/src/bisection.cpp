#include "secbf/bisection.hpp"

#include <cmath>
#include <limits>

#include "secbf/matcore.hpp"

namespace secbf {

namespace {

// Pseudo-inverse cut-off for the eigenvalues of A at lambda = 0.
constexpr double kPinvCut = 1e-12;

}  // namespace

BlockQp::BlockQp(std::vector<QpBlock> blocks, double power, double bound)
    : blocks_(std::move(blocks)), power_(power), bound_(bound) {
  if (blocks_.empty()) throw DimensionError("BlockQp: no blocks");
  if (!(power_ > 0)) throw DataError("BlockQp: power budget must be positive");
  for (const auto& b : blocks_) {
    detail::require_square(b.A, "BlockQp A");
    if (b.B.rows() != b.A.rows() || b.D.rows() != b.A.rows() || b.B.cols() != b.D.cols())
      throw DimensionError("BlockQp: block shapes disagree");
    const auto eig = hermitian_eig(b.A);
    Factored f{eig.eigenvectors, eig.eigenvalues.cwiseMax(0.0), CMat(), CMat()};
    f.pb = f.P.adjoint() * b.B;
    f.pd = f.P.adjoint() * b.D;
    sigma_max_ = std::max(sigma_max_, f.sigma.maxCoeff());
    factored_.push_back(std::move(f));
  }
}

RVec BlockQp::inverse_diag(const RVec& sigma, double lambda) const {
  RVec inv(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double s = sigma(i) + lambda;
    inv(i) = (lambda > 0 || sigma(i) > kPinvCut * sigma_max_) ? 1.0 / s : 0.0;
  }
  return inv;
}

double BlockQp::mu_at(double lambda) const {
  double cross = 0, quad = 0;
  for (const auto& f : factored_) {
    const RVec inv = inverse_diag(f.sigma, lambda);
    cross += 2.0 * (inv.asDiagonal() * f.pb).cwiseProduct(f.pd.conjugate()).sum().real();
    quad += 2.0 * (inv.asDiagonal() * f.pd.cwiseAbs2()).sum();
  }
  const double num = bound_ - cross;
  if (num <= 0) return 0.0;
  if (!(quad > 0)) return std::numeric_limits<double>::infinity();
  return num / quad;
}

std::vector<CMat> BlockQp::x_at(double lambda, double mu) const {
  std::vector<CMat> x;
  for (const auto& f : factored_) {
    const RVec inv = inverse_diag(f.sigma, lambda);
    x.push_back(f.P * (inv.asDiagonal() * (f.pb + mu * f.pd)));
  }
  return x;
}

std::vector<CMat> BlockQp::x_at(double lambda) const { return x_at(lambda, mu_at(lambda)); }

double BlockQp::power_at(double lambda) const {
  const double mu = mu_at(lambda);
  double p = 0;
  for (const auto& f : factored_) p += (inverse_diag(f.sigma, lambda).asDiagonal() * (f.pb + mu * f.pd)).squaredNorm();
  return p;
}

double BlockQp::objective(const std::vector<CMat>& x) const {
  double v = 0;
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    v += (x[k].adjoint() * blocks_[k].A * x[k]).trace().real() -
         2.0 * (blocks_[k].B.adjoint() * x[k]).trace().real();
  return v;
}

double BlockQp::linear_value(const std::vector<CMat>& x) const {
  double v = 0;
  for (std::size_t k = 0; k < blocks_.size(); ++k) v += 2.0 * (blocks_[k].D.adjoint() * x[k]).trace().real();
  return v;
}

double BlockQp::total_power(const std::vector<CMat>& x) const {
  double p = 0;
  for (const auto& m : x) p += m.squaredNorm();
  return p;
}

QpSolution BlockQp::solve(double eps, const std::vector<CMat>* incumbent) const {
  if (!(eps > 0)) throw DataError("BlockQp::solve: eps must be positive");
  const double mu_probe = mu_at(1.0);
  if (std::isinf(mu_probe)) throw FeasibilityError("linearized harvesting constraint is unreachable");

  QpSolution out;
  bool done = false;

  // lambda = 0 is optimal when its stationary point already fits the budget.
  const double mu0 = mu_at(0.0);
  if (std::isfinite(mu0)) {
    const auto x0 = x_at(0.0, mu0);
    double resid = 0, scale = 1;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      resid += (blocks_[k].A * x0[k] - blocks_[k].B - mu0 * blocks_[k].D).norm();
      scale += blocks_[k].B.norm() + mu0 * blocks_[k].D.norm();
    }
    const bool stationary = resid <= 1e-9 * scale;
    const bool fits = total_power(x0) <= power_;
    const bool meets = linear_value(x0) >= bound_ - 1e-12 * std::max(1.0, std::abs(bound_));
    if (stationary && fits && meets) {
      out.X = x0;
      out.mu = mu0;
      done = true;
    }
  }

  if (!done) {
    double lo = 0, hi = 1;
    for (int k = 0; k < 1000 && power_at(hi) > power_; ++k) {
      lo = hi;
      hi *= 2;
      ++out.steps;
    }
    while (hi - lo > eps) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (power_at(mid) >= power_ ? lo : hi) = mid;
      ++out.steps;
    }
    out.lambda = hi;
    out.mu = mu_at(hi);
    out.X = x_at(hi, out.mu);
  }

  if (incumbent) {
    const bool fits = total_power(out.X) <= power_ * (1 + 1e-12);
    const bool meets = linear_value(out.X) >= bound_ - 1e-9 * std::max(1.0, std::abs(bound_));
    if (!fits || !meets || objective(out.X) > objective(*incumbent)) {
      out.X = *incumbent;
      out.kept_incumbent = true;
    }
  }
  return out;
}

}  // namespace secbf

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace secbf {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Error hierarchy. Every solver failure surfaces as one of these.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct SingularityError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct RankError : Error {
  using Error::Error;
};
struct FeasibilityError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct SolverError : Error {
  using Error::Error;
};

}  // namespace secbf

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <stdexcept>
#include <string>

namespace ctrecov {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown for violated preconditions on public entry points (maps to CLI exit
// code 1).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& msg)
      : std::invalid_argument(msg) {}
};

// Thrown when an iterative procedure fails to converge; carries the best
// residual seen.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& msg, double residual)
      : std::runtime_error(msg + " (residual " + std::to_string(residual) +
                           ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// Matrix Market coordinate format (real, general), 1-based indices, values
// written with enough digits to round-trip doubles exactly.
void write_matrix_market(const SparseMat& m, const std::string& path);
SparseMat read_matrix_market(const std::string& path);

}  // namespace ctrecov

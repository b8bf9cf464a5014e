#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dppbound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Sentinel for log(0). Finite so that interval arithmetic on log-scale
/// quantities stays orderable and never produces NaN.
inline constexpr double kLogZero = -1e300;

inline bool is_log_zero(double v) { return v <= 0.5 * kLogZero; }

/// Caller supplied inconsistent or out-of-domain arguments.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite or otherwise unusable value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization failed even at the largest admissible jitter.
class FactorizationError : public NumericError {
 public:
  FactorizationError(const std::string& what, double last_jitter)
      : NumericError(what), last_jitter_(last_jitter) {}
  double last_jitter() const { return last_jitter_; }

 private:
  double last_jitter_;
};

/// An ordered collection of points in R^dim, stored one point per row.
class PointSet {
 public:
  explicit PointSet(Index dim = 1) : coords_(0, dim) {
    if (dim < 1) throw InputError("PointSet: dimension must be >= 1");
  }

  explicit PointSet(Matrix coords) : coords_(std::move(coords)) {
    if (coords_.cols() < 1) throw InputError("PointSet: dimension must be >= 1");
  }

  PointSet(std::initializer_list<std::initializer_list<double>> rows);

  static PointSet from_rows(const std::vector<std::vector<double>>& rows, Index dim);

  Index dim() const { return coords_.cols(); }
  Index size() const { return coords_.rows(); }
  bool empty() const { return coords_.rows() == 0; }

  const Matrix& coords() const { return coords_; }
  Matrix& coords() { return coords_; }

  Vector point(Index i) const { return coords_.row(i).transpose(); }
  double operator()(Index i, Index d) const { return coords_(i, d); }

  void append(const Vector& p);
  PointSet subset(const std::vector<Index>& rows) const;
  PointSet concat(const PointSet& other) const;

 private:
  Matrix coords_;
};

}  // namespace dppbound

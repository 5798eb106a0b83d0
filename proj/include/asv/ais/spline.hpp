#pragma once

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <vector>

#include "asv/core/errors.hpp"

namespace asv {

enum class SplineBoundary { NotAKnot, Natural };

/// Piecewise cubic interpolant through (x_i, y_i) with strictly increasing x.
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> xs, std::vector<double> ys, SplineBoundary b = SplineBoundary::NotAKnot)
      : x_(std::move(xs)), y_(std::move(ys)) {
    const std::size_t n = x_.size();
    if (n != y_.size()) throw PreconditionError("spline abscissae and ordinates differ in length");
    if (n < 4) throw InsufficientData("cubic spline needs at least four knots");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw PreconditionError("spline abscissae must be strictly increasing");
    solve(b);
  }

  double operator()(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h * h) / 6.0;
  }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& second_derivatives() const { return m_; }

 private:
  std::size_t interval(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    return static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  }

  /// Second derivatives at the knots from continuity of the first derivative plus the end conditions.
  void solve(SplineBoundary b) {
    const auto n = static_cast<Eigen::Index>(x_.size());
    std::vector<Eigen::Triplet<double>> tri;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    const auto h = [&](Eigen::Index i) { return x_[i + 1] - x_[i]; };
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      tri.emplace_back(i, i - 1, h(i - 1));
      tri.emplace_back(i, i, 2.0 * (h(i - 1) + h(i)));
      tri.emplace_back(i, i + 1, h(i));
      rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h(i) - (y_[i] - y_[i - 1]) / h(i - 1));
    }
    if (b == SplineBoundary::Natural) {
      tri.emplace_back(0, 0, 1.0);
      tri.emplace_back(n - 1, n - 1, 1.0);
    } else {
      // Third derivative continuous across the second and the second-to-last knot.
      tri.emplace_back(0, 0, h(1));
      tri.emplace_back(0, 1, -(h(0) + h(1)));
      tri.emplace_back(0, 2, h(0));
      tri.emplace_back(n - 1, n - 3, h(n - 2));
      tri.emplace_back(n - 1, n - 2, -(h(n - 3) + h(n - 2)));
      tri.emplace_back(n - 1, n - 1, h(n - 3));
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(tri.begin(), tri.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericFault("spline system is singular");
    const Eigen::VectorXd m = lu.solve(rhs);
    m_.assign(m.data(), m.data() + n);
  }

  std::vector<double> x_, y_, m_;
};

/// Piecewise-linear interpolant.
class LinearInterpolant {
 public:
  LinearInterpolant() = default;

  LinearInterpolant(std::vector<double> xs, std::vector<double> ys) : x_(std::move(xs)), y_(std::move(ys)) {
    if (x_.size() != y_.size()) throw PreconditionError("interpolant abscissae and ordinates differ in length");
    if (x_.size() < 2) throw InsufficientData("linear interpolation needs at least two knots");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw PreconditionError("interpolant abscissae must be strictly increasing");
  }

  double operator()(double x) const {
    std::size_t i = 0;
    if (x >= x_.back()) {
      i = x_.size() - 2;
    } else if (x > x_.front()) {
      i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    }
    const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
    if (w == 0.0) return y_[i];
    if (w == 1.0) return y_[i + 1];
    return y_[i] + w * (y_[i + 1] - y_[i]);
  }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_, y_;
};

}  // namespace asv

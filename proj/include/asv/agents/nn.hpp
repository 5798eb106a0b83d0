#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "asv/core/errors.hpp"
#include "asv/core/rng.hpp"

namespace asv::nn {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

/// Named parameter with its gradient slot.
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;

  Tensor() = default;
  Tensor(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

using ParamList = std::vector<Tensor*>;

inline void fill_uniform(Mat& m, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
}

inline void zero_grads(const ParamList& ps) {
  for (Tensor* t : ps) t->zero_grad();
}

inline void check_finite_grads(const ParamList& ps) {
  for (const Tensor* t : ps)
    if (!t->grad.allFinite()) throw NumericFault("non-finite gradient in '" + t->name + "'");
}

/// θ' ← τθ + (1 − τ)θ'.
inline void soft_update(const ParamList& target, const ParamList& source, double tau) {
  if (target.size() != source.size()) throw StructuralError("soft update between different architectures");
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (tau == 1.0)
      target[i]->value = source[i]->value;
    else
      target[i]->value = tau * source[i]->value + (1.0 - tau) * target[i]->value;
  }
}

inline void prefix_names(const ParamList& ps, const std::string& prefix) {
  for (Tensor* t : ps) t->name = prefix + t->name;
}

inline Mat hcat(const Mat& a, const Mat& b) {
  Mat out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

/// Fully connected layer y = x W + b, W stored in×out.
class Dense {
 public:
  Tensor W, b;

  Dense() = default;
  Dense(const std::string& name, int in, int out, Rng& rng) : W(name + ".W", in, out), b(name + ".b", 1, out) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    fill_uniform(W.value, bound, rng);
    fill_uniform(b.value, bound, rng);
  }

  int in() const { return static_cast<int>(W.value.rows()); }
  int out() const { return static_cast<int>(W.value.cols()); }

  Mat forward(const Mat& x) {
    if (x.cols() != W.value.rows()) throw StructuralError("dense '" + W.name + "' input width mismatch");
    x_ = x;
    Mat y = x * W.value;
    y.rowwise() += b.value.row(0);
    return y;
  }

  /// Accumulates parameter gradients and returns dL/dx.
  Mat backward(const Mat& dy) {
    accumulate(dy);
    return dy * W.value.transpose();
  }

  /// dL/dx only; parameter gradients untouched.
  Mat backward_input(const Mat& dy) const { return dy * W.value.transpose(); }

  /// Parameter gradients only.
  void accumulate(const Mat& dy) {
    W.grad.noalias() += x_.transpose() * dy;
    b.grad += dy.colwise().sum();
  }

  ParamList params() { return {&W, &b}; }

 private:
  Mat x_;
};

/// Elementwise σ and tanh written through exp so that Eigen vectorizes them for doubles.
template <class Derived>
Mat sigmoid(const Eigen::MatrixBase<Derived>& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

template <class Derived>
Mat tanh_of(const Eigen::MatrixBase<Derived>& x) {
  return (1.0 - 2.0 / ((2.0 * x.array()).exp() + 1.0)).matrix();
}

struct Relu {
  Mat forward(const Mat& x) {
    y_ = x.cwiseMax(0.0);
    return y_;
  }
  Mat backward(const Mat& dy) const { return (y_.array() > 0.0).select(dy, 0.0); }

 private:
  Mat y_;
};

struct Tanh {
  Mat forward(const Mat& x) {
    y_ = tanh_of(x);
    return y_;
  }
  Mat backward(const Mat& dy) const { return (dy.array() * (1.0 - y_.array().square())).matrix(); }

 private:
  Mat y_;
};

/// LSTM with gate order (i, f, g, o) returning the final hidden state. A step mask of 0 for a row
/// leaves that row's state untouched, which lets variable-length sequences share one batch when
/// they are right-aligned.
class Lstm {
 public:
  Tensor Wx, Wh, b;

  Lstm() = default;
  Lstm(const std::string& name, int in, int hidden, Rng& rng)
      : Wx(name + ".Wx", in, 4 * hidden), Wh(name + ".Wh", hidden, 4 * hidden), b(name + ".b", 1, 4 * hidden),
        H_(hidden) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    fill_uniform(Wx.value, bound, rng);
    fill_uniform(Wh.value, bound, rng);
    fill_uniform(b.value, bound, rng);
  }

  int hidden() const { return H_; }
  int in() const { return static_cast<int>(Wx.value.rows()); }

  /// `masks` is empty or holds one B-vector of {0, 1} per step.
  Mat forward(const std::vector<Mat>& xs, const std::vector<Vec>& masks = {}) {
    if (xs.empty()) throw StructuralError("lstm '" + Wx.name + "' needs at least one step");
    if (!masks.empty() && masks.size() != xs.size()) throw StructuralError("lstm mask count mismatch");
    const Eigen::Index B = xs.front().rows();
    steps_.resize(xs.size());
    Mat h = Mat::Zero(B, H_), c = Mat::Zero(B, H_);
    bool zero_state = true;
    for (std::size_t t = 0; t < xs.size(); ++t) {
      if (xs[t].cols() != Wx.value.rows() || xs[t].rows() != B) throw StructuralError("lstm '" + Wx.name + "' input shape mismatch");
      Step& s = steps_[t];
      s.x = xs[t];
      s.h_prev = std::move(h);
      s.c_prev = std::move(c);
      s.zero_state = zero_state;
      s.masked = !masks.empty() && (masks[t].array() < 0.5).any();
      if (s.masked) s.mask = masks[t];
      Mat gates = s.x * Wx.value;
      if (!zero_state) gates.noalias() += s.h_prev * Wh.value;
      gates.rowwise() += b.value.row(0);
      // tanh(x) = 2σ(2x) − 1 lets one pass activate all four gates.
      gates.middleCols(2 * H_, H_) *= 2.0;
      s.act = sigmoid(gates);
      s.act.middleCols(2 * H_, H_) = (2.0 * s.act.middleCols(2 * H_, H_).array() - 1.0).matrix();
      const auto i = s.act.leftCols(H_).array();
      const auto f = s.act.middleCols(H_, H_).array();
      const auto g = s.act.middleCols(2 * H_, H_).array();
      const auto o = s.act.rightCols(H_).array();
      Mat c_new = (f * s.c_prev.array() + i * g).matrix();
      s.tanh_c = tanh_of(c_new);
      Mat h_new = (o * s.tanh_c.array()).matrix();
      if (s.masked) {
        for (Eigen::Index r = 0; r < B; ++r) {
          if (s.mask[r] < 0.5) {
            c_new.row(r) = s.c_prev.row(r);
            h_new.row(r) = s.h_prev.row(r);
          }
        }
        zero_state = zero_state && (s.mask.array() < 0.5).all();
      } else {
        zero_state = false;
      }
      c = std::move(c_new);
      h = std::move(h_new);
    }
    return h;
  }

  /// Backpropagates dL/dh_T; accumulates parameter gradients and returns dL/dx_t per step.
  std::vector<Mat> backward(const Mat& dh_final, bool need_input_grad = true) {
    const Eigen::Index B = dh_final.rows();
    std::vector<Mat> dxs(steps_.size());
    Mat dh = dh_final, dc = Mat::Zero(B, H_);
    Mat dgates(B, 4 * H_);
    for (std::size_t k = steps_.size(); k-- > 0;) {
      const Step& s = steps_[k];
      const auto i = s.act.leftCols(H_).array();
      const auto f = s.act.middleCols(H_, H_).array();
      const auto g = s.act.middleCols(2 * H_, H_).array();
      const auto o = s.act.rightCols(H_).array();
      const Mat dc_total = dc + (dh.array() * o * (1.0 - s.tanh_c.array().square())).matrix();
      dgates.leftCols(H_) = (dc_total.array() * g * i * (1.0 - i)).matrix();
      dgates.middleCols(H_, H_) = (dc_total.array() * s.c_prev.array() * f * (1.0 - f)).matrix();
      dgates.middleCols(2 * H_, H_) = (dc_total.array() * i * (1.0 - g.square())).matrix();
      dgates.rightCols(H_) = (dh.array() * s.tanh_c.array() * o * (1.0 - o)).matrix();
      Mat dc_prev = (dc_total.array() * f).matrix();
      if (s.masked) {
        for (Eigen::Index r = 0; r < B; ++r) {
          if (s.mask[r] < 0.5) {
            dgates.row(r).setZero();
            dc_prev.row(r) = dc.row(r);
          }
        }
      }
      Wx.grad.noalias() += s.x.transpose() * dgates;
      b.grad += dgates.colwise().sum();
      if (need_input_grad) dxs[k] = dgates * Wx.value.transpose();
      Mat dh_prev;
      if (s.zero_state) {
        dh_prev = Mat::Zero(B, H_);
      } else {
        Wh.grad.noalias() += s.h_prev.transpose() * dgates;
        dh_prev = dgates * Wh.value.transpose();
      }
      if (s.masked) {
        for (Eigen::Index r = 0; r < B; ++r)
          if (s.mask[r] < 0.5) dh_prev.row(r) += dh.row(r);
      }
      dh = std::move(dh_prev);
      dc = std::move(dc_prev);
    }
    return dxs;
  }

  ParamList params() { return {&Wx, &Wh, &b}; }

 private:
  struct Step {
    Mat x, h_prev, c_prev, act, tanh_c;  ///< act holds (i, f, g, o) after activation
    Vec mask;
    bool masked = false;
    bool zero_state = false;
  };
  int H_ = 0;
  std::vector<Step> steps_;
};

/// Adam with per-parameter moment estimates; the parameter list order must stay fixed.
class Adam {
 public:
  explicit Adam(double lr = 1e-4, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  long long steps() const { return t_; }

  void step(const ParamList& ps) {
    if (m_.empty()) {
      for (const Tensor* p : ps) {
        m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
        v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
      }
    }
    if (m_.size() != ps.size()) throw StructuralError("optimizer parameter list changed");
    for (const Tensor* p : ps) {
      double probe = 0.0;
      const double* g = p->grad.data();
      for (Eigen::Index j = 0; j < p->grad.size(); ++j) probe += g[j] * 0.0;
      if (probe != 0.0 || std::isnan(probe)) throw NumericFault("non-finite gradient in '" + p->name + "'");
    }
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    const double step = lr_ / c1, inv_c2 = 1.0 / c2;
    const double b1 = b1_, b2 = b2_, eps = eps_;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      Tensor& p = *ps[k];
      double* __restrict w = p.value.data();
      const double* __restrict g = p.grad.data();
      double* __restrict m = m_[k].data();
      double* __restrict v = v_[k].data();
      const Eigen::Index n = p.value.size();
      if (lr_ == 0.0) {
        for (Eigen::Index j = 0; j < n; ++j) {
          m[j] = b1 * m[j] + (1.0 - b1) * g[j];
          v[j] = b2 * v[j] + (1.0 - b2) * (g[j] * g[j]);
        }
        continue;
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        const double mj = b1 * m[j] + (1.0 - b1) * g[j];
        const double vj = b2 * v[j] + (1.0 - b2) * (g[j] * g[j]);
        m[j] = mj;
        v[j] = vj;
        w[j] -= step * mj / (std::sqrt(vj * inv_c2) + eps);
      }
    }
  }

 private:
  double lr_, b1_, b2_, eps_;
  long long t_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace asv::nn

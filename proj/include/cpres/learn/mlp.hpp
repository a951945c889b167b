#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "cpres/errors.hpp"
#include "cpres/simcore/rng.hpp"

namespace cpres::learn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct MlpArch {
  int input = 0;
  std::vector<int> hidden;
  int output = 0;
  std::string activation = "tanh";

  bool operator==(const MlpArch&) const = default;
};

/// Fully connected net with tanh (or relu/identity) hidden activations and
/// a linear output layer. Parameters expose a flat view for optimizers,
/// checkpoints and finite-difference checks; gradients are exact
/// reverse-mode.
class Mlp {
 public:
  Mlp() = default;

  explicit Mlp(MlpArch arch) : arch_(std::move(arch)) {
    if (arch_.input < 1 || arch_.output < 1)
      throw ShapeMismatch("mlp: input/output dims must be >= 1");
    int in = arch_.input;
    for (int h : arch_.hidden) {
      if (h < 1) throw ShapeMismatch("mlp: hidden sizes must be >= 1");
      W_.emplace_back(MatrixXd::Zero(h, in));
      b_.emplace_back(VectorXd::Zero(h));
      in = h;
    }
    W_.emplace_back(MatrixXd::Zero(arch_.output, in));
    b_.emplace_back(VectorXd::Zero(arch_.output));
  }

  const MlpArch& arch() const { return arch_; }

  /// Xavier-style init; final_scale shrinks the output layer (useful for
  /// near-uniform initial policies).
  void init(RngStream& rng, double final_scale = 1.0) {
    for (std::size_t l = 0; l < W_.size(); ++l) {
      const double s = std::sqrt(2.0 / (W_[l].rows() + W_[l].cols())) *
                       (l + 1 == W_.size() ? final_scale : 1.0);
      for (Eigen::Index i = 0; i < W_[l].rows(); ++i)
        for (Eigen::Index j = 0; j < W_[l].cols(); ++j)
          W_[l](i, j) = rng.normal(0.0, s);
      b_[l].setZero();
    }
  }

  int param_count() const {
    int n = 0;
    for (std::size_t l = 0; l < W_.size(); ++l)
      n += static_cast<int>(W_[l].size() + b_[l].size());
    return n;
  }

  VectorXd flat_params() const {
    VectorXd out(param_count());
    int at = 0;
    for (std::size_t l = 0; l < W_.size(); ++l) {
      out.segment(at, W_[l].size()) =
          Eigen::Map<const VectorXd>(W_[l].data(), W_[l].size());
      at += static_cast<int>(W_[l].size());
      out.segment(at, b_[l].size()) = b_[l];
      at += static_cast<int>(b_[l].size());
    }
    return out;
  }

  void set_flat_params(const VectorXd& p) {
    if (p.size() != param_count())
      throw ShapeMismatch("mlp: flat parameter size mismatch");
    int at = 0;
    for (std::size_t l = 0; l < W_.size(); ++l) {
      Eigen::Map<VectorXd>(W_[l].data(), W_[l].size()) =
          p.segment(at, W_[l].size());
      at += static_cast<int>(W_[l].size());
      b_[l] = p.segment(at, b_[l].size());
      at += static_cast<int>(b_[l].size());
    }
  }

  bool params_finite() const {
    for (std::size_t l = 0; l < W_.size(); ++l)
      if (!W_[l].allFinite() || !b_[l].allFinite()) return false;
    return true;
  }

  struct Cache {
    VectorXd input;
    std::vector<VectorXd> pre;   // z per layer
    std::vector<VectorXd> post;  // activation(z) per hidden layer
  };

  VectorXd forward(const VectorXd& x, Cache* cache = nullptr) const {
    if (x.size() != arch_.input)
      throw ShapeMismatch("mlp: input size " + std::to_string(x.size()) +
                          " != " + std::to_string(arch_.input));
    if (cache) {
      cache->input = x;
      cache->pre.clear();
      cache->post.clear();
    }
    VectorXd a = x;
    for (std::size_t l = 0; l < W_.size(); ++l) {
      VectorXd z = W_[l] * a + b_[l];
      if (cache) cache->pre.push_back(z);
      if (l + 1 < W_.size()) {
        a = activate(z);
        if (cache) cache->post.push_back(a);
      } else {
        a = z;
      }
    }
    return a;
  }

  /// Accumulates dL/dparams into flat_grad (same layout as flat_params)
  /// given dL/doutput; optionally returns dL/dinput.
  void backward(const Cache& cache, const VectorXd& dout, VectorXd& flat_grad,
                VectorXd* dx = nullptr) const {
    if (dout.size() != arch_.output)
      throw ShapeMismatch("mlp: upstream gradient size mismatch");
    if (flat_grad.size() != param_count())
      throw ShapeMismatch("mlp: flat gradient size mismatch");
    VectorXd delta = dout;
    int at = param_count();
    for (std::size_t li = W_.size(); li-- > 0;) {
      const VectorXd& a_in = li == 0 ? cache.input : cache.post[li - 1];
      at -= static_cast<int>(b_[li].size());
      flat_grad.segment(at, b_[li].size()) += delta;
      at -= static_cast<int>(W_[li].size());
      // dW = delta * a_in^T, flattened column-major to match flat_params.
      Eigen::Map<MatrixXd> gw(flat_grad.data() + at, W_[li].rows(), W_[li].cols());
      gw.noalias() += delta * a_in.transpose();
      if (li == 0) {
        if (dx) *dx = W_[li].transpose() * delta;
        break;
      }
      VectorXd da = W_[li].transpose() * delta;
      delta = da.cwiseProduct(activate_grad(cache.pre[li - 1], cache.post[li - 1]));
    }
  }

 private:
  VectorXd activate(const VectorXd& z) const {
    if (arch_.activation == "tanh") return z.array().tanh();
    if (arch_.activation == "relu") return z.cwiseMax(0.0);
    if (arch_.activation == "identity") return z;
    throw Error("mlp: unknown activation " + arch_.activation);
  }

  VectorXd activate_grad(const VectorXd& z, const VectorXd& a) const {
    if (arch_.activation == "tanh") return 1.0 - a.array().square();
    if (arch_.activation == "relu")
      return (z.array() > 0.0).cast<double>();
    if (arch_.activation == "identity") return VectorXd::Ones(z.size());
    throw Error("mlp: unknown activation " + arch_.activation);
  }

  MlpArch arch_;
  std::vector<MatrixXd> W_;
  std::vector<VectorXd> b_;
};

/// Adam with bias correction over a flat parameter vector.
class Adam {
 public:
  explicit Adam(int n = 0, double lr = 3e-4, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
        m_(VectorXd::Zero(n)), v_(VectorXd::Zero(n)) {}

  void step(VectorXd& params, const VectorXd& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
      throw ShapeMismatch("adam: size mismatch");
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    params.array() -=
        lr_ * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps_);
  }

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  VectorXd m_, v_;
};

/// Scales the gradient in place so its L2 norm is at most max_norm.
inline void clip_grad_norm(VectorXd& grad, double max_norm) {
  if (max_norm <= 0.0) return;
  const double n = grad.norm();
  if (n > max_norm) grad *= max_norm / n;
}

}  // namespace cpres::learn

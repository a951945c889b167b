#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "cpres/learn/mlp.hpp"
#include "cpres/simcore/spaces.hpp"

namespace cpres::learn {

enum class RewardInput { kStateAction, kStateOnly };

inline std::string to_string(RewardInput m) {
  return m == RewardInput::kStateAction ? "state_action" : "state_only";
}

/// Scalar reward/energy head f(s, a). In state_action mode the action
/// enters as concatenated per-factor one-hots; in state_only mode the
/// action is excluded by construction, which makes the learned signal
/// independent of the action input (disentangled usage).
class RewardNet {
 public:
  RewardNet() = default;

  RewardNet(int obs_dim, std::vector<int> action_dims, RewardInput mode,
            std::vector<int> hidden = {32, 32})
      : obs_dim_(obs_dim), dims_(std::move(action_dims)), mode_(mode),
        net_(MlpArch{input_dim(obs_dim, dims_, mode), std::move(hidden), 1,
                     "tanh"}) {}

  void init(RngStream& rng) { net_.init(rng, 1.0); }

  RewardInput mode() const { return mode_; }
  const std::vector<int>& action_dims() const { return dims_; }
  int obs_dim() const { return obs_dim_; }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

  VectorXd make_input(const VectorXd& obs, std::int64_t action) const {
    if (obs.size() != obs_dim_) throw ShapeMismatch("reward_net: obs size");
    if (mode_ == RewardInput::kStateOnly) return obs;
    VectorXd x = VectorXd::Zero(net_.arch().input);
    x.head(obs_dim_) = obs;
    const auto idx = decode_action(action, dims_);
    int at = obs_dim_;
    for (std::size_t f = 0; f < dims_.size(); ++f) {
      x[at + idx[f]] = 1.0;
      at += dims_[f];
    }
    return x;
  }

  double value(const VectorXd& obs, std::int64_t action,
               Mlp::Cache* cache = nullptr) const {
    return net_.forward(make_input(obs, action), cache)[0];
  }

 private:
  static int input_dim(int obs_dim, const std::vector<int>& dims,
                       RewardInput mode) {
    if (mode == RewardInput::kStateOnly) return obs_dim;
    return obs_dim + std::accumulate(dims.begin(), dims.end(), 0);
  }

  int obs_dim_ = 0;
  std::vector<int> dims_;
  RewardInput mode_ = RewardInput::kStateAction;
  Mlp net_;
};

}  // namespace cpres::learn

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cpres/learn/mlp.hpp"
#include "cpres/simcore/spaces.hpp"

namespace cpres::learn {

/// Log-softmax over a logit segment, numerically stable.
inline VectorXd log_softmax(const VectorXd& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

/// Stochastic policy with one categorical head per action factor
/// (MultiDiscrete). The trunk is a single MLP whose output concatenates the
/// per-factor logits; the joint distribution is the product of the heads.
class PolicyNet {
 public:
  PolicyNet() = default;

  PolicyNet(int obs_dim, std::vector<int> action_dims,
            std::vector<int> hidden = {32, 32})
      : dims_(std::move(action_dims)),
        net_(MlpArch{obs_dim, std::move(hidden),
                     std::accumulate(dims_.begin(), dims_.end(), 0), "tanh"}) {}

  void init(RngStream& rng) { net_.init(rng, 0.01); }

  const std::vector<int>& action_dims() const { return dims_; }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

  /// Per-factor log-probabilities for an observation.
  std::vector<VectorXd> head_log_probs(const VectorXd& obs,
                                       Mlp::Cache* cache = nullptr) const {
    const VectorXd logits = net_.forward(obs, cache);
    std::vector<VectorXd> out;
    out.reserve(dims_.size());
    int at = 0;
    for (int d : dims_) {
      out.push_back(log_softmax(logits.segment(at, d)));
      at += d;
    }
    return out;
  }

  std::int64_t sample(const VectorXd& obs, RngStream& rng,
                      double* logp = nullptr) const {
    const auto heads = head_log_probs(obs);
    std::vector<int> idx(dims_.size());
    double lp = 0.0;
    for (std::size_t f = 0; f < dims_.size(); ++f) {
      const double u = rng.uniform();
      double acc = 0.0;
      int pick = dims_[f] - 1;
      for (int j = 0; j < dims_[f]; ++j) {
        acc += std::exp(heads[f][j]);
        if (u < acc) {
          pick = j;
          break;
        }
      }
      idx[f] = pick;
      lp += heads[f][pick];
    }
    if (logp) *logp = lp;
    return encode_action(idx, dims_);
  }

  /// Joint argmax; with independent heads this is the per-factor argmax.
  std::int64_t greedy(const VectorXd& obs) const {
    const auto heads = head_log_probs(obs);
    std::vector<int> idx(dims_.size());
    for (std::size_t f = 0; f < dims_.size(); ++f) {
      Eigen::Index best;
      heads[f].maxCoeff(&best);
      idx[f] = static_cast<int>(best);
    }
    return encode_action(idx, dims_);
  }

  double log_prob(const VectorXd& obs, std::int64_t action) const {
    const auto heads = head_log_probs(obs);
    const auto idx = decode_action(action, dims_);
    double lp = 0.0;
    for (std::size_t f = 0; f < dims_.size(); ++f) lp += heads[f][idx[f]];
    return lp;
  }

  /// Sum of per-factor categorical entropies (nats).
  double entropy(const VectorXd& obs) const {
    const auto heads = head_log_probs(obs);
    double h = 0.0;
    for (const auto& lg : heads)
      h -= (lg.array().exp() * lg.array()).sum();
    return h;
  }

  /// d log pi(a|s) / d logits: one-hot(a_f) - softmax_f per head.
  VectorXd logp_grad_wrt_logits(const std::vector<VectorXd>& heads,
                                const std::vector<int>& idx) const {
    VectorXd g(net_.arch().output);
    int at = 0;
    for (std::size_t f = 0; f < dims_.size(); ++f) {
      g.segment(at, dims_[f]) = -heads[f].array().exp();
      g[at + idx[f]] += 1.0;
      at += dims_[f];
    }
    return g;
  }

  /// d entropy / d logits: -p_j (log p_j + H_f) per head.
  VectorXd entropy_grad_wrt_logits(const std::vector<VectorXd>& heads) const {
    VectorXd g(net_.arch().output);
    int at = 0;
    for (std::size_t f = 0; f < dims_.size(); ++f) {
      const auto p = heads[f].array().exp();
      const double h = -(p * heads[f].array()).sum();
      g.segment(at, dims_[f]) = (-p * (heads[f].array() + h)).matrix();
      at += dims_[f];
    }
    return g;
  }

 private:
  std::vector<int> dims_;
  Mlp net_;
};

/// State-value net: MLP with a scalar output.
class ValueNet {
 public:
  ValueNet() = default;
  ValueNet(int obs_dim, std::vector<int> hidden = {32, 32})
      : net_(MlpArch{obs_dim, std::move(hidden), 1, "tanh"}) {}

  void init(RngStream& rng) { net_.init(rng, 1.0); }
  double value(const VectorXd& obs, Mlp::Cache* cache = nullptr) const {
    return net_.forward(obs, cache)[0];
  }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
};

/// Mean policy entropy over a batch of states.
inline double entropy_estimate(const PolicyNet& policy,
                               const std::vector<VectorXd>& states) {
  if (states.empty()) throw EmptyDataset("entropy_estimate: empty state batch");
  double h = 0.0;
  for (const auto& s : states) h += policy.entropy(s);
  return h / static_cast<double>(states.size());
}

}  // namespace cpres::learn

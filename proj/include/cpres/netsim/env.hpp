#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cpres/netsim/network.hpp"
#include "cpres/simcore/env.hpp"

namespace cpres::net {

struct NetsimConfig {
  TopologySpec topology;
  CyberGoalSpec goal;
  int max_steps = 25;
  double gamma = 0.99;
  double latency_penalty = 0.0;  // optional -alpha * mean_latency reward term

  json to_json() const {
    json j;
    j["topology"] = topology;
    j["goal"] = {{"n_g", goal.n_g}};
    j["max_steps"] = max_steps;
    j["gamma"] = gamma;
    j["latency_penalty"] = latency_penalty;
    return j;
  }
};

/// Rerouting MDP: the agent observes per-router drop rates and channel
/// utilizations and re-points controllable routers' next hops; reward is
/// the count of packets received at the DA over the interval; the goal is
/// at least n_g packets at the DA from every DC.
class NetsimEnv : public Env {
 public:
  explicit NetsimEnv(NetsimConfig cfg, bool terminate_on_goal = true)
      : cfg_(std::move(cfg)),
        net_(cfg_.topology),
        terminate_on_goal_(terminate_on_goal) {
    if (cfg_.goal.n_g < 1) throw SchemaError("netsim: n_g must be >= 1");
    spec_.obs_dim = net_.obs_dim();
    if (cfg_.topology.action_model == ActionModel::kRouterInterface) {
      spec_.action_dims = {static_cast<int>(cfg_.topology.controllable.size()),
                           cfg_.topology.n_interfaces()};
    } else {
      spec_.action_dims.assign(cfg_.topology.controllable.size(),
                               cfg_.topology.n_interfaces());
    }
    spec_.gamma = cfg_.gamma;
    spec_.max_steps = cfg_.max_steps;
    spec_.validate();
  }

  const MdpSpec& spec() const override { return spec_; }
  std::string id() const override { return "netsim:" + cfg_.topology.name; }
  std::uint64_t env_hash() const override { return fnv1a(cfg_.to_json().dump()); }
  std::unique_ptr<Env> clone() const override {
    return std::make_unique<NetsimEnv>(cfg_, terminate_on_goal_);
  }

  StepResult reset(std::uint64_t seed) override {
    rng_ = RngStream(seed, 0x6e65);  // per-episode stream
    net_.begin_episode(rng_.derive(1));
    compromised_ = cfg_.topology.attack.candidates.empty()
                       ? ""
                       : cfg_.topology.attack.candidates[rng_.uniform_int(
                             cfg_.topology.attack.candidates.size())];
    if (!compromised_.empty())
      net_.inject_dos(compromised_, cfg_.topology.attack.drop_prob);
    net_.run_interval();  // warm-up window feeds the initial observation
    net_.finish_warmup();
    steps_ = 0;
    finished_ = false;
    StepResult r;
    r.obs = net_.measure();
    r.info["compromised"] = compromised_;
    r.info["goal_reached"] = false;
    return r;
  }

  StepResult step(std::int64_t action) override {
    if (finished_) throw EpisodeFinished("netsim: episode already finished");
    apply_routing(action);
    net_.run_interval();
    return finish_step();
  }

  /// Decodes a flat action and updates routing without simulating traffic;
  /// the combined environment drives the interval itself.
  void apply_routing(std::int64_t action) {
    const auto idx = decode_action(action, spec_.action_dims);
    if (cfg_.topology.action_model == ActionModel::kRouterInterface) {
      net_.set_route(cfg_.topology.controllable[idx[0]], idx[1]);
    } else {
      for (std::size_t k = 0; k < cfg_.topology.controllable.size(); ++k)
        net_.set_route(cfg_.topology.controllable[k], idx[k]);
    }
  }

  /// Reward, goal bookkeeping and termination for an interval already
  /// simulated on the underlying network.
  StepResult finish_step() {
    ++steps_;
    StepResult r;
    r.obs = net_.measure();
    r.reward = static_cast<double>(net_.delivered_data_last_interval());
    if (cfg_.latency_penalty > 0.0)
      r.reward -= cfg_.latency_penalty * net_.mean_latency_last_interval();
    const bool goal = goal_reached();
    r.info["compromised"] = compromised_;
    r.info["goal_reached"] = goal;
    r.info["delivered"] = net_.delivered_data_last_interval();
    r.info["received_per_dc"] = net_.received_per_dc();
    r.info["mean_latency"] = net_.mean_latency_last_interval();
    if (goal && terminate_on_goal_) {
      r.done = true;
      r.info["done_reason"] = "goal";
    } else if (steps_ >= spec_.max_steps) {
      r.done = true;
      r.info["done_reason"] = "max_steps";
    }
    finished_ = r.done;
    return r;
  }

  bool goal_reached() const {
    for (auto c : net_.received_per_dc())
      if (c < cfg_.goal.n_g) return false;
    return true;
  }

  Network& network() { return net_; }
  const Network& network() const { return net_; }
  const NetsimConfig& config() const { return cfg_; }
  const std::string& compromised_router() const { return compromised_; }
  int steps_taken() const { return steps_; }

 private:
  NetsimConfig cfg_;
  Network net_;
  MdpSpec spec_;
  bool terminate_on_goal_;
  RngStream rng_{0, 0};
  std::string compromised_;
  int steps_ = 0;
  bool finished_ = true;
};

}  // namespace cpres::net

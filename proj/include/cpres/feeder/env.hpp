#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cpres/feeder/model.hpp"
#include "cpres/feeder/power_flow.hpp"
#include "cpres/simcore/env.hpp"

namespace cpres::feeder {

struct FeederConfig {
  FeederModel model;
  std::vector<std::vector<std::string>> contingencies;  // line-id sets
  double load_scale_min = 0.7;
  double load_scale_max = 1.2;
  int max_steps = 20;
  double gamma = 0.99;

  json to_json() const {
    json j;
    j["model"] = model;
    j["contingencies"] = contingencies;
    j["load_scale"] = {load_scale_min, load_scale_max};
    j["max_steps"] = max_steps;
    j["gamma"] = gamma;
    return j;
  }

  void validate() const {
    model.validate();
    for (const auto& c : contingencies) {
      for (const auto& lid : c) {
        const int l = model.line_index(lid);
        if (l < 0) throw SchemaError("contingency references unknown line " + lid);
        if (model.lines[l].switchable)
          throw SchemaError("contingency may not outage switch line " + lid);
      }
    }
    if (!(load_scale_min > 0 && load_scale_min <= load_scale_max))
      throw SchemaError("feeder: bad load scale range");
  }
};

/// Feeder reconfiguration MDP. Each episode draws a contingency and a load
/// profile; the agent toggles one sectionalizing switch per step. Toggles
/// that would leave an energized island non-radial are rejected in place.
/// Reward is 20 when every critical bus is inside the voltage band, else
/// minus the count of unrestored critical buses.
class FeederEnv : public Env {
 public:
  explicit FeederEnv(FeederConfig cfg, bool terminate_on_goal = true)
      : cfg_(std::move(cfg)), terminate_on_goal_(terminate_on_goal) {
    cfg_.validate();
    actionable_ = cfg_.model.actionable_switches();
    spec_.obs_dim = static_cast<int>(cfg_.model.critical.size());
    spec_.action_dims = {static_cast<int>(actionable_.size())};
    spec_.gamma = cfg_.gamma;
    spec_.max_steps = cfg_.max_steps;
    spec_.validate();
  }

  const MdpSpec& spec() const override { return spec_; }
  std::string id() const override { return "feeder:" + cfg_.model.name; }
  std::uint64_t env_hash() const override { return fnv1a(cfg_.to_json().dump()); }
  std::unique_ptr<Env> clone() const override {
    return std::make_unique<FeederEnv>(cfg_, terminate_on_goal_);
  }

  StepResult reset(std::uint64_t seed) override {
    RngStream rng(seed, 0x6665);
    outaged_.clear();
    if (!cfg_.contingencies.empty()) {
      const auto& c = cfg_.contingencies[rng.uniform_int(cfg_.contingencies.size())];
      outaged_.insert(c.begin(), c.end());
    }
    scaling_.clear();
    for (const auto& b : cfg_.model.buses)
      scaling_[b.id] = rng.uniform(cfg_.load_scale_min, cfg_.load_scale_max);
    switch_closed_ = cfg_.model.default_switch_states();
    steps_ = 0;
    finished_ = false;
    solve();
    StepResult r;
    r.obs = observation();
    r.info["n_res"] = n_res_;
    r.info["outaged"] = std::vector<std::string>(outaged_.begin(), outaged_.end());
    if (n_res_ == 0 && terminate_on_goal_) {
      // Trivial contingency: goal holds before any action.
      r.done = true;
      r.info["done_reason"] = "goal";
      finished_ = true;
    }
    return r;
  }

  StepResult step(std::int64_t action) override {
    if (finished_) throw EpisodeFinished("feeder: episode already finished");
    StepResult r;
    const bool accepted = apply_switch_toggle(action);
    ++steps_;
    r.obs = observation();
    r.reward = n_res_ == 0 ? 20.0 : -static_cast<double>(n_res_);
    r.info["n_res"] = n_res_;
    r.info["accepted"] = accepted;
    if (!accepted) r.info["rejected_nonradial"] = true;
    if (n_res_ == 0 && terminate_on_goal_) {
      r.done = true;
      r.info["done_reason"] = "goal";
    } else if (steps_ >= spec_.max_steps) {
      r.done = true;
      r.info["done_reason"] = "max_steps";
    }
    finished_ = r.done;
    return r;
  }

  /// Toggles the action-th actionable switch if radiality of the energized
  /// island survives; returns whether the toggle was applied. Re-solves the
  /// power flow either way.
  bool apply_switch_toggle(std::int64_t action) {
    if (action < 0 || action >= static_cast<std::int64_t>(actionable_.size()))
      throw OutOfRange("feeder: switch index " + std::to_string(action) +
                       " out of range");
    const int sw = actionable_[action];
    switch_closed_[sw] = !switch_closed_[sw];
    if (!energized_islands_radial(cfg_.model,
                                  cfg_.model.in_service(switch_closed_, outaged_))) {
      switch_closed_[sw] = !switch_closed_[sw];  // reject in place
      return false;
    }
    solve();
    return true;
  }

  /// Same physical state, externally forced (used by the coupled env when a
  /// command packet is delivered).
  bool force_toggle(int actionable_index) { return apply_switch_toggle(actionable_index); }

  std::vector<double> observation() const {
    std::vector<double> obs;
    obs.reserve(cfg_.model.critical.size());
    for (const auto& c : cfg_.model.critical) {
      const int b = cfg_.model.bus_index(c);
      obs.push_back(pf_.energized[b] ? pf_.v_pu[b] : 0.0);
    }
    return obs;
  }

  int n_res() const { return n_res_; }
  bool goal_reached() const { return n_res_ == 0; }
  double reward_now() const {
    return n_res_ == 0 ? 20.0 : -static_cast<double>(n_res_);
  }
  const std::vector<bool>& switch_states() const { return switch_closed_; }
  const std::set<std::string>& outaged_lines() const { return outaged_; }
  const std::map<std::string, double>& load_scaling() const { return scaling_; }
  const FeederConfig& config() const { return cfg_; }
  const std::vector<int>& actionable() const { return actionable_; }
  const PfResult& pf() const { return pf_; }
  int steps_taken() const { return steps_; }

  /// Power flow and restoration count for an arbitrary switch state under
  /// the current episode's contingency and loading (planning helper).
  int n_res_for(const std::vector<bool>& switch_closed) const {
    const auto svc = cfg_.model.in_service(switch_closed, outaged_);
    if (!energized_islands_radial(cfg_.model, svc)) return -1;
    return count_unrestored(cfg_.model, solve_power_flow(cfg_.model, svc, scaling_));
  }

 private:
  void solve() {
    pf_ = solve_power_flow(cfg_.model,
                           cfg_.model.in_service(switch_closed_, outaged_),
                           scaling_);
    n_res_ = count_unrestored(cfg_.model, pf_);
  }

  FeederConfig cfg_;
  bool terminate_on_goal_;
  MdpSpec spec_;
  std::vector<int> actionable_;
  std::set<std::string> outaged_;
  std::map<std::string, double> scaling_;
  std::vector<bool> switch_closed_;
  PfResult pf_;
  int n_res_ = 0;
  int steps_ = 0;
  bool finished_ = true;
};

/// Convenience: every single-line outage of non-switch lines.
inline std::vector<std::vector<std::string>> all_n1_contingencies(
    const FeederModel& m) {
  std::vector<std::vector<std::string>> out;
  for (const auto& l : m.lines)
    if (!l.switchable) out.push_back({l.id});
  return out;
}

}  // namespace cpres::feeder

#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "cpres/feeder/env.hpp"
#include "cpres/netsim/env.hpp"
#include "cpres/simcore/env.hpp"

namespace cpres::cp {

using nlohmann::json;

/// Switch command heading from the physical layer into the network.
struct PhyCommand {
  std::uint64_t cmd_id = 0;
  int actionable_index = -1;  // feeder actionable-switch index
  int zone = 0;
};

/// Network verdict returning to the physical layer.
struct CybNotice {
  std::uint64_t cmd_id = 0;
  bool delivered = false;
};

/// The two FIFO coupling surfaces between the simulators.
struct CouplingQueues {
  std::deque<PhyCommand> phy_to_cyb;
  std::deque<CybNotice> cyb_to_phy;
};

struct CombinedConfig {
  net::NetsimConfig net;
  feeder::FeederConfig feeder;
  int max_steps = 40;
  double gamma = 0.99;

  json to_json() const {
    json j;
    j["net"] = net.to_json();
    j["feeder"] = feeder.to_json();
    j["max_steps"] = max_steps;
    j["gamma"] = gamma;
    return j;
  }
};

/**
 * Combined restoration MDP. Observations and action factors are the
 * concatenation of the rerouting and reconfiguration environments. The
 * physical sub-action does not act directly: it is wrapped into a command
 * packet at the owning zone's DC and must cross the (possibly attacked)
 * network within the step; a dropped command leaves the switch unchanged.
 *
 * Per-step reward cases, with G_c/G_p the cyber/physical goal states:
 *   G_c and G_p      -> R_c + R_p
 *   G_c and not G_p  -> R_p
 *   not G_c and G_p  -> R_c
 *   neither          -> R_c + R_p
 * The episode ends when both goals hold together (or at the step cap).
 */
class CombinedEnv : public Env {
 public:
  explicit CombinedEnv(CombinedConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.net.max_steps = cfg_.max_steps;
    cfg_.feeder.max_steps = cfg_.max_steps;
    net_ = std::make_unique<net::NetsimEnv>(cfg_.net, /*terminate_on_goal=*/false);
    feeder_ = std::make_unique<feeder::FeederEnv>(cfg_.feeder,
                                                  /*terminate_on_goal=*/false);
    spec_.obs_dim = net_->spec().obs_dim + feeder_->spec().obs_dim;
    spec_.action_dims = net_->spec().action_dims;
    for (int d : feeder_->spec().action_dims) spec_.action_dims.push_back(d);
    spec_.gamma = cfg_.gamma;
    spec_.max_steps = cfg_.max_steps;
    spec_.validate();
    // Every actionable switch must map to a DC zone.
    for (int sw : feeder_->actionable()) {
      const int zone = cfg_.feeder.model.switches[sw].zone;
      bool found = false;
      for (const auto& dc : cfg_.net.topology.dcs)
        if (dc.zone == zone) found = true;
      if (!found)
        throw UnknownZone("combined: no DC for switch zone " +
                          std::to_string(zone));
    }
  }

  const MdpSpec& spec() const override { return spec_; }
  std::string id() const override {
    return "cpenv:" + cfg_.net.topology.name + "+" + cfg_.feeder.model.name;
  }
  std::uint64_t env_hash() const override { return fnv1a(cfg_.to_json().dump()); }
  std::unique_ptr<Env> clone() const override {
    return std::make_unique<CombinedEnv>(cfg_);
  }

  StepResult reset(std::uint64_t seed) override {
    RngStream rng(seed, 0x6370);
    auto net_r = net_->reset(rng.derive(1).next_u64());
    auto fdr_r = feeder_->reset(rng.derive(2).next_u64());
    queues_ = CouplingQueues{};
    next_cmd_id_ = 1;
    steps_ = 0;
    finished_ = false;
    StepResult r;
    r.obs = concat(net_r.obs, fdr_r.obs);
    r.info["compromised"] = net_r.info["compromised"];
    r.info["n_res"] = fdr_r.info["n_res"];
    r.info["g_c"] = false;
    r.info["g_p"] = feeder_->goal_reached();
    return r;
  }

  StepResult step(std::int64_t action) override {
    if (finished_) throw EpisodeFinished("cpenv: episode already finished");
    const auto idx = decode_action(action, spec_.action_dims);
    const std::size_t n_net = net_->spec().action_dims.size();
    std::vector<int> net_idx(idx.begin(), idx.begin() + n_net);
    const int phys = idx[n_net];

    net_->apply_routing(encode_action(net_idx, net_->spec().action_dims));
    const auto cmd = queue_phy_to_cyb(phys);
    net_->network().run_interval();
    auto net_r = net_->finish_step();

    // Resolve this step's command traffic into physical effects.
    bool cmd_dropped = false;
    bool toggle_accepted = false;
    for (auto id : net_->network().commands_delivered_last_interval())
      queues_.cyb_to_phy.push_back({id, true});
    for (auto id : net_->network().commands_dropped_last_interval())
      queues_.cyb_to_phy.push_back({id, false});
    while (!queues_.cyb_to_phy.empty()) {
      CybNotice notice = queues_.cyb_to_phy.front();
      queues_.cyb_to_phy.pop_front();
      const bool applied = apply_cyb_to_phy(notice);
      if (notice.cmd_id == cmd.cmd_id) {
        cmd_dropped = !notice.delivered;
        toggle_accepted = applied;
      }
    }

    ++steps_;
    const double r_c = net_r.reward;
    const double r_p = feeder_->reward_now();
    const bool g_c = net_->goal_reached();
    const bool g_p = feeder_->goal_reached();
    StepResult r;
    r.obs = concat(net_r.obs, feeder_->observation());
    if (g_c && g_p) r.reward = r_c + r_p;
    else if (g_c && !g_p) r.reward = r_p;
    else if (!g_c && g_p) r.reward = r_c;
    else r.reward = r_c + r_p;
    r.info["g_c"] = g_c;
    r.info["g_p"] = g_p;
    r.info["r_c"] = r_c;
    r.info["r_p"] = r_p;
    r.info["n_res"] = feeder_->n_res();
    r.info["compromised"] = net_->compromised_router();
    r.info["cmd_id"] = cmd.cmd_id;
    r.info["cmd_switch"] = cmd.actionable_index;
    if (cmd_dropped) r.info["cmd_dropped"] = true;
    if (!cmd_dropped && !toggle_accepted) r.info["rejected_nonradial"] = true;
    if (g_c && g_p) {
      r.done = true;
      r.info["done_reason"] = "goal";
    } else if (steps_ >= spec_.max_steps) {
      r.done = true;
      r.info["done_reason"] = "max_steps";
    }
    finished_ = r.done;
    return r;
  }

  /// Emits a switch command from the owning zone's DC. The command packet
  /// shares the data path and counts toward utilization but not toward the
  /// packet-delivery reward.
  PhyCommand queue_phy_to_cyb(int actionable_index) {
    if (actionable_index < 0 ||
        actionable_index >= static_cast<int>(feeder_->actionable().size()))
      throw UnknownSwitch("queue_phy_to_cyb: switch index " +
                          std::to_string(actionable_index));
    const int sw = feeder_->actionable()[actionable_index];
    PhyCommand cmd{next_cmd_id_++, actionable_index,
                   cfg_.feeder.model.switches[sw].zone};
    queues_.phy_to_cyb.push_back(cmd);
    net_->network().inject_command(cmd.zone, cmd.cmd_id);  // throws UnknownZone
    return cmd;
  }

  /// Consumes a delivery notice: a delivered command toggles its switch
  /// (subject to the radiality guard) and re-solves the power flow; a
  /// dropped command leaves the physical system untouched. Each pending
  /// command is consumed exactly once.
  bool apply_cyb_to_phy(const CybNotice& notice) {
    auto it = std::find_if(queues_.phy_to_cyb.begin(), queues_.phy_to_cyb.end(),
                           [&](const PhyCommand& c) { return c.cmd_id == notice.cmd_id; });
    if (it == queues_.phy_to_cyb.end())
      throw UnknownCommand("apply_cyb_to_phy: no pending command " +
                           std::to_string(notice.cmd_id));
    const PhyCommand cmd = *it;
    queues_.phy_to_cyb.erase(it);
    if (!notice.delivered) return false;
    return feeder_->force_toggle(cmd.actionable_index);
  }

  net::NetsimEnv& net_env() { return *net_; }
  feeder::FeederEnv& feeder_env() { return *feeder_; }
  const net::NetsimEnv& net_env() const { return *net_; }
  const feeder::FeederEnv& feeder_env() const { return *feeder_; }
  const CombinedConfig& config() const { return cfg_; }
  const CouplingQueues& queues() const { return queues_; }

 private:
  static std::vector<double> concat(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    std::vector<double> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }

  CombinedConfig cfg_;
  MdpSpec spec_;
  std::unique_ptr<net::NetsimEnv> net_;
  std::unique_ptr<feeder::FeederEnv> feeder_;
  CouplingQueues queues_;
  std::uint64_t next_cmd_id_ = 1;
  int steps_ = 0;
  bool finished_ = true;
};

}  // namespace cpres::cp

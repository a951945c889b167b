#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cpres/errors.hpp"
#include "cpres/netsim/topology.hpp"
#include "cpres/simcore/event_queue.hpp"
#include "cpres/simcore/rng.hpp"

namespace cpres::net {

enum class PacketKind { kData, kCommand };

struct Packet {
  std::uint64_t id = 0;
  PacketKind kind = PacketKind::kData;
  int src_dc = -1;
  std::uint64_t cmd_id = 0;
  double created_at = 0.0;
  int hops = 0;
};

/// Event-driven store-and-forward network with per-router output queues,
/// finite bandwidth and propagation delay on every channel, and i.i.d.
/// transit drops at DoS-compromised routers. One control interval of
/// simulated traffic corresponds to one environment step.
class Network {
 public:
  explicit Network(TopologySpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    build_indices();
    reset_static_routes();
    begin_episode(RngStream(0, 0));
  }

  const TopologySpec& spec() const { return spec_; }

  // --- control surface -----------------------------------------------

  /// Points `router` at its interface_index-th candidate next hop.
  /// Idempotent; only controllable routers accept routes.
  void set_route(const std::string& router, int interface_index) {
    const int r = require_router(router);
    if (!controllable_mask_[r])
      throw NotControllable("set_route: " + router + " is not controllable");
    const auto& ifs = spec_.interfaces.at(router);
    if (interface_index < 0 || interface_index >= static_cast<int>(ifs.size()))
      throw OutOfRange("set_route: interface index " +
                       std::to_string(interface_index) + " out of range");
    route_idx_[r] = interface_index;
  }

  int route_index(const std::string& router) const {
    const int r = require_router(router);
    if (!controllable_mask_[r])
      throw NotControllable("route_index: " + router + " is not controllable");
    return route_idx_[r];
  }

  /// Installs (or updates) a transit-drop probability at a router.
  void inject_dos(const std::string& router, double drop_prob) {
    const int r = require_router(router);
    drop_prob_[r] = drop_prob;
  }

  void clear_dos() { std::fill(drop_prob_.begin(), drop_prob_.end(), 0.0); }

  // --- episode lifecycle ----------------------------------------------

  /// Clears all traffic and counters, restores initial routes, and rebinds
  /// the episode random stream.
  void begin_episode(RngStream rng) {
    rng_ = rng;
    events_ = EventQueue<Event>();
    for (auto& d : dirs_) {
      d.queue.clear();
      d.busy = false;
      d.busy_until = 0.0;
    }
    clear_dos();
    for (std::size_t i = 0; i < spec_.controllable.size(); ++i) {
      const auto& id = spec_.controllable[i];
      auto it = spec_.initial_interface.find(id);
      route_idx_[require_router(id)] = it == spec_.initial_interface.end() ? 0 : it->second;
    }
    received_per_dc_.assign(spec_.dcs.size(), 0);
    total_generated_ = total_delivered_ = total_dropped_ = 0;
    live_packets_ = pending_arrivals_ = in_tx_ = 0;
    next_packet_id_ = 1;
    canceled_cmds_.clear();
    pending_cmds_.clear();
    zero_interval_counters();
  }

  /// Drops any in-flight warm-up traffic and zeroes the cumulative
  /// delivery counters while keeping the latest interval measurements, so
  /// the initial observation reflects the warm-up window.
  void finish_warmup() {
    EventQueue<Event> fresh;
    fresh.set_clock(events_.clock());
    events_ = std::move(fresh);
    for (auto& d : dirs_) {
      d.queue.clear();
      d.busy = false;
      d.busy_until = 0.0;
    }
    received_per_dc_.assign(spec_.dcs.size(), 0);
    total_generated_ = total_delivered_ = total_dropped_ = 0;
    live_packets_ = pending_arrivals_ = in_tx_ = 0;
    canceled_cmds_.clear();
    pending_cmds_.clear();
  }

  /// Injects one switching-command packet at the DC serving `zone`; it is
  /// resolved (delivered or dropped) within the next run_interval call.
  void inject_command(int zone, std::uint64_t cmd_id) {
    int dc = -1;
    for (std::size_t i = 0; i < spec_.dcs.size(); ++i)
      if (spec_.dcs[i].zone == zone) dc = static_cast<int>(i);
    if (dc < 0) throw UnknownZone("inject_command: no DC for zone " + std::to_string(zone));
    Packet p;
    p.id = next_packet_id_++;
    p.kind = PacketKind::kCommand;
    p.src_dc = dc;
    p.cmd_id = cmd_id;
    p.created_at = events_.clock();
    ++total_generated_;
    ++live_packets_;
    pending_cmds_.insert(cmd_id);
    ++pending_arrivals_;
    events_.schedule(Event{EvArrival{p, dc_router_[dc]}}, events_.clock());
  }

  /// Simulates one control interval: periodic DC generation, forwarding,
  /// queueing, transmission, propagation and DoS drops.
  void run_interval() {
    const double t0 = events_.clock();
    const double t1 = t0 + spec_.sim.interval_s;
    zero_interval_counters();
    for (auto& d : dirs_) {  // busy time spilling over from earlier intervals
      if (d.busy && d.busy_until > t0)
        d.busy_accum += std::min(d.busy_until, t1) - t0;
    }
    const double tick_dt = spec_.sim.interval_s / spec_.sim.ticks_per_step;
    for (int k = 0; k < spec_.sim.ticks_per_step; ++k)
      events_.schedule(Event{EvTick{}}, t0 + k * tick_dt);

    while (auto next = events_.peek_time()) {
      if (*next >= t1) break;
      auto [t, ev] = *events_.advance();
      std::visit([&](auto&& e) { handle(e, t, t0, t1); }, ev);
    }
    events_.set_clock(t1);

    // Commands still in flight at the interval boundary resolve as dropped.
    for (auto cmd : pending_cmds_) {
      canceled_cmds_.insert(cmd);
      cmd_dropped_last_.push_back(cmd);
    }
    pending_cmds_.clear();
  }

  // --- measurement ------------------------------------------------------

  /// Observation vector: per-router packet drop rate over the last
  /// interval (routers in file order), then per-channel utilization
  /// (channels in file order; the busier direction of each channel).
  std::vector<double> measure() const {
    std::vector<double> out;
    out.reserve(spec_.routers.size() + spec_.channels.size());
    for (std::size_t r = 0; r < spec_.routers.size(); ++r) {
      out.push_back(interval_offered_[r] == 0
                        ? 0.0
                        : static_cast<double>(interval_dropped_[r]) /
                              static_cast<double>(interval_offered_[r]));
    }
    for (std::size_t c = 0; c < spec_.channels.size(); ++c) {
      const double busy = std::max(dirs_[2 * c].busy_accum, dirs_[2 * c + 1].busy_accum);
      out.push_back(std::min(1.0, busy / spec_.sim.interval_s));
    }
    return out;
  }

  int obs_dim() const {
    return static_cast<int>(spec_.routers.size() + spec_.channels.size());
  }

  std::int64_t delivered_data_last_interval() const { return delivered_data_last_; }
  const std::vector<std::int64_t>& received_per_dc() const { return received_per_dc_; }
  double mean_latency_last_interval() const {
    return latency_count_ == 0 ? 0.0 : latency_sum_ / latency_count_;
  }
  const std::vector<std::uint64_t>& commands_delivered_last_interval() const {
    return cmd_delivered_last_;
  }
  const std::vector<std::uint64_t>& commands_dropped_last_interval() const {
    return cmd_dropped_last_;
  }

  std::int64_t interval_offered(const std::string& router) const {
    return interval_offered_[require_router(router)];
  }
  std::int64_t interval_dropped(const std::string& router) const {
    return interval_dropped_[require_router(router)];
  }

  // Conservation ledger (cumulative since episode start / warm-up flush).
  std::int64_t total_generated() const { return total_generated_; }
  std::int64_t total_delivered() const { return total_delivered_; }
  std::int64_t total_dropped() const { return total_dropped_; }
  std::int64_t in_flight() const { return live_packets_; }
  /// Structural recount of in-flight packets (queued, in transmission, or
  /// propagating); must always equal in_flight().
  std::int64_t in_flight_structural() const {
    std::int64_t n = pending_arrivals_ + in_tx_;
    for (const auto& d : dirs_) n += static_cast<std::int64_t>(d.queue.size());
    return n;
  }

  /// Current next hop of any router ("" for the DA's router).
  std::string next_hop(const std::string& router) const {
    const int r = require_router(router);
    if (r == da_idx_) return "";
    if (controllable_mask_[r]) return spec_.interfaces.at(router)[route_idx_[r]];
    return static_next_[r].empty() ? "" : static_next_[r];
  }

  /// Forwarding chain from `router` following current routes, ending at the
  /// DA's router, a dead end, or when a loop/TTL bound is hit.
  std::vector<std::string> forwarding_chain(const std::string& router) const {
    std::vector<std::string> chain{router};
    std::set<std::string> seen{router};
    std::string cur = router;
    const int ttl = spec_.sim.ttl_hop_factor * static_cast<int>(spec_.routers.size());
    for (int i = 0; i < ttl; ++i) {
      const std::string nh = next_hop(cur);
      if (nh.empty()) break;
      chain.push_back(nh);
      if (seen.count(nh)) break;  // loop
      seen.insert(nh);
      cur = nh;
      if (cur == spec_.da_router) break;
    }
    return chain;
  }

  double clock() const { return events_.clock(); }

 private:
  struct EvTick {};
  struct EvArrival {
    Packet p;
    int router;
  };
  struct EvTxDone {
    int dir;  // index into dirs_
    Packet p;
  };
  using Event = std::variant<EvTick, EvArrival, EvTxDone>;

  struct Direction {
    int channel = -1;
    int from = -1, to = -1;
    std::deque<Packet> queue;
    bool busy = false;
    double busy_until = 0.0;
    double busy_accum = 0.0;  // seconds within the current interval
  };

  void build_indices() {
    for (std::size_t i = 0; i < spec_.routers.size(); ++i)
      router_idx_[spec_.routers[i].id] = static_cast<int>(i);
    da_idx_ = router_idx_.at(spec_.da_router);
    controllable_mask_.assign(spec_.routers.size(), false);
    for (const auto& c : spec_.controllable)
      controllable_mask_[router_idx_.at(c)] = true;
    route_idx_.assign(spec_.routers.size(), 0);
    drop_prob_.assign(spec_.routers.size(), 0.0);
    dirs_.clear();
    for (std::size_t c = 0; c < spec_.channels.size(); ++c) {
      const int a = router_idx_.at(spec_.channels[c].a);
      const int b = router_idx_.at(spec_.channels[c].b);
      dirs_.push_back({static_cast<int>(c), a, b, {}, false, 0.0, 0.0});
      dirs_.push_back({static_cast<int>(c), b, a, {}, false, 0.0, 0.0});
      dir_of_[{a, b}] = static_cast<int>(dirs_.size()) - 2;
      dir_of_[{b, a}] = static_cast<int>(dirs_.size()) - 1;
    }
    dc_router_.clear();
    for (const auto& dc : spec_.dcs) dc_router_.push_back(router_idx_.at(dc.router));
  }

  /// Hop-count shortest paths toward the DA give every non-controllable
  /// router a fixed next hop (first-discovered neighbor, so channel file
  /// order breaks ties deterministically).
  void reset_static_routes() {
    static_next_.assign(spec_.routers.size(), "");
    std::vector<int> dist(spec_.routers.size(), -1);
    std::deque<int> frontier;
    dist[da_idx_] = 0;
    frontier.push_back(da_idx_);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop_front();
      for (const auto& vname : spec_.neighbors(spec_.routers[u].id)) {
        const int v = router_idx_.at(vname);
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          static_next_[v] = spec_.routers[u].id;
          frontier.push_back(v);
        }
      }
    }
  }

  int require_router(const std::string& id) const {
    auto it = router_idx_.find(id);
    if (it == router_idx_.end()) throw UnknownRouter("unknown router " + id);
    return it->second;
  }

  void zero_interval_counters() {
    interval_offered_.assign(spec_.routers.size(), 0);
    interval_dropped_.assign(spec_.routers.size(), 0);
    for (auto& d : dirs_) d.busy_accum = 0.0;
    delivered_data_last_ = 0;
    latency_sum_ = 0.0;
    latency_count_ = 0;
    cmd_delivered_last_.clear();
    cmd_dropped_last_.clear();
  }

  void drop_packet(const Packet& p, int router) {
    ++interval_dropped_[router];
    ++total_dropped_;
    --live_packets_;
    if (p.kind == PacketKind::kCommand && pending_cmds_.erase(p.cmd_id)) {
      cmd_dropped_last_.push_back(p.cmd_id);
      canceled_cmds_.insert(p.cmd_id);
    }
  }

  void handle(const EvTick&, double t, double, double) {
    for (std::size_t dc = 0; dc < spec_.dcs.size(); ++dc) {
      for (int k = 0; k < spec_.sim.packets_per_tick; ++k) {
        Packet p;
        p.id = next_packet_id_++;
        p.kind = PacketKind::kData;
        p.src_dc = static_cast<int>(dc);
        p.created_at = t;
        ++total_generated_;
        ++live_packets_;
        arrive(p, dc_router_[dc], t);
      }
    }
  }

  void handle(const EvArrival& ev, double t, double t0, double t1) {
    --pending_arrivals_;
    arrive(ev.p, ev.router, t, t0, t1);
  }

  void handle(const EvTxDone& ev, double t, double t0, double t1) {
    Direction& d = dirs_[ev.dir];
    d.busy = false;
    --in_tx_;
    ++pending_arrivals_;
    events_.schedule(Event{EvArrival{ev.p, d.to}},
                     t + spec_.channels[d.channel].delay_s);
    start_tx(ev.dir, t, t0, t1);
  }

  void arrive(Packet p, int router, double t, double t0 = 0.0, double t1 = 0.0) {
    ++p.hops;
    ++interval_offered_[router];
    const int ttl = spec_.sim.ttl_hop_factor * static_cast<int>(spec_.routers.size());
    if (p.hops > ttl) {
      drop_packet(p, router);
      return;
    }
    if (p.kind == PacketKind::kCommand && canceled_cmds_.count(p.cmd_id)) {
      // Late packet of an already-resolved command: discard quietly.
      ++total_dropped_;
      --live_packets_;
      return;
    }
    if (drop_prob_[router] > 0.0 && rng_.bernoulli(drop_prob_[router])) {
      drop_packet(p, router);
      return;
    }
    if (router == da_idx_) {
      --live_packets_;
      ++total_delivered_;
      if (p.kind == PacketKind::kData) {
        ++received_per_dc_[p.src_dc];
        ++delivered_data_last_;
        latency_sum_ += t - p.created_at;
        ++latency_count_;
      } else if (pending_cmds_.erase(p.cmd_id)) {
        cmd_delivered_last_.push_back(p.cmd_id);
      }
      return;
    }
    const std::string nh = next_hop(spec_.routers[router].id);
    if (nh.empty()) {
      drop_packet(p, router);  // dead end
      return;
    }
    const int dir = dir_of_.at({router, router_idx_.at(nh)});
    Direction& d = dirs_[dir];
    if (static_cast<int>(d.queue.size()) >=
        spec_.routers[router].queue_limit) {
      drop_packet(p, router);  // queue overflow
      return;
    }
    d.queue.push_back(p);
    start_tx(dir, t, t0, t1);
  }

  void start_tx(int dir, double t, double t0, double t1) {
    Direction& d = dirs_[dir];
    if (d.busy || d.queue.empty()) return;
    Packet p = d.queue.front();
    d.queue.pop_front();
    const double service = 1.0 / spec_.channels[d.channel].bandwidth_pps;
    d.busy = true;
    d.busy_until = t + service;
    if (t1 > t0) d.busy_accum += std::min(d.busy_until, t1) - t;
    ++in_tx_;
    events_.schedule(Event{EvTxDone{dir, p}}, d.busy_until);
  }

  TopologySpec spec_;
  RngStream rng_{0, 0};
  EventQueue<Event> events_;

  std::map<std::string, int> router_idx_;
  std::map<std::pair<int, int>, int> dir_of_;
  std::vector<Direction> dirs_;
  std::vector<int> dc_router_;
  int da_idx_ = 0;
  std::vector<bool> controllable_mask_;
  std::vector<std::string> static_next_;
  std::vector<int> route_idx_;
  std::vector<double> drop_prob_;

  // interval measurements
  std::vector<std::int64_t> interval_offered_;
  std::vector<std::int64_t> interval_dropped_;
  std::int64_t delivered_data_last_ = 0;
  double latency_sum_ = 0.0;
  std::int64_t latency_count_ = 0;
  std::vector<std::uint64_t> cmd_delivered_last_;
  std::vector<std::uint64_t> cmd_dropped_last_;

  // cumulative ledgers
  std::vector<std::int64_t> received_per_dc_;
  std::int64_t total_generated_ = 0;
  std::int64_t total_delivered_ = 0;
  std::int64_t total_dropped_ = 0;
  std::int64_t live_packets_ = 0;
  std::int64_t pending_arrivals_ = 0;
  std::int64_t in_tx_ = 0;
  std::uint64_t next_packet_id_ = 1;
  std::set<std::uint64_t> pending_cmds_;
  std::set<std::uint64_t> canceled_cmds_;
};

}  // namespace cpres::net

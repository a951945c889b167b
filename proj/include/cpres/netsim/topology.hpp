#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpres/errors.hpp"
#include "cpres/hashing.hpp"

namespace cpres::net {

using nlohmann::json;

struct RouterSpec {
  std::string id;
  int queue_limit = 32;  // packets per outgoing direction
};

struct ChannelSpec {
  std::string a, b;
  double bandwidth_pps = 200.0;  // packets per second
  double delay_s = 0.001;        // propagation delay
};

struct DcSpec {
  std::string id;
  std::string router;  // attachment
  int zone = 1;
};

/// DoS threat description: per-episode one candidate is compromised and
/// drops transiting packets i.i.d. with drop_prob.
struct AttackSpec {
  std::vector<std::string> candidates;
  double drop_prob = 0.9;
};

struct CyberGoalSpec {
  int n_g = 5;  // packets required at the DA per DC
};

/// Packet-generation and interval parameters. The control interval is one
/// environment step; each DC emits packets_per_tick packets at every tick.
struct SimParams {
  double interval_s = 1.0;
  int ticks_per_step = 10;
  int packets_per_tick = 1;
  int ttl_hop_factor = 2;  // TTL = factor * |routers| hops
};

/// Action layouts from the two MultiDiscrete models: select one router and
/// one of its interfaces per step, or re-route every controllable router
/// each step.
enum class ActionModel { kRouterInterface, kPerRouter };

inline std::string to_string(ActionModel m) {
  return m == ActionModel::kRouterInterface ? "router_interface" : "per_router";
}

struct TopologySpec {
  std::string name;  // preset name or file stem
  std::vector<RouterSpec> routers;
  std::vector<ChannelSpec> channels;
  std::vector<DcSpec> dcs;
  std::string da_router;
  std::vector<std::string> controllable;  // ordered, size N_r
  std::map<std::string, std::vector<std::string>> interfaces;  // ordered next hops
  std::map<std::string, int> initial_interface;  // default 0
  AttackSpec attack;
  ActionModel action_model = ActionModel::kPerRouter;
  SimParams sim;

  int router_index(const std::string& id) const {
    for (std::size_t i = 0; i < routers.size(); ++i)
      if (routers[i].id == id) return static_cast<int>(i);
    return -1;
  }

  bool has_channel(const std::string& u, const std::string& v) const {
    for (const auto& c : channels)
      if ((c.a == u && c.b == v) || (c.a == v && c.b == u)) return true;
    return false;
  }

  std::vector<std::string> neighbors(const std::string& u) const {
    std::vector<std::string> out;
    for (const auto& c : channels) {
      if (c.a == u) out.push_back(c.b);
      if (c.b == u) out.push_back(c.a);
    }
    return out;
  }

  int n_interfaces() const {
    int n = 0;
    for (const auto& [r, ifs] : interfaces) n = std::max<int>(n, ifs.size());
    return n;
  }

  /// True when every router in `avoid` can be bypassed: the graph minus
  /// `avoid` still connects `from` to `to`.
  bool reachable_avoiding(const std::string& from, const std::string& to,
                          const std::set<std::string>& avoid) const {
    if (avoid.count(from) || avoid.count(to)) return false;
    std::set<std::string> seen{from};
    std::vector<std::string> frontier{from};
    while (!frontier.empty()) {
      std::string u = frontier.back();
      frontier.pop_back();
      if (u == to) return true;
      for (const auto& v : neighbors(u)) {
        if (avoid.count(v) || seen.count(v)) continue;
        seen.insert(v);
        frontier.push_back(v);
      }
    }
    return false;
  }

  void validate() const {
    if (routers.empty()) throw SchemaError("topology: no routers");
    std::set<std::string> ids;
    for (const auto& r : routers) {
      if (!ids.insert(r.id).second)
        throw SchemaError("topology: duplicate router " + r.id);
      if (r.queue_limit < 1)
        throw SchemaError("topology: queue_limit must be >= 1 at " + r.id);
    }
    for (const auto& c : channels) {
      if (!ids.count(c.a) || !ids.count(c.b))
        throw SchemaError("topology: channel endpoint unknown: " + c.a + "-" + c.b);
      if (c.a == c.b) throw SchemaError("topology: self-loop channel at " + c.a);
      if (c.bandwidth_pps <= 0 || c.delay_s < 0)
        throw SchemaError("topology: bad channel parameters " + c.a + "-" + c.b);
    }
    if (!ids.count(da_router)) throw SchemaError("topology: unknown DA router");
    if (dcs.empty()) throw SchemaError("topology: no DCs");
    for (const auto& dc : dcs)
      if (!ids.count(dc.router))
        throw SchemaError("topology: DC attached to unknown router " + dc.router);
    if (controllable.empty()) throw SchemaError("topology: no controllable routers");
    for (const auto& r : controllable) {
      if (!ids.count(r)) throw SchemaError("topology: unknown controllable " + r);
      auto it = interfaces.find(r);
      if (it == interfaces.end() || it->second.empty())
        throw BadInterfaceList("topology: missing interface list for " + r);
    }
    const int n_inf = n_interfaces();
    for (const auto& [r, ifs] : interfaces) {
      if (static_cast<int>(ifs.size()) != n_inf)
        throw BadInterfaceList("topology: interface lists must share size; " + r);
      std::set<std::string> seen;
      for (const auto& h : ifs) {
        if (h == r) throw BadInterfaceList("topology: self next-hop at " + r);
        if (!has_channel(r, h))
          throw BadInterfaceList("topology: " + r + " -> " + h + " has no channel");
        if (!seen.insert(h).second)
          throw BadInterfaceList("topology: duplicate interface at " + r);
      }
      auto ii = initial_interface.find(r);
      if (ii != initial_interface.end() &&
          (ii->second < 0 || ii->second >= n_inf))
        throw SchemaError("topology: initial_interface out of range at " + r);
    }
    // Connectivity, and a bypass for every single-candidate compromise.
    for (const auto& r : routers)
      if (!reachable_avoiding(r.id, da_router, {}) && r.id != da_router)
        throw Disconnected("topology: router " + r.id + " cannot reach the DA");
    for (const auto& cand : attack.candidates) {
      if (!ids.count(cand))
        throw SchemaError("topology: unknown attack candidate " + cand);
      for (const auto& dc : dcs) {
        if (dc.router == cand) continue;
        if (!reachable_avoiding(dc.router, da_router, {cand}))
          throw Disconnected("topology: DC " + dc.id +
                             " has no DA path avoiding " + cand);
      }
    }
    if (attack.drop_prob < 0.0 || attack.drop_prob > 1.0)
      throw SchemaError("topology: drop_prob must be in [0,1]");
    if (sim.interval_s <= 0 || sim.ticks_per_step < 1 || sim.packets_per_tick < 0)
      throw SchemaError("topology: bad sim parameters");
  }
};

inline void to_json(json& j, const TopologySpec& t) {
  j = json{{"version", 1},
           {"name", t.name},
           {"routers", json::array()},
           {"channels", json::array()},
           {"dcs", json::array()},
           {"da", t.da_router},
           {"controllable", t.controllable},
           {"interfaces", t.interfaces},
           {"initial_interface", t.initial_interface},
           {"attack", {{"candidates", t.attack.candidates},
                       {"drop_prob", t.attack.drop_prob}}},
           {"action_model", to_string(t.action_model)},
           {"sim", {{"interval_s", t.sim.interval_s},
                    {"ticks_per_step", t.sim.ticks_per_step},
                    {"packets_per_tick", t.sim.packets_per_tick},
                    {"ttl_hop_factor", t.sim.ttl_hop_factor}}}};
  for (const auto& r : t.routers)
    j["routers"].push_back({{"id", r.id}, {"queue_limit", r.queue_limit}});
  for (const auto& c : t.channels)
    j["channels"].push_back({{"a", c.a}, {"b", c.b},
                             {"bandwidth_pps", c.bandwidth_pps},
                             {"delay_s", c.delay_s}});
  for (const auto& d : t.dcs)
    j["dcs"].push_back({{"id", d.id}, {"router", d.router}, {"zone", d.zone}});
}

inline void from_json(const json& j, TopologySpec& t) {
  if (!j.contains("routers") || !j.contains("channels") || !j.contains("da"))
    throw SchemaError("topology file: missing required fields");
  t.name = j.value("name", "");
  t.routers.clear();
  for (const auto& r : j.at("routers"))
    t.routers.push_back({r.at("id").get<std::string>(), r.value("queue_limit", 32)});
  t.channels.clear();
  for (const auto& c : j.at("channels"))
    t.channels.push_back({c.at("a").get<std::string>(), c.at("b").get<std::string>(),
                          c.value("bandwidth_pps", 200.0), c.value("delay_s", 0.001)});
  t.dcs.clear();
  for (const auto& d : j.at("dcs"))
    t.dcs.push_back({d.at("id").get<std::string>(), d.at("router").get<std::string>(),
                     d.value("zone", 1)});
  t.da_router = j.at("da").get<std::string>();
  t.controllable = j.value("controllable", std::vector<std::string>{});
  t.interfaces =
      j.value("interfaces", std::map<std::string, std::vector<std::string>>{});
  t.initial_interface = j.value("initial_interface", std::map<std::string, int>{});
  if (j.contains("attack")) {
    t.attack.candidates =
        j["attack"].value("candidates", std::vector<std::string>{});
    t.attack.drop_prob = j["attack"].value("drop_prob", 0.9);
  }
  const std::string m = j.value("action_model", "per_router");
  if (m == "router_interface") t.action_model = ActionModel::kRouterInterface;
  else if (m == "per_router") t.action_model = ActionModel::kPerRouter;
  else throw SchemaError("topology file: unknown action_model " + m);
  if (j.contains("sim")) {
    const auto& s = j["sim"];
    t.sim.interval_s = s.value("interval_s", 1.0);
    t.sim.ticks_per_step = s.value("ticks_per_step", 10);
    t.sim.packets_per_tick = s.value("packets_per_tick", 1);
    t.sim.ttl_hop_factor = s.value("ttl_hop_factor", 2);
  }
}

/// Six routers, all controllable, MultiDiscrete {6,3}: pick one router and
/// one of its three candidate next hops per step. Prism graph plus an
/// R3-R4 chord; default routes push DC1 through R3 and R4 and DC2 through
/// R5, so each attack candidate sits on a default path.
inline TopologySpec preset_n6() {
  TopologySpec t;
  t.name = "n6";
  for (int i = 1; i <= 6; ++i) t.routers.push_back({"R" + std::to_string(i), 32});
  auto ch = [&](const std::string& a, const std::string& b) {
    t.channels.push_back({a, b, 200.0, 0.001});
  };
  ch("R1", "R2"); ch("R1", "R3"); ch("R2", "R3");
  ch("R4", "R5"); ch("R4", "R6"); ch("R5", "R6");
  ch("R1", "R4"); ch("R2", "R5"); ch("R3", "R6"); ch("R3", "R4");
  t.dcs = {{"DC1", "R1", 1}, {"DC2", "R2", 2}};
  t.da_router = "R6";
  t.controllable = {"R1", "R2", "R3", "R4", "R5", "R6"};
  t.interfaces = {{"R1", {"R3", "R4", "R2"}}, {"R2", {"R5", "R3", "R1"}},
                  {"R3", {"R4", "R6", "R1"}}, {"R4", {"R6", "R5", "R3"}},
                  {"R5", {"R6", "R4", "R2"}}, {"R6", {"R5", "R4", "R3"}}};
  t.attack = {{"R3", "R4", "R5"}, 0.9};
  t.action_model = ActionModel::kRouterInterface;
  return t;
}

/// Eight routers, controllable {R1,R2,R3}, MultiDiscrete {3,3,3}: every
/// controllable router re-selects its next hop each step. Interface
/// ordering for R1 and R2 follows the encoded-action table (R1: R4,R6,R3;
/// R2: R3,R7,R5). Default routes run DC1 through R3 and DC2 through R5.
inline TopologySpec preset_n8() {
  TopologySpec t;
  t.name = "n8";
  for (int i = 1; i <= 8; ++i) t.routers.push_back({"R" + std::to_string(i), 32});
  auto ch = [&](const std::string& a, const std::string& b) {
    t.channels.push_back({a, b, 200.0, 0.001});
  };
  ch("R1", "R4"); ch("R1", "R6"); ch("R1", "R3");
  ch("R2", "R3"); ch("R2", "R7"); ch("R2", "R5");
  ch("R3", "R8"); ch("R4", "R8"); ch("R5", "R8"); ch("R6", "R8"); ch("R7", "R8");
  t.dcs = {{"DC1", "R1", 1}, {"DC2", "R2", 2}};
  t.da_router = "R8";
  t.controllable = {"R1", "R2", "R3"};
  t.interfaces = {{"R1", {"R4", "R6", "R3"}},
                  {"R2", {"R3", "R7", "R5"}},
                  {"R3", {"R8", "R1", "R2"}}};
  t.initial_interface = {{"R1", 2}, {"R2", 2}, {"R3", 0}};
  t.attack = {{"R3", "R4", "R5"}, 0.9};
  t.action_model = ActionModel::kPerRouter;
  return t;
}

/// Loads a topology by preset name ("n6", "n8", case-insensitive) or from a
/// JSON file path. Validates invariants before returning.
inline TopologySpec load_topology(const std::string& name_or_path) {
  std::string lower = name_or_path;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  TopologySpec t;
  if (lower == "n6") {
    t = preset_n6();
  } else if (lower == "n8") {
    t = preset_n8();
  } else {
    std::ifstream in(name_or_path);
    if (!in) throw SchemaError("topology: cannot open " + name_or_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw SchemaError("topology: parse error in " + name_or_path + ": " + e.what());
    }
    t = j.get<TopologySpec>();
    if (t.name.empty()) t.name = name_or_path;
  }
  t.validate();
  return t;
}

inline std::uint64_t topology_hash(const TopologySpec& t) {
  json j = t;
  return fnv1a(j.dump());
}

}  // namespace cpres::net

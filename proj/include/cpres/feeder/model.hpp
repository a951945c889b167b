#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpres/errors.hpp"
#include "cpres/hashing.hpp"

namespace cpres::feeder {

using nlohmann::json;

struct BusSpec {
  std::string id;
  double base_kv = 4.16;
};

struct LineSpec {
  std::string id;
  std::string from, to;
  double r_ohm = 0.1;
  double x_ohm = 0.08;
  bool switchable = false;
};

struct SwitchSpec {
  std::string line;   // line carrying this switch
  bool closed = false;
  bool main = false;  // substation-adjacent switch, excluded from actions
  int zone = 1;       // owning zone for command routing
};

struct LoadSpec {
  double kw = 0.0;
  double kvar = 0.0;
};

/// Radial feeder description. With every non-switch line in service and
/// switches at their default states the energized subgraph must be a tree
/// containing the source bus.
struct FeederModel {
  std::string name;
  std::vector<BusSpec> buses;
  std::vector<LineSpec> lines;
  std::vector<SwitchSpec> switches;
  std::map<std::string, LoadSpec> loads;
  std::vector<std::string> critical;
  double v_min = 0.95, v_max = 1.05;
  std::string source;
  double s_base_mva = 1.0;
  std::map<std::string, int> zones;  // bus -> zone

  int bus_index(const std::string& id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
      if (buses[i].id == id) return static_cast<int>(i);
    return -1;
  }

  int line_index(const std::string& id) const {
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (lines[i].id == id) return static_cast<int>(i);
    return -1;
  }

  int switch_on_line(const std::string& line_id) const {
    for (std::size_t i = 0; i < switches.size(); ++i)
      if (switches[i].line == line_id) return static_cast<int>(i);
    return -1;
  }

  /// Switch indices the agent may toggle (main switch excluded).
  std::vector<int> actionable_switches() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < switches.size(); ++i)
      if (!switches[i].main) out.push_back(static_cast<int>(i));
    return out;
  }

  /// In-service line mask for given switch states and outages.
  std::vector<bool> in_service(const std::vector<bool>& switch_closed,
                               const std::set<std::string>& outaged) const {
    std::vector<bool> svc(lines.size(), true);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (outaged.count(lines[i].id)) {
        svc[i] = false;
        continue;
      }
      const int sw = switch_on_line(lines[i].id);
      if (sw >= 0) svc[i] = switch_closed[sw];
    }
    return svc;
  }

  std::vector<bool> default_switch_states() const {
    std::vector<bool> s(switches.size());
    for (std::size_t i = 0; i < switches.size(); ++i) s[i] = switches[i].closed;
    return s;
  }

  void validate() const;
};

/// Bus components under an in-service mask, with per-island edge counts.
struct IslandReport {
  std::vector<int> island_of;             // per bus
  std::vector<std::vector<int>> islands;  // bus indices per island
  std::vector<int> island_edges;          // in-service line count per island
  int source_island = -1;

  bool island_radial(int k) const {
    return island_edges[k] == static_cast<int>(islands[k].size()) - 1;
  }
};

inline IslandReport analyze_islands(const FeederModel& m,
                                    const std::vector<bool>& svc) {
  IslandReport rep;
  rep.island_of.assign(m.buses.size(), -1);
  std::vector<std::vector<std::pair<int, int>>> adj(m.buses.size());
  for (std::size_t l = 0; l < m.lines.size(); ++l) {
    if (!svc[l]) continue;
    const int a = m.bus_index(m.lines[l].from);
    const int b = m.bus_index(m.lines[l].to);
    adj[a].push_back({b, static_cast<int>(l)});
    adj[b].push_back({a, static_cast<int>(l)});
  }
  for (std::size_t start = 0; start < m.buses.size(); ++start) {
    if (rep.island_of[start] >= 0) continue;
    const int k = static_cast<int>(rep.islands.size());
    rep.islands.emplace_back();
    rep.island_edges.push_back(0);
    std::vector<int> frontier{static_cast<int>(start)};
    rep.island_of[start] = k;
    std::set<int> seen_edges;
    while (!frontier.empty()) {
      const int u = frontier.back();
      frontier.pop_back();
      rep.islands[k].push_back(u);
      for (auto [v, l] : adj[u]) {
        if (seen_edges.insert(l).second) ++rep.island_edges[k];
        if (rep.island_of[v] < 0) {
          rep.island_of[v] = k;
          frontier.push_back(v);
        }
      }
    }
  }
  rep.source_island = rep.island_of[m.bus_index(m.source)];
  return rep;
}

/// True when every energized island (the one holding the source) is a tree.
/// De-energized islands may hold cycles; they carry no power.
inline bool energized_islands_radial(const FeederModel& m,
                                     const std::vector<bool>& svc) {
  const auto rep = analyze_islands(m, svc);
  return rep.island_radial(rep.source_island);
}

inline void FeederModel::validate() const {
  if (buses.empty()) throw SchemaError("feeder: no buses");
  std::set<std::string> bus_ids;
  for (const auto& b : buses) {
    if (!bus_ids.insert(b.id).second)
      throw SchemaError("feeder: duplicate bus " + b.id);
    if (b.base_kv <= 0) throw SchemaError("feeder: bad base_kv at " + b.id);
  }
  std::set<std::string> line_ids;
  for (const auto& l : lines) {
    if (!line_ids.insert(l.id).second)
      throw SchemaError("feeder: duplicate line " + l.id);
    if (!bus_ids.count(l.from) || !bus_ids.count(l.to))
      throw SchemaError("feeder: line " + l.id + " references unknown bus");
    if (l.from == l.to) throw SchemaError("feeder: self-loop line " + l.id);
    if (l.r_ohm < 0 || l.x_ohm < 0)
      throw SchemaError("feeder: negative impedance on " + l.id);
  }
  if (switches.empty()) throw SchemaError("feeder: at least one switch required");
  std::set<std::string> sw_lines;
  for (const auto& s : switches) {
    if (line_index(s.line) < 0)
      throw SchemaError("feeder: switch on unknown line " + s.line);
    if (!sw_lines.insert(s.line).second)
      throw SchemaError("feeder: duplicate switch on line " + s.line);
    if (!lines[line_index(s.line)].switchable)
      throw SchemaError("feeder: switch on non-switchable line " + s.line);
  }
  for (const auto& l : lines)
    if (l.switchable && switch_on_line(l.id) < 0)
      throw SchemaError("feeder: switchable line " + l.id + " has no switch");
  for (const auto& [bus, ld] : loads) {
    if (!bus_ids.count(bus)) throw SchemaError("feeder: load on unknown bus " + bus);
    if (ld.kw < 0) throw SchemaError("feeder: negative load at " + bus);
  }
  if (critical.empty()) throw SchemaError("feeder: no critical buses");
  for (const auto& c : critical)
    if (!bus_ids.count(c)) throw SchemaError("feeder: unknown critical bus " + c);
  if (!bus_ids.count(source)) throw SchemaError("feeder: unknown source bus");
  if (!(v_min > 0 && v_min < v_max && v_max < 2.0))
    throw SchemaError("feeder: bad voltage bounds");
  if (s_base_mva <= 0) throw SchemaError("feeder: bad s_base_mva");
  // Base topology: defaults must energize a radial source island.
  const auto svc = in_service(default_switch_states(), {});
  const auto rep = analyze_islands(*this, svc);
  if (!rep.island_radial(rep.source_island))
    throw NonRadialBase("feeder: base topology is not radial");
}

inline void to_json(json& j, const FeederModel& m) {
  j = json{{"version", 1},
           {"name", m.name},
           {"buses", json::array()},
           {"lines", json::array()},
           {"switches", json::array()},
           {"loads", json::object()},
           {"critical", m.critical},
           {"v_bounds", {m.v_min, m.v_max}},
           {"source", m.source},
           {"s_base_mva", m.s_base_mva},
           {"zones", m.zones}};
  for (const auto& b : m.buses)
    j["buses"].push_back({{"id", b.id}, {"base_kv", b.base_kv}});
  for (const auto& l : m.lines)
    j["lines"].push_back({{"id", l.id}, {"from", l.from}, {"to", l.to},
                          {"r_ohm", l.r_ohm}, {"x_ohm", l.x_ohm},
                          {"switchable", l.switchable}});
  for (const auto& s : m.switches)
    j["switches"].push_back({{"line", s.line}, {"closed", s.closed},
                             {"main", s.main}, {"zone", s.zone}});
  for (const auto& [bus, ld] : m.loads)
    j["loads"][bus] = {{"kw", ld.kw}, {"kvar", ld.kvar}};
}

inline void from_json(const json& j, FeederModel& m) {
  if (!j.contains("buses") || !j.contains("lines") || !j.contains("source"))
    throw SchemaError("feeder file: missing required fields");
  m.name = j.value("name", "");
  m.buses.clear();
  for (const auto& b : j.at("buses"))
    m.buses.push_back({b.at("id").get<std::string>(), b.value("base_kv", 4.16)});
  m.lines.clear();
  for (const auto& l : j.at("lines"))
    m.lines.push_back({l.at("id").get<std::string>(),
                       l.at("from").get<std::string>(),
                       l.at("to").get<std::string>(), l.value("r_ohm", 0.1),
                       l.value("x_ohm", 0.08), l.value("switchable", false)});
  m.switches.clear();
  if (j.contains("switches"))
    for (const auto& s : j["switches"])
      m.switches.push_back({s.at("line").get<std::string>(),
                            s.value("closed", false), s.value("main", false),
                            s.value("zone", 1)});
  m.loads.clear();
  if (j.contains("loads")) {
    for (auto it = j["loads"].begin(); it != j["loads"].end(); ++it)
      m.loads[it.key()] = {it.value().value("kw", 0.0),
                           it.value().value("kvar", 0.0)};
  }
  m.critical = j.value("critical", std::vector<std::string>{});
  if (j.contains("v_bounds")) {
    m.v_min = j["v_bounds"][0].get<double>();
    m.v_max = j["v_bounds"][1].get<double>();
  }
  m.source = j.at("source").get<std::string>();
  m.s_base_mva = j.value("s_base_mva", 1.0);
  m.zones = j.value("zones", std::map<std::string, int>{});
}

/// Synthetic 13-bus radial feeder: two laterals off bus B1, three critical
/// buses (B4, B6, B9), three normally-open tie switches and a normally
/// closed sectionalizing switch on the B7-B8 span. Every N-1 outage of a
/// non-switch line leaves some switch state with all criticals in bounds.
inline FeederModel preset_f13() {
  FeederModel m;
  m.name = "f13";
  for (int i = 1; i <= 13; ++i) m.buses.push_back({"B" + std::to_string(i), 4.16});
  auto line = [&](const std::string& id, const std::string& a,
                  const std::string& b, double r, double x, bool sw = false) {
    m.lines.push_back({id, a, b, r, x, sw});
  };
  line("L1", "B1", "B2", 0.20, 0.14);
  line("L2", "B2", "B3", 0.12, 0.08);
  line("L3", "B3", "B4", 0.12, 0.08);
  line("L4", "B2", "B5", 0.12, 0.08);
  line("L5", "B5", "B6", 0.12, 0.08);
  line("L6", "B1", "B7", 0.20, 0.14);
  line("L7", "B7", "B8", 0.12, 0.08, true);   // SW4, normally closed
  line("L8", "B8", "B9", 0.12, 0.08);
  line("L9", "B5", "B10", 0.10, 0.07);
  line("L10", "B7", "B11", 0.10, 0.07);
  line("L11", "B3", "B12", 0.10, 0.07);
  line("L12", "B8", "B13", 0.10, 0.07);
  line("T1", "B11", "B4", 0.14, 0.10, true);  // SW1, tie
  line("T2", "B13", "B6", 0.14, 0.10, true);  // SW2, tie
  line("T3", "B6", "B9", 0.14, 0.10, true);   // SW3, tie
  m.switches = {{"T1", false, false, 2},
                {"T2", false, false, 2},
                {"T3", false, false, 1},
                {"L7", true, false, 2}};
  auto load = [&](const std::string& bus, double kw, double kvar) {
    m.loads[bus] = {kw, kvar};
  };
  load("B2", 80, 26); load("B3", 65, 22); load("B4", 105, 36);
  load("B5", 72, 25); load("B6", 98, 33); load("B7", 68, 23);
  load("B8", 62, 21); load("B9", 100, 34); load("B10", 45, 15);
  load("B11", 42, 14); load("B12", 36, 12); load("B13", 33, 11);
  m.critical = {"B4", "B6", "B9"};
  m.source = "B1";
  m.zones = {{"B1", 1}, {"B2", 1}, {"B3", 1}, {"B4", 1}, {"B5", 1},
             {"B6", 1}, {"B10", 1}, {"B12", 1}, {"B7", 2}, {"B8", 2},
             {"B9", 2}, {"B11", 2}, {"B13", 2}};
  return m;
}

/// 123-bus-shaped feeder: two zone trunks joined at the substation through
/// a main switch, laterals along both trunks, four closed sectionalizers
/// and four open ties (eight controllable switches), six critical buses.
/// Shape only; impedances and loads are synthetic.
inline FeederModel preset_f123() {
  FeederModel m;
  m.name = "f123";
  auto bus = [&](int i) { return "B" + std::to_string(i); };
  for (int i = 1; i <= 123; ++i) m.buses.push_back({bus(i), 4.16});
  int line_no = 0;
  auto line = [&](int a, int b, double r, double x, bool sw = false) {
    ++line_no;
    m.lines.push_back(
        {"L" + std::to_string(line_no), bus(a), bus(b), r, x, sw});
    return "L" + std::to_string(line_no);
  };
  std::vector<std::string> sectionalizers;
  // Zone 1 trunk B1..B30; spans B10-B11 and B20-B21 carry sectionalizers.
  for (int i = 1; i < 30; ++i) {
    const bool sw = (i == 10 || i == 20);
    const auto id = line(i, i + 1, 0.08, 0.05, sw);
    if (sw) sectionalizers.push_back(id);
  }
  // Zone 1 laterals B31..B60 hang off trunk buses 2..29.
  for (int k = 0; k < 30; ++k) line(2 + k % 28, 31 + k, 0.06, 0.04);
  // Substation tie to zone 2 (main switch, closed, not controllable).
  const std::string main_line = line(1, 61, 0.10, 0.07, true);
  // Zone 2 trunk B61..B90; spans B70-B71 and B80-B81 carry sectionalizers.
  for (int i = 61; i < 90; ++i) {
    const bool sw = (i == 70 || i == 80);
    const auto id = line(i, i + 1, 0.08, 0.05, sw);
    if (sw) sectionalizers.push_back(id);
  }
  // Zone 2 laterals B91..B123 hang off trunk buses 62..89.
  for (int k = 0; k < 33; ++k) line(62 + k % 28, 91 + k, 0.06, 0.04);
  // Normally-open ties bridging the trunks and laterals.
  const std::string t1 = line(30, 90, 0.12, 0.08, true);
  const std::string t2 = line(15, 75, 0.12, 0.08, true);
  const std::string t3 = line(50, 110, 0.12, 0.08, true);
  const std::string t4 = line(60, 123, 0.12, 0.08, true);
  m.switches = {{main_line, true, true, 1},
                {sectionalizers[0], true, false, 1},
                {sectionalizers[1], true, false, 1},
                {sectionalizers[2], true, false, 2},
                {sectionalizers[3], true, false, 2},
                {t1, false, false, 1},
                {t2, false, false, 1},
                {t3, false, false, 2},
                {t4, false, false, 2}};
  for (int i = 2; i <= 123; ++i)
    if (i % 3 != 0)
      m.loads[bus(i)] = {12.0 + (i * 7) % 20, 4.0 + (i * 5) % 8};
  m.critical = {"B15", "B25", "B45", "B75", "B85", "B105"};
  m.source = "B1";
  for (int i = 1; i <= 60; ++i) m.zones[bus(i)] = 1;
  for (int i = 61; i <= 123; ++i) m.zones[bus(i)] = 2;
  return m;
}

inline FeederModel load_feeder(const std::string& name_or_path) {
  std::string lower = name_or_path;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  FeederModel m;
  if (lower == "f13") {
    m = preset_f13();
  } else if (lower == "f123") {
    m = preset_f123();
  } else {
    std::ifstream in(name_or_path);
    if (!in) throw SchemaError("feeder: cannot open " + name_or_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw SchemaError("feeder: parse error in " + name_or_path + ": " +
                        e.what());
    }
    m = j.get<FeederModel>();
    if (m.name.empty()) m.name = name_or_path;
  }
  m.validate();
  return m;
}

inline std::uint64_t feeder_hash(const FeederModel& m) {
  json j = m;
  return fnv1a(j.dump());
}

}  // namespace cpres::feeder

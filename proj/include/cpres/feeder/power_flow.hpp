#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cpres/errors.hpp"
#include "cpres/feeder/model.hpp"

namespace cpres::feeder {

struct PfResult {
  std::vector<double> v_pu;      // per bus; 0.0 when de-energized
  std::vector<bool> energized;   // per bus
  std::vector<double> line_p;    // per line, pu flow toward the leaves
  std::vector<double> line_q;
};

/**
 * Linearized radial power flow (LinDistFlow). Branch flows are the sums of
 * downstream bus loads (losses neglected) and squared voltage magnitudes
 * drop down the tree:
 *
 *   V_child^2 = V_parent^2 - 2 (r_pu * P_branch + x_pu * Q_branch)
 *
 * with r_pu = r_ohm / Z_base, Z_base = base_kV^2 / S_base. The source bus
 * holds 1.0 pu. Islands that do not contain the source are de-energized and
 * report 0 pu. Throws NonRadialIsland when the energized island is not a
 * tree (callers enforce radiality before solving).
 */
inline PfResult solve_power_flow(const FeederModel& m,
                                 const std::vector<bool>& svc,
                                 const std::map<std::string, double>& scaling = {}) {
  const std::size_t nb = m.buses.size();
  PfResult out;
  out.v_pu.assign(nb, 0.0);
  out.energized.assign(nb, false);
  out.line_p.assign(m.lines.size(), 0.0);
  out.line_q.assign(m.lines.size(), 0.0);

  const auto rep = analyze_islands(m, svc);
  if (!rep.island_radial(rep.source_island))
    throw NonRadialIsland("power flow: energized island contains a cycle");

  std::vector<std::vector<std::pair<int, int>>> adj(nb);
  for (std::size_t l = 0; l < m.lines.size(); ++l) {
    if (!svc[l]) continue;
    const int a = m.bus_index(m.lines[l].from);
    const int b = m.bus_index(m.lines[l].to);
    adj[a].push_back({b, static_cast<int>(l)});
    adj[b].push_back({a, static_cast<int>(l)});
  }

  // BFS order rooted at the source over its island.
  const int src = m.bus_index(m.source);
  std::vector<int> order, parent(nb, -1), parent_line(nb, -1);
  std::vector<bool> seen(nb, false);
  seen[src] = true;
  order.push_back(src);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int u = order[i];
    for (auto [v, l] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      parent[v] = u;
      parent_line[v] = l;
      order.push_back(v);
    }
  }

  // Subtree load sums in pu, leaves toward the root.
  std::vector<double> p_sub(nb, 0.0), q_sub(nb, 0.0);
  for (std::size_t i = order.size(); i-- > 0;) {
    const int u = order[i];
    auto it = m.loads.find(m.buses[u].id);
    if (it != m.loads.end()) {
      double scale = 1.0;
      auto sit = scaling.find(m.buses[u].id);
      if (sit != scaling.end()) scale = sit->second;
      p_sub[u] += it->second.kw * scale / (1000.0 * m.s_base_mva);
      q_sub[u] += it->second.kvar * scale / (1000.0 * m.s_base_mva);
    }
    if (parent[u] >= 0) {
      p_sub[parent[u]] += p_sub[u];
      q_sub[parent[u]] += q_sub[u];
      out.line_p[parent_line[u]] = p_sub[u];
      out.line_q[parent_line[u]] = q_sub[u];
    }
  }

  // Squared-voltage propagation from the source.
  std::vector<double> v2(nb, 0.0);
  v2[src] = 1.0;
  out.energized[src] = true;
  out.v_pu[src] = 1.0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const int u = order[i];
    const int l = parent_line[u];
    const auto& ln = m.lines[l];
    const double z_base =
        m.buses[u].base_kv * m.buses[u].base_kv / m.s_base_mva;
    const double r_pu = ln.r_ohm / z_base;
    const double x_pu = ln.x_ohm / z_base;
    v2[u] = v2[parent[u]] - 2.0 * (r_pu * p_sub[u] + x_pu * q_sub[u]);
    out.energized[u] = true;
    out.v_pu[u] = std::sqrt(std::max(0.0, v2[u]));
  }
  return out;
}

/// Number of critical buses outside the closed interval [v_min, v_max];
/// de-energized criticals (0 pu) count as unrestored.
inline int count_unrestored(const FeederModel& m, const PfResult& pf) {
  int n = 0;
  for (const auto& c : m.critical) {
    const int b = m.bus_index(c);
    if (!pf.energized[b] || pf.v_pu[b] < m.v_min || pf.v_pu[b] > m.v_max) ++n;
  }
  return n;
}

inline int count_unrestored(const std::vector<double>& critical_v,
                            double v_min, double v_max) {
  int n = 0;
  for (double v : critical_v)
    if (v <= 0.0 || v < v_min || v > v_max) ++n;
  return n;
}

}  // namespace cpres::feeder

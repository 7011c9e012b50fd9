// Trace and solution artifacts: CSV trace rows for convergence plots and a
// structured solution dump including the per-node processing allocation.

#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsdp/augmented_graph.hpp"
#include "nsdp/qnsd.hpp"

namespace nsdp {

namespace detail {

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace detail

inline void emit_trace(const Trace& trace, std::ostream& out) {
  out << "iteration,frame,cost_avg,max_violation\n";
  for (const auto& p : trace)
    out << p.iteration << ',' << p.frame << ',' << detail::fmt9(p.cost_avg) << ','
        << detail::fmt9(p.max_violation) << '\n';
}

inline void emit_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write trace file: " + path);
  emit_trace(trace, out);
}

struct ProcessingAllocation {
  NodeId node = 0;
  ServiceId service = 0;
  int function = 0;        // 1-based position in the chain
  double resource_units = 0.0;
};

// Cloud resource units each function occupies at each node under the given
// flow assignment: input flow of the function times its per-unit requirement.
inline std::vector<ProcessingAllocation> processing_allocation(const AugmentedGraph& g,
                                                               std::span<const double> flows) {
  const int K = g.K();
  std::vector<ProcessingAllocation> table;
  for (int u = 0; u < g.n(); ++u) {
    int e_in = g.compute_in_edge(u);
    std::map<std::pair<ServiceId, int>, double> units;
    for (int c = 0; c < K; ++c) {
      double r = g.req_raw(e_in, c);
      if (r == kUnprocessable) continue;
      double f = flows[static_cast<size_t>(e_in) * K + c];
      if (f <= 0) continue;
      const CommodityInfo& info = g.commodities[c];
      units[{info.id.service, info.id.stage + 1}] += f * r;
    }
    for (const auto& [key, value] : units)
      table.push_back({u + 1, key.first, key.second, value});
  }
  return table;
}

inline void emit_solution(const Solution& sol, const AugmentedGraph& g,
                          const std::string& algorithm, std::ostream& out) {
  using nlohmann::json;
  const int K = g.K();
  json j;
  j["algorithm"] = algorithm;
  j["iterations"] = sol.iterations_used;
  j["converged"] = sol.converged;
  j["cost"] = sol.cost;
  j["max_violation"] = sol.max_violation;

  j["avg_resources"] = json::array();
  for (int e = 0; e < g.num_edges(); ++e) {
    if (sol.avg_resources.empty() || sol.avg_resources[e] == 0.0) continue;
    j["avg_resources"].push_back({{"edge", g.edge_name(e)},
                                  {"kind", to_string(g.edges[e].kind)},
                                  {"y", sol.avg_resources[e]}});
  }
  j["avg_flows"] = json::array();
  for (int e = 0; e < g.num_edges() && !sol.avg_flows.empty(); ++e) {
    for (int c = 0; c < K; ++c) {
      double f = sol.avg_flows[static_cast<size_t>(e) * K + c];
      if (f == 0.0) continue;
      const CommodityId& id = g.commodities[c].id;
      j["avg_flows"].push_back({{"edge", g.edge_name(e)},
                                {"destination", id.destination},
                                {"service", id.service},
                                {"stage", id.stage},
                                {"flow", f}});
    }
  }
  const std::vector<double>& alloc_flows = sol.has_integer ? sol.final_flows : sol.avg_flows;
  j["processing_allocation"] = json::array();
  if (!alloc_flows.empty()) {
    for (const auto& row : processing_allocation(g, alloc_flows))
      j["processing_allocation"].push_back({{"node", row.node},
                                            {"service", row.service},
                                            {"function", row.function},
                                            {"resource_units", row.resource_units}});
  }
  if (sol.has_integer) {
    j["integer_cost"] = sol.integer_cost;
    j["integer_feasible"] = sol.integer_feasible;
    j["integer_resources"] = json::array();
    for (int e = 0; e < g.num_edges(); ++e) {
      if (sol.integer_resources[e] == 0) continue;
      j["integer_resources"].push_back({{"edge", g.edge_name(e)},
                                        {"kind", to_string(g.edges[e].kind)},
                                        {"y", sol.integer_resources[e]}});
    }
  }
  out << j.dump(2) << "\n";
}

inline void emit_solution(const Solution& sol, const AugmentedGraph& g,
                          const std::string& algorithm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write solution file: " + path);
  emit_solution(sol, g, algorithm, out);
}

}  // namespace nsdp

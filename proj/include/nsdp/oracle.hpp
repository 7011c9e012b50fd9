// Independent verification: constraint checking, cost evaluation, an exact
// LP solve of the fractional problem, and exhaustive integer search on tiny
// instances. Deliberately shares no code with the iterative solvers.

#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nsdp/augmented_graph.hpp"
#include "nsdp/simplex.hpp"

namespace nsdp {

struct FeasibilityReport {
  // Signed flow-conservation surplus (inflow minus outflow), worst entry.
  double max_conservation_violation = 0.0;
  double max_abs_conservation = 0.0;
  bool chaining_ok = true;
  bool capacity_ok = true;
  bool source_ok = true;
  bool sink_ok = true;
  std::string worst_conservation;
  std::string worst_chaining;
  std::string worst_capacity;
  std::string worst_source;
  std::string worst_sink;

  bool all_ok(double conservation_tol) const {
    return chaining_ok && capacity_ok && source_ok && sink_ok &&
           max_abs_conservation <= conservation_tol;
  }
};

inline double evaluate_cost(const AugmentedGraph& g, std::span<const double> resources) {
  double cost = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) cost += g.edges[e].unit_cost * resources[e];
  return cost;
}

inline FeasibilityReport check_solution(const AugmentedGraph& g, std::span<const double> flows,
                                        std::span<const double> resources, double tol = 1e-9) {
  const int K = g.K();
  FeasibilityReport rep;
  if (flows.size() != static_cast<size_t>(g.num_edges()) * K ||
      resources.size() != static_cast<size_t>(g.num_edges()))
    throw ValidationError("check_solution: solution dimensions do not match the graph");

  auto flow = [&](int e, int c) { return flows[static_cast<size_t>(e) * K + c]; };

  // Flow conservation on original nodes, gadget edges folded into delta+-.
  for (int u = 0; u < g.n(); ++u) {
    for (int c = 0; c < K; ++c) {
      double in = 0.0, out = 0.0;
      for (int e : g.in_edges[u]) in += flow(e, c);
      for (int e : g.out_edges[u]) out += flow(e, c);
      double surplus = in - out;
      if (surplus > rep.max_conservation_violation) {
        rep.max_conservation_violation = surplus;
        rep.worst_conservation = "node " + std::to_string(u + 1) + " commodity " +
                                 to_string(g.commodities[c].id);
      }
      if (std::abs(surplus) > rep.max_abs_conservation) rep.max_abs_conservation = std::abs(surplus);
    }
  }

  // Service chaining with flow scaling on every compute edge pair.
  for (int u = 0; u < g.n(); ++u) {
    int e_in = g.compute_in_edge(u);
    int e_out = g.compute_out_edge(u);
    for (int c = 0; c < K; ++c) {
      if (g.req_raw(e_in, c) == kUnprocessable) continue;
      int succ = g.commodities[c].successor;
      double expect = g.next_scaling(c) * flow(e_in, c);
      if (std::abs(flow(e_out, succ) - expect) > tol && rep.chaining_ok) {
        rep.chaining_ok = false;
        rep.worst_chaining = "node " + std::to_string(u + 1) + " commodity " +
                             to_string(g.commodities[c].id);
      }
    }
  }

  // Capacity coupling plus admissibility of every flow entry.
  for (int e = 0; e < g.num_edges(); ++e) {
    const AugEdge& ed = g.edges[e];
    double used = 0.0;
    for (int c = 0; c < K; ++c) {
      double r = g.req_raw(e, c);
      double f = flow(e, c);
      if (r == kUnprocessable) {
        if (std::abs(f) > tol) {
          switch (ed.kind) {
            case EdgeKind::Source:
              rep.source_ok = false;
              rep.worst_source = "inadmissible flow on " + g.edge_name(e) + " commodity " +
                                 to_string(g.commodities[c].id);
              break;
            case EdgeKind::Sink:
              rep.sink_ok = false;
              rep.worst_sink = "flow exits at " + g.edge_name(e) + " for commodity " +
                               to_string(g.commodities[c].id);
              break;
            default:
              rep.chaining_ok = false;
              rep.worst_chaining = "inadmissible flow on " + g.edge_name(e) + " commodity " +
                                   to_string(g.commodities[c].id);
          }
        }
        continue;
      }
      used += f * r;
    }
    if (used > resources[e] + tol || resources[e] > ed.capacity + tol) {
      if (rep.capacity_ok) {
        rep.capacity_ok = false;
        rep.worst_capacity = "edge " + g.edge_name(e);
      }
    }
  }

  // Source constraint: source-edge flow equals the declared injection.
  for (int u = 0; u < g.n(); ++u) {
    int e_src = g.source_edge(u);
    for (int c = 0; c < K; ++c) {
      if (g.req_raw(e_src, c) == kUnprocessable) continue;  // handled above
      if (std::abs(flow(e_src, c) - g.injection(u, c)) > tol && rep.source_ok) {
        rep.source_ok = false;
        rep.worst_source = "source injection mismatch at node " + std::to_string(u + 1) +
                           " commodity " + to_string(g.commodities[c].id);
      }
    }
  }

  return rep;
}

// ---------------------------------------------------------------------------
// LP formulation of the relaxed problem (y >= 0 real).

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double cost = 0.0;
  std::vector<double> flows;      // [edge * K + c]
  std::vector<double> resources;  // [edge]
};

namespace detail {

inline bool lp_costed_edge(const AugEdge& ed) {
  return ed.kind == EdgeKind::Network || ed.kind == EdgeKind::ComputeIn;
}

struct NsdpLp {
  LinearProgram lp;
  std::vector<int> flow_col;      // [edge * K + c] -> LP column or -1
  std::vector<int> y_col;         // [edge] -> LP column or -1
  std::vector<int> capacity_row;  // [edge] -> row index or -1
};

// Variables: one flow variable per admissible (edge, commodity) pair except
// source edges (their flows are the fixed injections), plus one resource
// variable per costed edge when `with_resources`. When a fixed resource
// vector is supplied instead, capacity rows take it as their right-hand side.
inline NsdpLp build_nsdp_lp(const AugmentedGraph& g, bool with_resources,
                            const std::vector<int>* fixed_y = nullptr,
                            const std::vector<int>* column_perm = nullptr) {
  const int K = g.K();
  const int E = g.num_edges();
  NsdpLp model;
  model.flow_col.assign(static_cast<size_t>(E) * K, -1);
  model.y_col.assign(E, -1);
  model.capacity_row.assign(E, -1);

  // Canonical variable list: flows edge-major, then resources.
  struct Var { bool is_flow; int e; int c; double cost; };
  std::vector<Var> vars;
  for (int e = 0; e < E; ++e) {
    if (g.edges[e].kind == EdgeKind::Source) continue;
    for (int c = 0; c < K; ++c)
      if (g.req_raw(e, c) != kUnprocessable) vars.push_back({true, e, c, 0.0});
  }
  if (with_resources) {
    for (int e = 0; e < E; ++e)
      if (lp_costed_edge(g.edges[e])) vars.push_back({false, e, -1, g.edges[e].unit_cost});
  }

  const int V = static_cast<int>(vars.size());
  std::vector<int> col_of(V);
  if (column_perm != nullptr) {
    for (int j = 0; j < V; ++j) col_of[(*column_perm)[j]] = j;
  } else {
    for (int j = 0; j < V; ++j) col_of[j] = j;
  }

  model.lp.num_vars = V;
  model.lp.objective.assign(V, 0.0);
  for (int v = 0; v < V; ++v) {
    model.lp.objective[col_of[v]] = vars[v].cost;
    if (vars[v].is_flow)
      model.flow_col[static_cast<size_t>(vars[v].e) * K + vars[v].c] = col_of[v];
    else
      model.y_col[vars[v].e] = col_of[v];
  }

  // Conservation at every original node, every commodity.
  for (int u = 0; u < g.n(); ++u) {
    for (int c = 0; c < K; ++c) {
      LinearProgram::Row row;
      row.sense = RowSense::EQ;
      row.rhs = -g.injection(u, c);
      for (int e : g.in_edges[u]) {
        int col = model.flow_col[static_cast<size_t>(e) * K + c];
        if (col >= 0) row.coeffs.push_back({col, 1.0});
      }
      for (int e : g.out_edges[u]) {
        int col = model.flow_col[static_cast<size_t>(e) * K + c];
        if (col >= 0) row.coeffs.push_back({col, -1.0});
      }
      if (row.coeffs.empty() && row.rhs == 0.0) continue;
      model.lp.add_row(std::move(row));
    }
  }

  // Chaining: the processed output equals the scaled input of the predecessor.
  for (int u = 0; u < g.n(); ++u) {
    int e_in = g.compute_in_edge(u);
    int e_out = g.compute_out_edge(u);
    for (int c = 0; c < K; ++c) {
      int col_in = model.flow_col[static_cast<size_t>(e_in) * K + c];
      if (col_in < 0) continue;
      int succ = g.commodities[c].successor;
      int col_out = model.flow_col[static_cast<size_t>(e_out) * K + succ];
      LinearProgram::Row row;
      row.sense = RowSense::EQ;
      row.rhs = 0.0;
      row.coeffs.push_back({col_out, 1.0});
      row.coeffs.push_back({col_in, -g.next_scaling(c)});
      model.lp.add_row(std::move(row));
    }
  }

  // Capacity coupling on costed edges, plus resource bounds.
  for (int e = 0; e < E; ++e) {
    if (!lp_costed_edge(g.edges[e])) continue;
    LinearProgram::Row row;
    row.sense = RowSense::LE;
    for (int c = 0; c < K; ++c) {
      double r = g.req_raw(e, c);
      int col = model.flow_col[static_cast<size_t>(e) * K + c];
      if (col >= 0 && r > 0) row.coeffs.push_back({col, r});
    }
    if (with_resources) {
      row.coeffs.push_back({model.y_col[e], -1.0});
      row.rhs = 0.0;
    } else {
      row.rhs = fixed_y != nullptr ? (*fixed_y)[e] : g.edges[e].capacity;
    }
    model.capacity_row[e] = static_cast<int>(model.lp.rows.size());
    model.lp.add_row(std::move(row));

    if (with_resources) {
      LinearProgram::Row bound;
      bound.sense = RowSense::LE;
      bound.rhs = g.edges[e].capacity;
      bound.coeffs.push_back({model.y_col[e], 1.0});
      model.lp.add_row(std::move(bound));
    }
  }

  return model;
}

inline void expand_lp_solution(const AugmentedGraph& g, const NsdpLp& model,
                               const std::vector<double>& x, LpSolution& out) {
  const int K = g.K();
  out.flows.assign(static_cast<size_t>(g.num_edges()) * K, 0.0);
  out.resources.assign(g.num_edges(), 0.0);
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int c = 0; c < K; ++c) {
      int col = model.flow_col[static_cast<size_t>(e) * K + c];
      if (col >= 0) out.flows[static_cast<size_t>(e) * K + c] = x[col];
    }
    if (model.y_col[e] >= 0) out.resources[e] = x[model.y_col[e]];
  }
  // Source-edge flows are the fixed injections.
  for (int u = 0; u < g.n(); ++u) {
    int e_src = g.source_edge(u);
    for (int c = 0; c < K; ++c)
      out.flows[static_cast<size_t>(e_src) * K + c] = g.injection(u, c);
  }
}

}  // namespace detail

// Exact optimum of the linear relaxation. `column_perm`, when given, permutes
// the internal variable order (the optimum must not depend on it).
inline LpSolution solve_fractional_lp(const AugmentedGraph& g,
                                      const std::vector<int>* column_perm = nullptr) {
  detail::NsdpLp model = detail::build_nsdp_lp(g, /*with_resources=*/true, nullptr, column_perm);
  SimplexResult res = solve_simplex(model.lp);
  LpSolution out;
  switch (res.status) {
    case SimplexStatus::Optimal: out.status = LpStatus::Optimal; break;
    case SimplexStatus::Infeasible: out.status = LpStatus::Infeasible; break;
    case SimplexStatus::Unbounded: out.status = LpStatus::Unbounded; break;
    case SimplexStatus::IterationLimit: out.status = LpStatus::IterationLimit; break;
  }
  if (out.status != LpStatus::Optimal) return out;
  out.cost = res.objective;
  detail::expand_lp_solution(g, model, res.x, out);
  return out;
}

// Number of LP variables the relaxation would use (for permutation tests).
inline int fractional_lp_num_vars(const AugmentedGraph& g) {
  return detail::build_nsdp_lp(g, true).lp.num_vars;
}

// ---------------------------------------------------------------------------
// Exhaustive integer search.

struct IlpSolution {
  enum class Status { Optimal, Infeasible, TooLarge };
  Status status = Status::Infeasible;
  double cost = 0.0;
  std::vector<int> resources;  // [edge], zero on free edges
};

// Enumerates integer resource vectors on the costed edges (optionally clamped
// to `cap_limit` per edge), checking flow feasibility of each candidate with
// the fixed-capacity LP. Exhaustive up to cost dominance: a partial assignment
// already costing at least the incumbent cannot improve on it.
inline IlpSolution solve_integer_bruteforce(const AugmentedGraph& g, int cap_limit = 0,
                                            double enumeration_bound = 2e7) {
  IlpSolution out;
  const int E = g.num_edges();

  std::vector<int> costed;
  for (int e = 0; e < E; ++e)
    if (detail::lp_costed_edge(g.edges[e])) costed.push_back(e);

  std::vector<int> hi(costed.size());
  double volume = 1.0;
  for (size_t k = 0; k < costed.size(); ++k) {
    int cap = static_cast<int>(std::llround(g.edges[costed[k]].capacity));
    hi[k] = cap_limit > 0 ? std::min(cap, cap_limit) : cap;
    volume *= hi[k] + 1;
    if (volume > enumeration_bound) {
      out.status = IlpSolution::Status::TooLarge;
      return out;
    }
  }

  // Cheap-first edge order prunes faster on cost.
  std::vector<size_t> order(costed.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    double wa = g.edges[costed[a]].unit_cost, wb = g.edges[costed[b]].unit_cost;
    if (wa != wb) return wa > wb;
    return a < b;
  });

  detail::NsdpLp feas = detail::build_nsdp_lp(g, /*with_resources=*/false);
  std::vector<int> candidate(E, 0);
  auto feasible = [&](const std::vector<int>& y) {
    for (size_t k = 0; k < costed.size(); ++k)
      feas.lp.rows[feas.capacity_row[costed[k]]].rhs = y[costed[k]];
    SimplexResult r = solve_simplex(feas.lp);
    return r.status == SimplexStatus::Optimal;
  };

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> best_y;

  // Seed the incumbent by rounding the relaxation up (feasible whenever the
  // rounded vector stays inside the enumeration box).
  LpSolution relax = solve_fractional_lp(g);
  if (relax.status == LpStatus::Infeasible) {
    out.status = IlpSolution::Status::Infeasible;
    return out;
  }
  if (relax.status == LpStatus::Optimal) {
    std::vector<int> seed(E, 0);
    bool inside = true;
    for (size_t k = 0; k < costed.size(); ++k) {
      int e = costed[k];
      int y = static_cast<int>(std::ceil(relax.resources[e] - 1e-9));
      if (y > hi[k]) inside = false;
      seed[e] = y;
    }
    if (inside) {
      best_y = seed;
      best_cost = 0.0;
      for (int e : costed) best_cost += g.edges[e].unit_cost * seed[e];
    }
  }

  auto dfs = [&](auto&& self, size_t depth, double partial_cost) -> void {
    if (partial_cost >= best_cost - 1e-9) return;
    if (depth == order.size()) {
      if (feasible(candidate)) {
        best_cost = partial_cost;
        best_y = candidate;
      }
      return;
    }
    int e = costed[order[depth]];
    double w = g.edges[e].unit_cost;
    for (int y = 0; y <= hi[order[depth]]; ++y) {
      double cost = partial_cost + w * y;
      if (cost >= best_cost - 1e-9) break;
      candidate[e] = y;
      self(self, depth + 1, cost);
    }
    candidate[e] = 0;
  };
  dfs(dfs, 0, 0.0);

  if (best_y.empty()) {
    out.status = IlpSolution::Status::Infeasible;
    return out;
  }
  out.status = IlpSolution::Status::Optimal;
  out.cost = best_cost;
  out.resources = best_y;
  return out;
}

}  // namespace nsdp

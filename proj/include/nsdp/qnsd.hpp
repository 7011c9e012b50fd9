// Queue-length driven network service distribution: iterative max-weight
// transport/processing decisions driven by virtual queues with momentum,
// with frame-doubled averaging producing the fractional solution.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "nsdp/augmented_graph.hpp"

namespace nsdp {

struct QnsdParams {
  double V = 100.0;        // optimality vs running-time control (V = 1/epsilon)
  double theta = 0.9;      // differential-backlog momentum, in [0, 1)
  long max_iters = 20000;
  long trace_every = 10;
  double tol = 1e-2;       // convergence tolerance on the conservation surplus
  bool truncate_frames = true;  // frame-doubled averaging; false = plain running average

  void validate() const {
    if (!(V > 0)) throw ValidationError("params: V must be > 0");
    if (!(theta >= 0 && theta < 1)) throw ValidationError("params: theta must be in [0,1)");
    if (max_iters < 0) throw ValidationError("params: max_iters must be >= 0");
    if (trace_every < 1) throw ValidationError("params: trace_every must be >= 1");
  }
};

struct QnsdState {
  long t = 0;
  int frame = 0;        // next frame index j; resets happen at t = 2^j
  long t_start = 1;
  std::vector<double> Q;       // [node * K]
  std::vector<double> U;       // virtual queues at t
  std::vector<double> U_prev;  // virtual queues at t-1
  std::vector<double> flows;          // [edge * K], decisions of iteration t
  std::vector<double> flows_prev;     // iteration t-1 (holds the injection at t=0)
  std::vector<double> resources;      // [edge]
  std::vector<double> resources_prev;
  std::vector<long double> accum_flows;      // running frame sums
  std::vector<long double> accum_resources;
  long accum_count = 0;
  double prev_frame_cost = std::numeric_limits<double>::quiet_NaN();

  void advance() {
    flows.swap(flows_prev);
    resources.swap(resources_prev);
  }
};

struct Solution {
  std::vector<double> avg_flows;      // [edge * K]
  std::vector<double> avg_resources;  // [edge]
  double cost = 0.0;                  // unit costs dotted with avg_resources
  double max_violation = 0.0;         // largest conservation surplus of avg_flows
  long iterations_used = 0;
  bool converged = false;

  // Filled by the constrained solver only.
  bool has_integer = false;
  std::vector<int> integer_resources;  // final-iteration allocation, [edge]
  std::vector<double> final_flows;     // final-iteration flows, [edge * K]
  double integer_cost = 0.0;
  bool integer_feasible = false;
};

struct TracePoint {
  long iteration = 0;
  int frame = 0;
  double cost_avg = 0.0;
  double max_violation = 0.0;
};
using Trace = std::vector<TracePoint>;

using IterationObserver = std::function<void(const QnsdState&, const AugmentedGraph&)>;

namespace detail {

inline void apply_injection(std::vector<double>& flows, const AugmentedGraph& g) {
  const int K = g.K();
  for (int u = 0; u < g.n(); ++u) {
    int e_src = g.source_edge(u);
    for (int c = 0; c < K; ++c) {
      double rate = g.injection(u, c);
      if (rate > 0) flows[static_cast<size_t>(e_src) * K + c] = rate;
    }
  }
}

// Final commodities reaching their destination leave via the sink edge one
// iteration after arrival (the pinned queue forwards what it absorbed).
inline void apply_drain(QnsdState& st, const AugmentedGraph& g) {
  const int K = g.K();
  for (int c = 0; c < K; ++c) {
    const CommodityInfo& info = g.commodities[c];
    if (!info.is_final) continue;
    int d = info.dest_index;
    double arrived = 0.0;
    for (int e : g.in_edges[d]) arrived += st.flows_prev[static_cast<size_t>(e) * K + c];
    if (arrived != 0.0) st.flows[static_cast<size_t>(g.sink_edge(d)) * K + c] = arrived;
  }
}

inline double average_cost(const QnsdState& st, const AugmentedGraph& g) {
  if (st.accum_count == 0) return 0.0;
  long double cost = 0.0L;
  for (int e = 0; e < g.num_edges(); ++e)
    cost += static_cast<long double>(g.edges[e].unit_cost) * st.accum_resources[e];
  return static_cast<double>(cost / st.accum_count);
}

inline void average_flows(const QnsdState& st, const AugmentedGraph& g,
                          std::vector<double>& out) {
  out.assign(st.accum_flows.size(), 0.0);
  if (st.accum_count == 0) return;
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<double>(st.accum_flows[i] / st.accum_count);
}

inline double max_surplus(const AugmentedGraph& g, std::span<const double> flows) {
  const int K = g.K();
  double worst = 0.0;
  for (int u = 0; u < g.n(); ++u) {
    for (int c = 0; c < K; ++c) {
      double in = 0.0, out = 0.0;
      for (int e : g.in_edges[u]) in += flows[static_cast<size_t>(e) * K + c];
      for (int e : g.out_edges[u]) out += flows[static_cast<size_t>(e) * K + c];
      worst = std::max(worst, in - out);
    }
  }
  return worst;
}

inline bool frame_delta_small(const QnsdState& st, double final_cost) {
  if (std::isnan(st.prev_frame_cost)) return true;
  return std::abs(final_cost - st.prev_frame_cost) <= 1e-3 * std::max(1.0, std::abs(final_cost));
}

}  // namespace detail

inline QnsdState init_state(const AugmentedGraph& g) {
  QnsdState st;
  const size_t nk = static_cast<size_t>(g.n()) * g.K();
  const size_t ek = static_cast<size_t>(g.num_edges()) * g.K();
  st.Q.assign(nk, 0.0);
  st.U.assign(nk, 0.0);
  st.U_prev.assign(nk, 0.0);
  st.flows.assign(ek, 0.0);
  st.flows_prev.assign(ek, 0.0);
  st.resources.assign(g.num_edges(), 0.0);
  st.resources_prev.assign(g.num_edges(), 0.0);
  st.accum_flows.assign(ek, 0.0L);
  st.accum_resources.assign(g.num_edges(), 0.0L);
  detail::apply_injection(st.flows_prev, g);  // iteration-0 flows: injection only
  return st;
}

// Standard queuing dynamics for the actual queues, momentum combination for
// the virtual queues, destination entries pinned to zero afterwards.
inline void queue_update(QnsdState& st, const AugmentedGraph& g, double theta) {
  const int K = g.K();
  for (int u = 0; u < g.n(); ++u) {
    for (int c = 0; c < K; ++c) {
      double in = 0.0, out = 0.0;
      for (int e : g.in_edges[u]) in += st.flows_prev[static_cast<size_t>(e) * K + c];
      for (int e : g.out_edges[u]) out += st.flows_prev[static_cast<size_t>(e) * K + c];
      size_t i = static_cast<size_t>(u) * K + c;
      double q_old = st.Q[i];
      double q_new = std::max(0.0, q_old - out + in);
      // Grouped so that theta = 0 with U == Q reproduces U == Q bit-exactly.
      double u_new = q_new + (st.U[i] - q_old) + theta * (st.U[i] - st.U_prev[i]);
      st.Q[i] = q_new;
      st.U_prev[i] = st.U[i];
      st.U[i] = u_new;
    }
  }
  for (int c = 0; c < K; ++c) {
    const CommodityInfo& info = g.commodities[c];
    if (!info.is_final) continue;
    size_t i = static_cast<size_t>(info.dest_index) * K + c;
    st.Q[i] = 0.0;
    st.U[i] = 0.0;
    st.U_prev[i] = 0.0;
  }
}

// Max-weight allocation on one network link: the best commodity gets the full
// capacity when its utility weight beats V times the unit cost.
inline void transport_decision(QnsdState& st, const AugmentedGraph& g, int e,
                               const QnsdParams& params) {
  const AugEdge& ed = g.edges[e];
  const int K = g.K();
  if (K == 0 || ed.capacity <= 0) return;
  const size_t u_base = static_cast<size_t>(ed.tail) * K;
  const size_t v_base = static_cast<size_t>(ed.head) * K;
  int best = -1;
  double best_w = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < K; ++c) {
    double w = (st.U[u_base + c] - st.U[v_base + c]) / ed.transport_req;
    if (w > best_w) {
      best_w = w;
      best = c;
    }
  }
  if (best >= 0 && best_w - params.V * ed.unit_cost > 0) {
    st.resources[e] = ed.capacity;
    st.flows[static_cast<size_t>(e) * K + best] = ed.capacity / ed.transport_req;
  }
}

// Max-weight processing allocation at one node, with the coupled scaled flow
// on the return edge.
inline void processing_decision(QnsdState& st, const AugmentedGraph& g, int u,
                                const QnsdParams& params) {
  const int K = g.K();
  const int e_in = g.compute_in_edge(u);
  const int e_out = g.compute_out_edge(u);
  const AugEdge& cin = g.edges[e_in];
  if (K == 0 || cin.capacity <= 0) return;
  const size_t base = static_cast<size_t>(u) * K;
  int best = -1;
  double best_w = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < K; ++c) {
    double r = g.req_raw(e_in, c);
    if (r == kUnprocessable) continue;
    int succ = g.commodities[c].successor;
    double w = (st.U[base + c] - st.U[base + succ]) / r;
    if (w > best_w) {
      best_w = w;
      best = c;
    }
  }
  if (best < 0 || !(best_w - params.V * cin.unit_cost > 0)) return;

  double y = cin.capacity;
  double f_in = y / g.req_raw(e_in, best);
  st.resources[e_in] = y;
  st.resources[e_out] = std::min(y, g.edges[e_out].capacity);
  st.flows[static_cast<size_t>(e_in) * K + best] = f_in;
  st.flows[static_cast<size_t>(e_out) * K + g.commodities[best].successor] =
      g.next_scaling(best) * f_in;
}

// Frame bookkeeping: restart the running average when t hits 2^j, then fold
// the current iteration into the frame sums.
inline void solution_construct(QnsdState& st, const AugmentedGraph& g, bool truncate) {
  if (truncate && st.frame < 62 && st.t == (1L << st.frame)) {
    if (st.accum_count > 0) st.prev_frame_cost = detail::average_cost(st, g);
    st.t_start = st.t;
    st.frame += 1;
    std::fill(st.accum_flows.begin(), st.accum_flows.end(), 0.0L);
    std::fill(st.accum_resources.begin(), st.accum_resources.end(), 0.0L);
    st.accum_count = 0;
  }
  for (size_t i = 0; i < st.accum_flows.size(); ++i) st.accum_flows[i] += st.flows[i];
  for (size_t i = 0; i < st.accum_resources.size(); ++i)
    st.accum_resources[i] += st.resources[i];
  st.accum_count += 1;
}

inline Solution current_solution(const QnsdState& st, const AugmentedGraph& g) {
  Solution sol;
  detail::average_flows(st, g, sol.avg_flows);
  sol.avg_resources.assign(g.num_edges(), 0.0);
  if (st.accum_count > 0)
    for (int e = 0; e < g.num_edges(); ++e)
      sol.avg_resources[e] = static_cast<double>(st.accum_resources[e] / st.accum_count);
  long double cost = 0.0L;
  for (int e = 0; e < g.num_edges(); ++e)
    cost += static_cast<long double>(g.edges[e].unit_cost) * sol.avg_resources[e];
  sol.cost = static_cast<double>(cost);
  sol.max_violation = detail::max_surplus(g, sol.avg_flows);
  sol.iterations_used = st.t;
  return sol;
}

// Upper bound on the squared per-iteration net-flow norm, from per-edge
// bounds on the total flow one iteration can place on each edge. On free
// edges, where the resource requirement is zero and the capacity-over-
// requirement form degenerates, the bound uses the actual flow cap: the
// scaled processing output, the constant injection, or the sum of inbound
// bounds for the drain.
inline double compute_b_bound(const AugmentedGraph& g) {
  const int K = g.K();
  const int E = g.num_edges();
  std::vector<double> cap(E, 0.0);

  for (int e = 0; e < E; ++e) {
    const AugEdge& ed = g.edges[e];
    switch (ed.kind) {
      case EdgeKind::Network:
        cap[e] = ed.capacity / ed.transport_req;
        break;
      case EdgeKind::ComputeIn: {
        double r_min = std::numeric_limits<double>::infinity();
        for (int c = 0; c < K; ++c) {
          double r = g.req_raw(e, c);
          if (r != kUnprocessable) r_min = std::min(r_min, r);
        }
        if (std::isfinite(r_min)) cap[e] = ed.capacity / r_min;
        break;
      }
      case EdgeKind::ComputeOut: {
        int e_in = g.compute_in_edge(ed.tail);
        double ratio = 0.0;
        for (int c = 0; c < K; ++c) {
          double r = g.req_raw(e_in, c);
          if (r != kUnprocessable) ratio = std::max(ratio, g.next_scaling(c) / r);
        }
        cap[e] = g.edges[e_in].capacity * ratio;
        break;
      }
      case EdgeKind::Source: {
        for (int c = 0; c < K; ++c) cap[e] += g.injection(ed.tail, c);
        break;
      }
      case EdgeKind::Sink:
        break;  // second pass
    }
  }
  for (int c = 0; c < K; ++c) {
    const CommodityInfo& info = g.commodities[c];
    if (!info.is_final) continue;
    int d = info.dest_index;
    double bound = 0.0;
    for (int e : g.in_edges[d])
      if (g.edges[e].kind != EdgeKind::Source) bound += cap[e];
    cap[g.sink_edge(d)] = bound;
  }

  double b = 0.0;
  for (int u = 0; u < g.n(); ++u) {
    double in = 0.0, out = 0.0;
    for (int e : g.in_edges[u]) in += cap[e];
    for (int e : g.out_edges[u]) out += cap[e];
    b += in * in + out * out;
  }
  return b;
}

inline std::pair<Solution, Trace> run_qnsd(const AugmentedGraph& g, const QnsdParams& params,
                                           const IterationObserver& observer = {}) {
  params.validate();
  QnsdState st = init_state(g);
  Trace trace;
  std::vector<double> scratch;
  for (long t = 1; t <= params.max_iters; ++t) {
    st.t = t;
    queue_update(st, g, params.theta);
    std::fill(st.flows.begin(), st.flows.end(), 0.0);
    std::fill(st.resources.begin(), st.resources.end(), 0.0);
    detail::apply_injection(st.flows, g);
    detail::apply_drain(st, g);
    for (int e = 0; e < g.m(); ++e) transport_decision(st, g, e, params);
    for (int u = 0; u < g.n(); ++u) processing_decision(st, g, u, params);
    solution_construct(st, g, params.truncate_frames);
    if (observer) observer(st, g);
    if (t % params.trace_every == 0) {
      detail::average_flows(st, g, scratch);
      trace.push_back({t, st.frame, detail::average_cost(st, g),
                       detail::max_surplus(g, scratch)});
    }
    st.advance();
  }
  Solution sol = current_solution(st, g);
  sol.converged = sol.max_violation <= params.tol && detail::frame_delta_small(st, sol.cost);
  return {std::move(sol), std::move(trace)};
}

}  // namespace nsdp

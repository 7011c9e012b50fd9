// Cloud-augmented graph: the physical network plus a per-node gadget of
// processing, source and demand units, so that computation becomes edges of
// a flow network.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nsdp/model.hpp"

namespace nsdp {

enum class EdgeKind { Network, ComputeIn, ComputeOut, Source, Sink };

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Network: return "network";
    case EdgeKind::ComputeIn: return "compute_in";
    case EdgeKind::ComputeOut: return "compute_out";
    case EdgeKind::Source: return "source";
    case EdgeKind::Sink: return "sink";
  }
  return "?";
}

struct AugEdge {
  EdgeKind kind = EdgeKind::Network;
  int tail = -1;            // 0-based original-node index (anchor node for gadget edges)
  int head = -1;
  double capacity = 0.0;
  double unit_cost = 0.0;
  int link_index = -1;      // into CloudNetwork.links for Network edges
  double transport_req = 0.0;
};

// Marker in the per-(edge, commodity) requirement table: the commodity cannot
// be carried/processed on that edge, and its flow there must stay zero.
inline constexpr double kUnprocessable = -1.0;

class AugmentedGraph {
 public:
  CloudNetwork network;
  std::vector<ServiceSpec> services;
  std::vector<Demand> demands;
  CommoditySet commodities;

  std::vector<AugEdge> edges;                 // network edges first, then 4 gadget edges per node
  std::vector<std::vector<int>> in_edges;     // augmented delta^- per original node
  std::vector<std::vector<int>> out_edges;    // augmented delta^+ per original node
  std::vector<double> cloud_cap_bound;        // c_u^max per node

  int n() const { return network.num_nodes(); }
  int m() const { return network.num_links(); }
  int K() const { return commodities.size(); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int augmented_node_count() const { return 4 * n(); }

  int compute_in_edge(int u) const { return m() + 4 * u + 0; }
  int compute_out_edge(int u) const { return m() + 4 * u + 1; }
  int source_edge(int u) const { return m() + 4 * u + 2; }
  int sink_edge(int u) const { return m() + 4 * u + 3; }

  // Resource units consumed per flow unit of commodity c on edge e; kUnprocessable
  // when the commodity may not appear on the edge at all.
  double req_raw(int e, int c) const { return req_[static_cast<size_t>(e) * K() + c]; }

  std::optional<double> resource_req(int e, int c) const {
    double r = req_raw(e, c);
    if (r == kUnprocessable) return std::nullopt;
    return r;
  }

  // Constant source injection: flow units of commodity c entering at node u
  // through its source edge, every iteration.
  double injection(int u, int c) const { return injection_[static_cast<size_t>(u) * K() + c]; }
  const std::vector<double>& injection_table() const { return injection_; }

  // Scaling factor applied when commodity c is processed into its successor.
  double next_scaling(int c) const { return next_scaling_[c]; }

  std::string edge_name(int e) const {
    const AugEdge& ed = edges[e];
    auto node = [](int idx) { return std::to_string(idx + 1); };
    switch (ed.kind) {
      case EdgeKind::Network: return node(ed.tail) + "->" + node(ed.head);
      case EdgeKind::ComputeIn: return node(ed.tail) + "->p" + node(ed.tail);
      case EdgeKind::ComputeOut: return "p" + node(ed.tail) + "->" + node(ed.tail);
      case EdgeKind::Source: return "s" + node(ed.tail) + "->" + node(ed.tail);
      case EdgeKind::Sink: return node(ed.tail) + "->q" + node(ed.tail);
    }
    return "?";
  }

  friend AugmentedGraph build_augmented_graph(const CloudNetwork&,
                                              const std::vector<ServiceSpec>&,
                                              const std::vector<Demand>&);

 private:
  std::vector<double> req_;        // [edge * K + c]
  std::vector<double> injection_;  // [node * K + c]
  std::vector<double> next_scaling_;
};

inline AugmentedGraph build_augmented_graph(const CloudNetwork& net,
                                            const std::vector<ServiceSpec>& services,
                                            const std::vector<Demand>& demands) {
  validate(net, services, demands);
  for (const auto& svc : services)
    for (size_t i = 0; i < svc.functions.size(); ++i)
      if (svc.functions[i].availability.empty())
        throw ValidationError("service " + std::to_string(svc.id) + " function " +
                              std::to_string(i + 1) + " has empty availability: no node can host it");

  AugmentedGraph g;
  g.network = net;
  g.services = services;
  g.demands = demands;
  g.commodities = enumerate_commodities(services, demands);

  const int n = net.num_nodes();
  const int K = g.commodities.size();

  // c_u^max = sum over commodities and sources of lambda * r_u, with r_u = 0
  // where the function is not hosted at u. Summed per function of the chain.
  g.cloud_cap_bound.assign(n, 0.0);
  for (const auto& d : demands) {
    const ServiceSpec* svc = detail::find_service(services, d.service);
    double total_rate = 0.0;
    for (const auto& [s, rate] : d.sources) total_rate += rate;
    for (const auto& fn : svc->functions) {
      for (NodeId u : fn.availability)
        g.cloud_cap_bound[u - 1] += total_rate * fn.proc_req.at(u);
    }
  }

  // Network edges keep the link attributes; the gadget per node u adds
  // (u,p(u)), (p(u),u), (s(u),u), (u,q(u)).
  for (int l = 0; l < net.num_links(); ++l) {
    const LinkSpec& link = net.links[l];
    AugEdge e;
    e.kind = EdgeKind::Network;
    e.tail = link.from - 1;
    e.head = link.to - 1;
    e.capacity = link.net_capacity;
    e.unit_cost = link.net_unit_cost;
    e.link_index = l;
    e.transport_req = link.transport_req;
    g.edges.push_back(e);
  }
  for (int u = 0; u < n; ++u) {
    const NodeSpec& node = net.nodes[u];
    AugEdge cin{EdgeKind::ComputeIn, u, u, static_cast<double>(node.cloud_capacity),
                node.cloud_unit_cost, -1, 0.0};
    AugEdge cout{EdgeKind::ComputeOut, u, u, g.cloud_cap_bound[u], 0.0, -1, 0.0};
    AugEdge src{EdgeKind::Source, u, u, g.cloud_cap_bound[u], 0.0, -1, 0.0};
    AugEdge snk{EdgeKind::Sink, u, u, g.cloud_cap_bound[u], 0.0, -1, 0.0};
    g.edges.push_back(cin);
    g.edges.push_back(cout);
    g.edges.push_back(src);
    g.edges.push_back(snk);
  }

  g.in_edges.assign(n, {});
  g.out_edges.assign(n, {});
  for (int e = 0; e < g.num_edges(); ++e) {
    const AugEdge& ed = g.edges[e];
    switch (ed.kind) {
      case EdgeKind::Network:
        g.out_edges[ed.tail].push_back(e);
        g.in_edges[ed.head].push_back(e);
        break;
      case EdgeKind::ComputeIn:
      case EdgeKind::Sink:
        g.out_edges[ed.tail].push_back(e);
        break;
      case EdgeKind::ComputeOut:
      case EdgeKind::Source:
        g.in_edges[ed.tail].push_back(e);
        break;
    }
  }

  // Per-(edge, commodity) requirement table.
  g.req_.assign(static_cast<size_t>(g.num_edges()) * K, kUnprocessable);
  g.next_scaling_.assign(K, 1.0);
  for (int c = 0; c < K; ++c) {
    const CommodityInfo& info = g.commodities[c];
    const ServiceSpec& svc = services[info.service_index];
    const FunctionSpec* next_fn = info.is_final ? nullptr : &svc.functions[info.id.stage];
    const FunctionSpec* prev_fn = info.id.stage > 0 ? &svc.functions[info.id.stage - 1] : nullptr;
    if (next_fn != nullptr) g.next_scaling_[c] = next_fn->flow_scaling;

    for (int e = 0; e < g.num_edges(); ++e) {
      const AugEdge& ed = g.edges[e];
      double& slot = g.req_[static_cast<size_t>(e) * K + c];
      switch (ed.kind) {
        case EdgeKind::Network:
          slot = ed.transport_req;
          break;
        case EdgeKind::ComputeIn:
          // Stage-i commodities are processed by function (phi, i+1); the final
          // commodity has no next function and is unprocessable everywhere.
          if (next_fn != nullptr && next_fn->available_at(ed.tail + 1))
            slot = next_fn->proc_req.at(ed.tail + 1);
          break;
        case EdgeKind::ComputeOut:
          // Carries commodities produced by function (phi, i) hosted at u.
          if (prev_fn != nullptr && prev_fn->available_at(ed.tail + 1)) slot = 0.0;
          break;
        case EdgeKind::Source:
          if (info.id.stage == 0) slot = 0.0;
          break;
        case EdgeKind::Sink:
          if (info.is_final && info.dest_index == ed.tail) slot = 0.0;
          break;
      }
    }
  }

  // Constant injection schedule.
  g.injection_.assign(static_cast<size_t>(n) * K, 0.0);
  for (const auto& d : demands) {
    auto c0 = g.commodities.index_of(CommodityId{d.destination, d.service, 0});
    for (const auto& [s, rate] : d.sources)
      g.injection_[static_cast<size_t>(s - 1) * K + *c0] = rate;
  }

  return g;
}

}  // namespace nsdp

// Cloud network, service chains, client demands and the commodity space
// they generate.

#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsdp {

using NodeId = int;     // 1-based, contiguous
using ServiceId = int;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeSpec {
  NodeId id = 0;
  double cloud_unit_cost = 0.0;  // cost per cloud resource unit
  int cloud_capacity = 0;        // max cloud resource units
};

struct LinkSpec {
  NodeId from = 0;
  NodeId to = 0;
  double net_unit_cost = 0.0;    // cost per network resource unit
  int net_capacity = 0;          // max network resource units
  double transport_req = 1.0;    // network resource units per flow unit
};

struct CloudNetwork {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_links() const { return static_cast<int>(links.size()); }
};

struct FunctionSpec {
  // Cloud resource units per flow unit, per hosting node. Defined exactly for
  // the nodes in `availability`, strictly positive there.
  std::map<NodeId, double> proc_req;
  std::set<NodeId> availability;
  double flow_scaling = 1.0;     // output flow units per input flow unit

  bool available_at(NodeId u) const { return availability.count(u) > 0; }
};

struct ServiceSpec {
  ServiceId id = 0;
  std::vector<FunctionSpec> functions;  // ordered chain, length >= 1

  int chain_length() const { return static_cast<int>(functions.size()); }
};

struct Demand {
  NodeId destination = 0;
  ServiceId service = 0;
  std::map<NodeId, double> sources;  // flow units entering per source node
};

// The flow that is the output of the `stage`-th function of `service`,
// destined for `destination`. Stage 0 is the raw source flow.
struct CommodityId {
  NodeId destination = 0;
  ServiceId service = 0;
  int stage = 0;

  auto operator<=>(const CommodityId&) const = default;
};

inline std::string to_string(const CommodityId& c) {
  return "(d=" + std::to_string(c.destination) + ",s=" + std::to_string(c.service) +
         ",i=" + std::to_string(c.stage) + ")";
}

namespace detail {

inline const ServiceSpec* find_service(const std::vector<ServiceSpec>& services, ServiceId id) {
  for (const auto& s : services)
    if (s.id == id) return &s;
  return nullptr;
}

}  // namespace detail

inline void validate_network(const CloudNetwork& net) {
  const int n = net.num_nodes();
  std::set<NodeId> ids;
  for (const auto& node : net.nodes) {
    if (!ids.insert(node.id).second)
      throw ValidationError("duplicate node id " + std::to_string(node.id));
    if (node.cloud_unit_cost < 0)
      throw ValidationError("node " + std::to_string(node.id) + ": cloud_unit_cost must be >= 0");
    if (node.cloud_capacity < 0)
      throw ValidationError("node " + std::to_string(node.id) + ": cloud_capacity must be >= 0");
  }
  for (NodeId u = 1; u <= n; ++u)
    if (!ids.count(u))
      throw ValidationError("node ids must be contiguous integers starting at 1 (missing " +
                            std::to_string(u) + ")");
  for (const auto& link : net.links) {
    if (!ids.count(link.from) || !ids.count(link.to))
      throw ValidationError("link (" + std::to_string(link.from) + "," + std::to_string(link.to) +
                            ") references an unknown node");
    if (link.from == link.to)
      throw ValidationError("self-loop link at node " + std::to_string(link.from));
    if (link.net_unit_cost < 0) throw ValidationError("link net_unit_cost must be >= 0");
    if (link.net_capacity < 0) throw ValidationError("link net_capacity must be >= 0");
    if (!(link.transport_req > 0)) throw ValidationError("link transport_req must be > 0");
  }
}

inline void validate_services(const CloudNetwork& net, const std::vector<ServiceSpec>& services) {
  std::set<ServiceId> ids;
  for (const auto& svc : services) {
    if (svc.id <= 0) throw ValidationError("service ids must be positive");
    if (!ids.insert(svc.id).second)
      throw ValidationError("duplicate service id " + std::to_string(svc.id));
    if (svc.functions.empty())
      throw ValidationError("service " + std::to_string(svc.id) + ": function list is empty");
    for (size_t i = 0; i < svc.functions.size(); ++i) {
      const auto& fn = svc.functions[i];
      if (!(fn.flow_scaling > 0))
        throw ValidationError("service " + std::to_string(svc.id) + " function " +
                              std::to_string(i + 1) + ": flow_scaling must be > 0");
      for (NodeId u : fn.availability) {
        if (u < 1 || u > net.num_nodes())
          throw ValidationError("service " + std::to_string(svc.id) + " function " +
                                std::to_string(i + 1) + ": availability references unknown node " +
                                std::to_string(u));
        auto it = fn.proc_req.find(u);
        if (it == fn.proc_req.end() || !(it->second > 0))
          throw ValidationError("service " + std::to_string(svc.id) + " function " +
                                std::to_string(i + 1) + ": proc_req must be > 0 at node " +
                                std::to_string(u));
      }
    }
  }
}

inline void validate_demands(const CloudNetwork& net, const std::vector<ServiceSpec>& services,
                             const std::vector<Demand>& demands) {
  std::set<std::pair<NodeId, ServiceId>> seen;
  for (const auto& d : demands) {
    if (d.destination < 1 || d.destination > net.num_nodes())
      throw ValidationError("demand destination " + std::to_string(d.destination) + " is unknown");
    if (detail::find_service(services, d.service) == nullptr)
      throw ValidationError("demand references unknown service " + std::to_string(d.service));
    if (!seen.insert({d.destination, d.service}).second)
      throw ValidationError("duplicate demand for (destination=" + std::to_string(d.destination) +
                            ", service=" + std::to_string(d.service) + ")");
    if (d.sources.empty())
      throw ValidationError("demand (destination=" + std::to_string(d.destination) +
                            "): sources must be nonempty");
    for (const auto& [s, rate] : d.sources) {
      if (s < 1 || s > net.num_nodes())
        throw ValidationError("demand source " + std::to_string(s) + " is unknown");
      if (!(rate > 0))
        throw ValidationError("demand rate at source " + std::to_string(s) + " must be > 0");
    }
  }
}

inline void validate(const CloudNetwork& net, const std::vector<ServiceSpec>& services,
                     const std::vector<Demand>& demands) {
  validate_network(net);
  validate_services(net, services);
  validate_demands(net, services, demands);
}

// (d, phi, stage + 1) if stage < M_phi, else nothing.
inline std::optional<CommodityId> successor(const CommodityId& c,
                                            const std::vector<ServiceSpec>& services) {
  const ServiceSpec* svc = detail::find_service(services, c.service);
  if (svc == nullptr)
    throw ValidationError("successor: unknown service " + std::to_string(c.service));
  if (c.stage >= svc->chain_length()) return std::nullopt;
  return CommodityId{c.destination, c.service, c.stage + 1};
}

struct CommodityInfo {
  CommodityId id;
  int dest_index = -1;     // 0-based node index of the destination
  int service_index = -1;  // index into the services vector
  int chain_length = 0;
  bool is_final = false;
  int successor = -1;      // commodity index of (d, phi, stage + 1), or -1
};

// Ordered commodity space. The lexicographic (destination, service, stage)
// order fixed here is the tie-break order used by all solvers.
class CommoditySet {
 public:
  CommoditySet() = default;
  explicit CommoditySet(std::vector<CommodityInfo> infos) : infos_(std::move(infos)) {
    for (size_t i = 0; i < infos_.size(); ++i) index_[infos_[i].id] = static_cast<int>(i);
  }

  int size() const { return static_cast<int>(infos_.size()); }
  bool empty() const { return infos_.empty(); }
  const CommodityInfo& operator[](int i) const { return infos_[i]; }
  const std::vector<CommodityInfo>& infos() const { return infos_; }

  std::optional<int> index_of(const CommodityId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<CommodityInfo> infos_;
  std::map<CommodityId, int> index_;
};

inline CommoditySet enumerate_commodities(const std::vector<ServiceSpec>& services,
                                          const std::vector<Demand>& demands) {
  std::vector<CommodityInfo> infos;
  std::vector<std::pair<CommodityId, int>> keys;  // (id, service_index)
  for (const auto& d : demands) {
    const ServiceSpec* svc = detail::find_service(services, d.service);
    if (svc == nullptr)
      throw ValidationError("demand references unknown service " + std::to_string(d.service));
    int sidx = static_cast<int>(svc - services.data());
    for (int stage = 0; stage <= svc->chain_length(); ++stage)
      keys.push_back({CommodityId{d.destination, d.service, stage}, sidx});
  }
  std::sort(keys.begin(), keys.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  infos.reserve(keys.size());
  for (const auto& [id, sidx] : keys) {
    CommodityInfo info;
    info.id = id;
    info.dest_index = id.destination - 1;
    info.service_index = sidx;
    info.chain_length = services[sidx].chain_length();
    info.is_final = (id.stage == info.chain_length);
    infos.push_back(info);
  }
  // Stages of one (d, phi) are contiguous in the sorted order.
  for (size_t i = 0; i + 1 < infos.size(); ++i) {
    if (!infos[i].is_final) infos[i].successor = static_cast<int>(i) + 1;
  }
  return CommoditySet(std::move(infos));
}

}  // namespace nsdp

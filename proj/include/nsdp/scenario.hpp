// Scenario I/O and the bundled experiment instances.
//
// Scenario files are JSON with field names mirroring the domain types. Two
// loader conveniences keep fixtures compact: a function's "proc_req" may be a
// single number (uniform across its availability set), and "availability" may
// be the string "all" or omitted entirely (every node). Saved files always
// use the explicit per-node form, so save/load round-trips are identity.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsdp/augmented_graph.hpp"
#include "nsdp/model.hpp"
#include "nsdp/qnsd.hpp"

namespace nsdp {

struct Scenario {
  std::string name;
  CloudNetwork network;
  std::vector<ServiceSpec> services;
  std::vector<Demand> demands;
  QnsdParams defaults;

  AugmentedGraph build() const { return build_augmented_graph(network, services, demands); }
};

inline bool operator==(const NodeSpec& a, const NodeSpec& b) {
  return a.id == b.id && a.cloud_unit_cost == b.cloud_unit_cost &&
         a.cloud_capacity == b.cloud_capacity;
}
inline bool operator==(const LinkSpec& a, const LinkSpec& b) {
  return a.from == b.from && a.to == b.to && a.net_unit_cost == b.net_unit_cost &&
         a.net_capacity == b.net_capacity && a.transport_req == b.transport_req;
}
inline bool operator==(const CloudNetwork& a, const CloudNetwork& b) {
  return a.nodes == b.nodes && a.links == b.links;
}
inline bool operator==(const FunctionSpec& a, const FunctionSpec& b) {
  return a.proc_req == b.proc_req && a.availability == b.availability &&
         a.flow_scaling == b.flow_scaling;
}
inline bool operator==(const ServiceSpec& a, const ServiceSpec& b) {
  return a.id == b.id && a.functions == b.functions;
}
inline bool operator==(const Demand& a, const Demand& b) {
  return a.destination == b.destination && a.service == b.service && a.sources == b.sources;
}
inline bool operator==(const QnsdParams& a, const QnsdParams& b) {
  return a.V == b.V && a.theta == b.theta && a.max_iters == b.max_iters &&
         a.trace_every == b.trace_every && a.tol == b.tol &&
         a.truncate_frames == b.truncate_frames;
}
inline bool operator==(const Scenario& a, const Scenario& b) {
  return a.name == b.name && a.network == b.network && a.services == b.services &&
         a.demands == b.demands && a.defaults == b.defaults;
}

namespace detail {

using json = nlohmann::json;

inline std::map<NodeId, double> parse_node_map(const json& j, const std::string& what) {
  std::map<NodeId, double> out;
  if (!j.is_object()) throw ValidationError(what + " must be an object keyed by node id");
  for (const auto& [key, value] : j.items()) {
    try {
      out[std::stoi(key)] = value.get<double>();
    } catch (const std::exception&) {
      throw ValidationError(what + ": bad entry for key '" + key + "'");
    }
  }
  return out;
}

inline Scenario scenario_from_json(const json& j) {
  Scenario sc;
  try {
    sc.name = j.value("name", "");
    const json& jn = j.at("network");
    for (const auto& node : jn.at("nodes")) {
      NodeSpec ns;
      ns.id = node.at("id").get<NodeId>();
      ns.cloud_unit_cost = node.at("cloud_unit_cost").get<double>();
      ns.cloud_capacity = node.at("cloud_capacity").get<int>();
      sc.network.nodes.push_back(ns);
    }
    for (const auto& link : jn.value("links", json::array())) {
      LinkSpec ls;
      ls.from = link.at("from").get<NodeId>();
      ls.to = link.at("to").get<NodeId>();
      ls.net_unit_cost = link.at("net_unit_cost").get<double>();
      ls.net_capacity = link.at("net_capacity").get<int>();
      ls.transport_req = link.at("transport_req").get<double>();
      sc.network.links.push_back(ls);
    }
    for (const auto& svc : j.value("services", json::array())) {
      ServiceSpec ss;
      ss.id = svc.at("id").get<ServiceId>();
      for (const auto& fn : svc.at("functions")) {
        FunctionSpec fs;
        if (fn.contains("flow_scaling")) fs.flow_scaling = fn.at("flow_scaling").get<double>();
        if (!fn.contains("availability") ||
            (fn.at("availability").is_string() && fn.at("availability") == "all")) {
          for (const auto& node : sc.network.nodes) fs.availability.insert(node.id);
        } else {
          for (const auto& u : fn.at("availability")) fs.availability.insert(u.get<NodeId>());
        }
        const json& pr = fn.at("proc_req");
        if (pr.is_number()) {
          for (NodeId u : fs.availability) fs.proc_req[u] = pr.get<double>();
        } else {
          fs.proc_req = parse_node_map(pr, "proc_req");
        }
        ss.functions.push_back(std::move(fs));
      }
      sc.services.push_back(std::move(ss));
    }
    for (const auto& dem : j.value("demands", json::array())) {
      Demand d;
      d.destination = dem.at("destination").get<NodeId>();
      d.service = dem.at("service").get<ServiceId>();
      d.sources = parse_node_map(dem.at("sources"), "sources");
      sc.demands.push_back(std::move(d));
    }
    if (j.contains("defaults")) {
      const json& jd = j.at("defaults");
      sc.defaults.V = jd.value("V", sc.defaults.V);
      sc.defaults.theta = jd.value("theta", sc.defaults.theta);
      sc.defaults.max_iters = jd.value("max_iters", sc.defaults.max_iters);
      sc.defaults.trace_every = jd.value("trace_every", sc.defaults.trace_every);
      sc.defaults.tol = jd.value("tol", sc.defaults.tol);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario field error: ") + e.what());
  }
  validate(sc.network, sc.services, sc.demands);
  sc.defaults.validate();
  return sc;
}

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["network"]["nodes"] = json::array();
  for (const auto& node : sc.network.nodes)
    j["network"]["nodes"].push_back({{"id", node.id},
                                     {"cloud_unit_cost", node.cloud_unit_cost},
                                     {"cloud_capacity", node.cloud_capacity}});
  j["network"]["links"] = json::array();
  for (const auto& link : sc.network.links)
    j["network"]["links"].push_back({{"from", link.from},
                                     {"to", link.to},
                                     {"net_unit_cost", link.net_unit_cost},
                                     {"net_capacity", link.net_capacity},
                                     {"transport_req", link.transport_req}});
  j["services"] = json::array();
  for (const auto& svc : sc.services) {
    json js;
    js["id"] = svc.id;
    js["functions"] = json::array();
    for (const auto& fn : svc.functions) {
      json jf;
      jf["flow_scaling"] = fn.flow_scaling;
      jf["availability"] = json::array();
      for (NodeId u : fn.availability) jf["availability"].push_back(u);
      jf["proc_req"] = json::object();
      for (const auto& [u, r] : fn.proc_req) jf["proc_req"][std::to_string(u)] = r;
      js["functions"].push_back(std::move(jf));
    }
    j["services"].push_back(std::move(js));
  }
  j["demands"] = json::array();
  for (const auto& d : sc.demands) {
    json jd;
    jd["destination"] = d.destination;
    jd["service"] = d.service;
    jd["sources"] = json::object();
    for (const auto& [u, rate] : d.sources) jd["sources"][std::to_string(u)] = rate;
    j["demands"].push_back(std::move(jd));
  }
  j["defaults"] = {{"V", sc.defaults.V},
                   {"theta", sc.defaults.theta},
                   {"max_iters", sc.defaults.max_iters},
                   {"trace_every", sc.defaults.trace_every},
                   {"tol", sc.defaults.tol}};
  return j;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  detail::json j;
  try {
    j = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }
  return detail::scenario_from_json(j);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline std::string scenario_to_string(const Scenario& sc) {
  return detail::scenario_to_json(sc).dump(2) + "\n";
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write scenario file: " + path);
  out << scenario_to_string(sc);
}

// ---------------------------------------------------------------------------
// Bundled instances.
//
// The Abilene topology is the standard US continental research network:
// 11 nodes, 14 bidirectional (28 directed) links. Node numbering used here:
//   1 Seattle, 2 Sunnyvale, 3 Denver, 4 Los Angeles, 5 Houston,
//   6 Kansas City, 7 Atlanta, 8 Indianapolis, 9 Chicago,
//   10 Washington DC, 11 New York.
// West-coast clients sit at {1,2,4}, east-coast clients at {7,10,11}, and the
// cheap cloud nodes {5,6} are the central processing candidates.

namespace detail {

inline CloudNetwork abilene_network() {
  CloudNetwork net;
  for (NodeId u = 1; u <= 11; ++u) {
    double w = (u == 5 || u == 6) ? 1.0 : 3.0;
    net.nodes.push_back({u, w, 10});
  }
  const std::pair<int, int> pairs[] = {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 6},
                                       {4, 5}, {5, 6}, {5, 7}, {6, 8}, {7, 8},
                                       {7, 10}, {8, 9}, {9, 11}, {10, 11}};
  for (const auto& [a, b] : pairs) {
    net.links.push_back({a, b, 1.0, 10, 1.0});
    net.links.push_back({b, a, 1.0, 10, 1.0});
  }
  return net;
}

inline FunctionSpec uniform_function(const CloudNetwork& net, double req, double scaling = 1.0) {
  FunctionSpec fn;
  fn.flow_scaling = scaling;
  for (const auto& node : net.nodes) {
    fn.availability.insert(node.id);
    fn.proc_req[node.id] = req;
  }
  return fn;
}

inline Scenario abilene_integer_scenario(double rate, double V, const std::string& name) {
  Scenario sc;
  sc.name = name;
  sc.network = abilene_network();
  ServiceSpec svc;
  svc.id = 1;
  svc.functions.push_back(uniform_function(sc.network, 1.0));
  sc.services.push_back(std::move(svc));
  sc.demands.push_back({11, 1, {{1, rate}}});
  sc.demands.push_back({7, 1, {{2, rate}}});
  sc.defaults = {V, 0.9, 20000, 10, 1e-2, true};
  return sc;
}

}  // namespace detail

inline std::vector<std::string> bundled_scenario_names() {
  return {"two-node", "abilene-fractional", "abilene-integer", "abilene-integer-half"};
}

inline Scenario bundled_scenario(const std::string& name) {
  if (name == "two-node") {
    Scenario sc;
    sc.name = name;
    sc.network.nodes.push_back({1, 1.0, 10});
    sc.network.nodes.push_back({2, 3.0, 10});
    sc.network.links.push_back({1, 2, 1.0, 10, 1.0});
    sc.network.links.push_back({2, 1, 1.0, 10, 1.0});
    ServiceSpec svc;
    svc.id = 1;
    svc.functions.push_back(detail::uniform_function(sc.network, 1.0));
    sc.services.push_back(std::move(svc));
    sc.demands.push_back({2, 1, {{1, 1.0}}});
    sc.defaults = {50.0, 0.9, 5000, 10, 1e-2, true};
    return sc;
  }
  if (name == "abilene-fractional") {
    Scenario sc;
    sc.name = name;
    sc.network = detail::abilene_network();
    ServiceSpec s1, s2;
    s1.id = 1;
    s1.functions.push_back(detail::uniform_function(sc.network, 1.0));
    s1.functions.push_back(detail::uniform_function(sc.network, 3.0));
    s2.id = 2;
    s2.functions.push_back(detail::uniform_function(sc.network, 2.0));
    s2.functions.push_back(detail::uniform_function(sc.network, 2.0));
    sc.services.push_back(std::move(s1));
    sc.services.push_back(std::move(s2));
    // East-coast clients consume service 1 fed from the west coast; west-coast
    // clients consume service 2 fed from the east coast. 18 s-d pairs total.
    for (NodeId d : {7, 10, 11}) sc.demands.push_back({d, 1, {{1, 1.0}, {2, 1.0}, {4, 1.0}}});
    for (NodeId d : {1, 2, 4}) sc.demands.push_back({d, 2, {{7, 1.0}, {10, 1.0}, {11, 1.0}}});
    sc.defaults = {300.0, 0.9, 15000, 10, 1e-2, true};
    return sc;
  }
  if (name == "abilene-integer")
    return detail::abilene_integer_scenario(1.0, 1000.0, name);
  if (name == "abilene-integer-half")
    return detail::abilene_integer_scenario(0.5, 100.0, name);
  throw ValidationError("unknown bundled scenario: " + name);
}

// Bundled name first, then the filesystem.
inline Scenario resolve_scenario(const std::string& name_or_path) {
  for (const auto& name : bundled_scenario_names())
    if (name == name_or_path) return bundled_scenario(name);
  if (std::filesystem::exists(name_or_path)) return load_scenario(name_or_path);
  throw ValidationError("scenario not found (no bundled scenario or file): " + name_or_path);
}

}  // namespace nsdp

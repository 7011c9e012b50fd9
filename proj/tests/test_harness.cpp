#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nsdp/oracle.hpp"
#include "nsdp/scenario.hpp"
#include "nsdp/solution_io.hpp"
#include "support/test_instances.hpp"

using namespace nsdp;

namespace {

std::string scenario_dir() {
#ifdef NSDP_SCENARIO_DIR
  return NSDP_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

}  // namespace

TEST(Scenario, RoundTripAllBundled) {
  for (const auto& name : bundled_scenario_names()) {
    Scenario sc = bundled_scenario(name);
    Scenario back = parse_scenario(scenario_to_string(sc));
    EXPECT_TRUE(back == sc) << name;
    // A second trip is byte-stable.
    EXPECT_EQ(scenario_to_string(back), scenario_to_string(sc)) << name;
  }
}

TEST(Scenario, BundledFixtureFilesMatchRegistry) {
  for (const auto& name : bundled_scenario_names()) {
    std::string path = scenario_dir() + "/" + name + ".json";
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    Scenario from_file = load_scenario(path);
    EXPECT_TRUE(from_file == bundled_scenario(name)) << name;
  }
}

TEST(Scenario, AbileneFractionalContents) {
  Scenario sc = bundled_scenario("abilene-fractional");
  EXPECT_EQ(sc.network.num_nodes(), 11);
  EXPECT_EQ(sc.network.num_links(), 28);
  EXPECT_EQ(sc.services.size(), 2u);

  int sd_pairs = 0;
  for (const auto& d : sc.demands) sd_pairs += static_cast<int>(d.sources.size());
  EXPECT_EQ(sd_pairs, 18);

  for (const auto& node : sc.network.nodes) {
    EXPECT_EQ(node.cloud_capacity, 10);
    double expect = (node.id == 5 || node.id == 6) ? 1.0 : 3.0;
    EXPECT_DOUBLE_EQ(node.cloud_unit_cost, expect);
  }
  for (const auto& link : sc.network.links) {
    EXPECT_EQ(link.net_capacity, 10);
    EXPECT_DOUBLE_EQ(link.net_unit_cost, 1.0);
    EXPECT_DOUBLE_EQ(link.transport_req, 1.0);
  }
  const double reqs[2][2] = {{1.0, 3.0}, {2.0, 2.0}};
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 2; ++i)
      EXPECT_DOUBLE_EQ(sc.services[s].functions[i].proc_req.at(1), reqs[s][i]);

  EXPECT_EQ(enumerate_commodities(sc.services, sc.demands).size(), 18);
}

TEST(Scenario, AbileneIntegerContents) {
  Scenario sc = bundled_scenario("abilene-integer");
  ASSERT_EQ(sc.demands.size(), 2u);
  EXPECT_EQ(sc.demands[0].destination, 11);
  EXPECT_EQ(sc.demands[0].sources.begin()->first, 1);
  EXPECT_DOUBLE_EQ(sc.demands[0].sources.begin()->second, 1.0);
  EXPECT_EQ(sc.demands[1].destination, 7);
  EXPECT_EQ(sc.demands[1].sources.begin()->first, 2);
  ASSERT_EQ(sc.services.size(), 1u);
  EXPECT_EQ(sc.services[0].chain_length(), 1);

  Scenario half = bundled_scenario("abilene-integer-half");
  EXPECT_DOUBLE_EQ(half.demands[0].sources.begin()->second, 0.5);
  EXPECT_DOUBLE_EQ(half.defaults.V, 100.0);
}

TEST(Scenario, SouthernPathExistsForConsolidation) {
  // The bundled numbering keeps a 1-2-4-5-7-10-11 corridor so the half-rate
  // instance can consolidate both flows onto shared links.
  Scenario sc = bundled_scenario("abilene-integer");
  auto has_link = [&](NodeId a, NodeId b) {
    for (const auto& l : sc.network.links)
      if (l.from == a && l.to == b) return true;
    return false;
  };
  const NodeId path[] = {1, 2, 4, 5, 7, 10, 11};
  for (size_t i = 0; i + 1 < std::size(path); ++i)
    EXPECT_TRUE(has_link(path[i], path[i + 1])) << path[i] << "->" << path[i + 1];
}

TEST(Scenario, LoaderErrors) {
  EXPECT_THROW(parse_scenario("{ not json"), ValidationError);
  try {
    parse_scenario("{ not json");
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("parse error"), std::string::npos);
  }

  // Missing required field.
  EXPECT_THROW(parse_scenario(R"({"network": {"nodes": [{"id": 1}]}})"), ValidationError);

  // Violated model invariant is named.
  Scenario sc = bundled_scenario("two-node");
  sc.network.links[0].to = 1;  // self loop
  try {
    parse_scenario(scenario_to_string(sc));
    FAIL() << "expected validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
  }

  EXPECT_THROW(load_scenario("/nonexistent/path.json"), ValidationError);
}

TEST(Scenario, UniformShorthandsExpand) {
  const char* text = R"({
    "name": "shorthand",
    "network": {
      "nodes": [{"id": 1, "cloud_unit_cost": 1.0, "cloud_capacity": 4},
                 {"id": 2, "cloud_unit_cost": 2.0, "cloud_capacity": 4}],
      "links": [{"from": 1, "to": 2, "net_unit_cost": 1.0, "net_capacity": 4,
                  "transport_req": 1.0}]
    },
    "services": [{"id": 1, "functions": [{"proc_req": 1.5}]}],
    "demands": [{"destination": 2, "service": 1, "sources": {"1": 0.5}}]
  })";
  Scenario sc = parse_scenario(text);
  EXPECT_EQ(sc.services[0].functions[0].availability.size(), 2u);
  EXPECT_DOUBLE_EQ(sc.services[0].functions[0].proc_req.at(2), 1.5);
}

TEST(Scenario, ResolveByNameOrPath) {
  EXPECT_EQ(resolve_scenario("two-node").name, "two-node");
  std::string tmp = ::testing::TempDir() + "resolve_test.json";
  save_scenario(bundled_scenario("two-node"), tmp);
  EXPECT_EQ(resolve_scenario(tmp).network.num_nodes(), 2);
  EXPECT_THROW(resolve_scenario("no-such-scenario"), ValidationError);
  std::filesystem::remove(tmp);
}

TEST(TraceIo, RowPerSampleWithNineSignificantDigits) {
  Trace trace;
  trace.push_back({1, 1, 1.0 / 3.0, 0.0});
  trace.push_back({2, 2, 246.0, 0.05});
  trace.push_back({3, 2, 1234567891.0, 1e-12});
  std::ostringstream out;
  emit_trace(trace, out);
  EXPECT_EQ(out.str(),
            "iteration,frame,cost_avg,max_violation\n"
            "1,1,0.333333333,0\n"
            "2,2,246,0.05\n"
            "3,2,1.23456789e+09,1e-12\n");
}

TEST(TraceIo, EmptyTraceIsHeaderOnly) {
  std::ostringstream out;
  emit_trace({}, out);
  EXPECT_EQ(out.str(), "iteration,frame,cost_avg,max_violation\n");
}

TEST(SolutionIo, EmitsStructuredSolution) {
  AugmentedGraph g = bundled_scenario("two-node").build();
  LpSolution lp = solve_fractional_lp(g);
  ASSERT_EQ(lp.status, LpStatus::Optimal);
  Solution sol;
  sol.avg_flows = lp.flows;
  sol.avg_resources = lp.resources;
  sol.cost = lp.cost;
  sol.iterations_used = 1;
  sol.converged = true;

  std::ostringstream out;
  emit_solution(sol, g, "lp", out);
  auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j.at("algorithm"), "lp");
  EXPECT_DOUBLE_EQ(j.at("cost").get<double>(), 2.0);
  EXPECT_FALSE(j.at("avg_resources").empty());
  EXPECT_FALSE(j.at("avg_flows").empty());

  // The whole unit of demand is processed by function (1,1) at node 1.
  auto table = processing_allocation(g, lp.flows);
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table[0].node, 1);
  EXPECT_EQ(table[0].service, 1);
  EXPECT_EQ(table[0].function, 1);
  EXPECT_DOUBLE_EQ(table[0].resource_units, 1.0);
}

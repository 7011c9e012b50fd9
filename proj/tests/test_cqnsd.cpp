#include <gtest/gtest.h>

#include <algorithm>

#include "nsdp/cqnsd.hpp"
#include "nsdp/oracle.hpp"
#include "nsdp/scenario.hpp"
#include "support/test_instances.hpp"

using namespace nsdp;

namespace {

// 1 -> 2 -> 3 line, unit costs, single-function service terminating at 3.
Scenario line3() {
  Scenario sc;
  sc.name = "line3";
  for (NodeId u : {1, 2, 3}) sc.network.nodes.push_back({u, 1.0, 5});
  sc.network.links.push_back({1, 2, 1.0, 5, 1.0});
  sc.network.links.push_back({2, 1, 1.0, 5, 1.0});
  sc.network.links.push_back({2, 3, 1.0, 5, 1.0});
  sc.network.links.push_back({3, 2, 1.0, 5, 1.0});
  ServiceSpec svc;
  svc.id = 1;
  FunctionSpec fn;
  fn.availability = {1, 2, 3};
  fn.proc_req = {{1, 1.0}, {2, 1.0}, {3, 1.0}};
  svc.functions.push_back(fn);
  sc.services.push_back(svc);
  sc.demands.push_back({3, 1, {{1, 1.0}}});
  return sc;
}

}  // namespace

TEST(CqnsdBudgets, SourceInjectionOnlyAtStart) {
  AugmentedGraph g = bundled_scenario("two-node").build();
  QnsdState st = init_state(g);  // flows_prev carries the injection
  std::vector<double> budgets = build_budgets(st, g);
  int c0 = *g.commodities.index_of({2, 1, 0});
  EXPECT_DOUBLE_EQ(budgets[static_cast<size_t>(0) * g.K() + c0], 1.0);
  double other = 0.0;
  for (size_t i = 0; i < budgets.size(); ++i)
    if (i != static_cast<size_t>(0) * g.K() + c0) other += budgets[i];
  EXPECT_DOUBLE_EQ(other, 0.0);
}

TEST(CqnsdBudgets, SumsInflowAcrossNeighbors) {
  AugmentedGraph g = line3().build();
  const int K = g.K();
  int c0 = *g.commodities.index_of({3, 1, 0});
  QnsdState st = init_state(g);
  std::fill(st.flows_prev.begin(), st.flows_prev.end(), 0.0);
  st.flows_prev[static_cast<size_t>(0) * K + c0] = 2.0;  // link 1->2
  st.flows_prev[static_cast<size_t>(3) * K + c0] = 1.0;  // link 3->2
  std::vector<double> budgets = build_budgets(st, g);
  EXPECT_DOUBLE_EQ(budgets[static_cast<size_t>(1) * K + c0], 3.0);
}

TEST(CqnsdBudgets, ProcessedOutputCountsTowardNextStage) {
  AugmentedGraph g = line3().build();
  const int K = g.K();
  int c1 = *g.commodities.index_of({3, 1, 1});
  QnsdState st = init_state(g);
  std::fill(st.flows_prev.begin(), st.flows_prev.end(), 0.0);
  st.flows_prev[static_cast<size_t>(g.compute_out_edge(1)) * K + c1] = 0.7;
  std::vector<double> budgets = build_budgets(st, g);
  EXPECT_DOUBLE_EQ(budgets[static_cast<size_t>(1) * K + c1], 0.7);
}

TEST(CqnsdAssignment, SingleCommoditySingleUnit) {
  // Weight 10, budget 1, req 1, unit cost 1, V = 1, capacity 10: one unit
  // carries the whole budget; more units only add cost.
  AugmentedGraph g = line3().build();
  const int K = g.K();
  int c0 = *g.commodities.index_of({3, 1, 0});
  QnsdState st = init_state(g);
  st.U[static_cast<size_t>(0) * K + c0] = 10.0;  // against U = 0 downstream
  std::vector<double> budgets(static_cast<size_t>(g.n()) * K, 0.0);
  budgets[static_cast<size_t>(0) * K + c0] = 1.0;
  QnsdParams params;
  params.V = 1.0;
  node_assignment(st, g, 0, budgets, params);
  EXPECT_DOUBLE_EQ(st.resources[0], 1.0);  // link 1->2
  EXPECT_DOUBLE_EQ(st.flows[static_cast<size_t>(0) * K + c0], 1.0);
  EXPECT_DOUBLE_EQ(budgets[static_cast<size_t>(0) * K + c0], 0.0);
}

TEST(CqnsdAssignment, IdleWithoutPositiveWeights) {
  AugmentedGraph g = line3().build();
  QnsdState st = init_state(g);
  std::vector<double> budgets(static_cast<size_t>(g.n()) * g.K(), 1.0);
  QnsdParams params;
  for (int u = 0; u < g.n(); ++u) node_assignment(st, g, u, budgets, params);
  for (int e = 0; e < g.num_edges(); ++e) EXPECT_DOUBLE_EQ(st.resources[e], 0.0);
}

TEST(CqnsdAssignment, ConsolidatesTwoCommoditiesIntoOneUnit) {
  // Weights 10 and 4, budgets 0.5 each, req 1: one resource unit packs both
  // halves for utility 7; a second unit would add cost without flow.
  Scenario sc;
  sc.name = "consolidation";
  sc.network.nodes.push_back({1, 1.0, 10});
  sc.network.nodes.push_back({2, 1.0, 10});
  sc.network.links.push_back({1, 2, 1.0, 5, 1.0});
  for (ServiceId s : {1, 2}) {
    ServiceSpec svc;
    svc.id = s;
    FunctionSpec fn;
    fn.availability = {1, 2};
    fn.proc_req = {{1, 1.0}, {2, 1.0}};
    svc.functions.push_back(fn);
    sc.services.push_back(svc);
  }
  sc.demands.push_back({2, 1, {{1, 0.5}}});
  sc.demands.push_back({2, 2, {{1, 0.5}}});
  AugmentedGraph g = sc.build();
  const int K = g.K();
  int cA = *g.commodities.index_of({2, 1, 0});
  int cB = *g.commodities.index_of({2, 2, 0});

  QnsdState st = init_state(g);
  st.U[static_cast<size_t>(0) * K + cA] = 10.0;
  st.U[static_cast<size_t>(0) * K + cB] = 4.0;
  std::vector<double> budgets(static_cast<size_t>(g.n()) * K, 0.0);
  budgets[static_cast<size_t>(0) * K + cA] = 0.5;
  budgets[static_cast<size_t>(0) * K + cB] = 0.5;
  QnsdParams params;
  params.V = 1.0;
  node_assignment(st, g, 0, budgets, params);
  EXPECT_DOUBLE_EQ(st.resources[0], 1.0);
  EXPECT_DOUBLE_EQ(st.flows[static_cast<size_t>(0) * K + cA], 0.5);
  EXPECT_DOUBLE_EQ(st.flows[static_cast<size_t>(0) * K + cB], 0.5);
}

TEST(CqnsdRun, TwoNodeFixedPointIsFeasibleAndOptimal) {
  AugmentedGraph g = bundled_scenario("two-node").build();
  QnsdParams params;
  params.V = 50.0;
  params.theta = 0.9;
  params.max_iters = 10000;
  auto [sol, trace] = run_cqnsd(g, params);
  EXPECT_TRUE(sol.converged);
  EXPECT_TRUE(sol.integer_feasible);
  EXPECT_DOUBLE_EQ(sol.integer_cost, 2.0);

  // Fixed-point flows satisfy conservation exactly per the oracle.
  std::vector<double> res(sol.integer_resources.begin(), sol.integer_resources.end());
  FeasibilityReport rep = check_solution(g, sol.final_flows, res, 1e-9);
  EXPECT_LE(rep.max_abs_conservation, 1e-7);
  EXPECT_TRUE(rep.chaining_ok);
  EXPECT_TRUE(rep.capacity_ok);
  EXPECT_TRUE(rep.source_ok);
  EXPECT_TRUE(rep.sink_ok);

  // Integer cost dominates the relaxation optimum.
  LpSolution lp = solve_fractional_lp(g);
  ASSERT_EQ(lp.status, LpStatus::Optimal);
  EXPECT_GE(sol.integer_cost, lp.cost - 1e-9);
}

TEST(CqnsdRun, PerIterationInvariants) {
  AugmentedGraph g = line3().build();
  nsdp::testing::InvariantChecker check(g, /*cqnsd_mode=*/true);
  QnsdParams params;
  params.V = 20.0;
  params.theta = 0.9;
  params.max_iters = 3000;
  run_cqnsd(g, params, std::ref(check));
  EXPECT_EQ(check.failure(), "");
  EXPECT_GT(check.iterations_checked(), 0);
}

TEST(CqnsdRun, ZeroDemand) {
  AugmentedGraph g = nsdp::testing::zero_demand_instance().build();
  QnsdParams params;
  params.max_iters = 200;
  auto [sol, trace] = run_cqnsd(g, params);
  EXPECT_DOUBLE_EQ(sol.integer_cost, 0.0);
  EXPECT_TRUE(sol.integer_feasible);
}

TEST(CqnsdRun, DeterministicReruns) {
  AugmentedGraph g = line3().build();
  QnsdParams params;
  params.V = 30.0;
  params.max_iters = 2000;
  params.trace_every = 1;
  auto [sol1, tr1] = run_cqnsd(g, params);
  auto [sol2, tr2] = run_cqnsd(g, params);
  ASSERT_EQ(tr1.size(), tr2.size());
  for (size_t i = 0; i < tr1.size(); ++i)
    EXPECT_EQ(tr1[i].cost_avg, tr2[i].cost_avg);
  EXPECT_EQ(sol1.integer_resources, sol2.integer_resources);
  EXPECT_EQ(sol1.final_flows, sol2.final_flows);
}

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "edgemkt/errors.hpp"
#include "edgemkt/rng.hpp"
#include "edgemkt/routing.hpp"
#include "edgemkt/scenario.hpp"

using namespace edgemkt;

namespace {

EdgeServer server(int id, double x, double y, int start_slot, double bid) {
  EdgeServer e;
  e.id = id;
  e.loc = {x, y, 0.0};
  e.start_slot = start_slot;
  e.bid = bid;
  e.avg_price = bid;
  e.power_w = 10.0;
  e.compute_hz = 1e12;
  return e;
}

AgentPair vehicle(int capacity, double speed) {
  AgentPair a;
  a.uav_count = capacity;
  a.speed_mps = speed;
  a.uav_compute_hz = 1e10;
  a.power_move_w = 0.05;
  a.power_fly_w = 0.02;
  return a;
}

EconomyConfig cheap_economy() {
  EconomyConfig e;
  e.fly_base_s = 10.0;
  e.fly_per_task_s = 5.0;
  e.dispatch_s = 10.0;
  return e;
}

RouteGraph random_graph(std::uint64_t seed, int n_es) {
  ScenarioConfig c;
  c.n_es = n_es;
  c.n_ap = 1;
  c.n_hu = 0;
  c.n_mu = 0;
  const Scenario s = generate_scenario(c, seed);
  std::vector<int> demand;
  for (const auto& e : s.ess) demand.push_back(e.demand_series.back());
  return build_graph(s.aps.front(), s.ess, demand, c.economy, c.slot_seconds);
}

/** Best utility over every ordered subset of candidates, by plain permutation enumeration. */
double brute_force(const RouteGraph& g, const RewardFn& reward) {
  const int n = g.node_count() - 1;
  double best = 0.0;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> nodes;
    for (int s = 0; s < n; ++s)
      if (mask & (1 << s)) nodes.push_back(s + 1);
    do {
      try {
        best = std::max(best, evaluate_route(g, nodes, reward).utility);
      } catch (const ContractViolation&) {
      }
    } while (std::next_permutation(nodes.begin(), nodes.end()));
  }
  return best;
}

}  // namespace

TEST_CASE("graph construction") {
  const EconomyConfig econ;
  const AgentPair a = vehicle(5, 10.0);
  SUBCASE("empty server list") { CHECK(build_graph(a, {}, {}, econ, 30.0).node_count() == 1); }
  SUBCASE("source legs are distance over speed") {
    const RouteGraph g = build_graph(a, {server(0, 100, 0, 3, 5), server(1, 0, 200, 3, 5)}, {1, 1}, econ, 30.0);
    REQUIRE(g.node_count() == 3);
    CHECK(g.travel_s[0][1] == doctest::Approx(10.0));
    CHECK(g.travel_s[0][2] == doctest::Approx(20.0));
    CHECK(g.travel_s[1][2] == doctest::Approx(g.travel_s[2][1]));
  }
  SUBCASE("filter excluding everything") {
    const RouteGraph g = build_graph(a, {server(0, 100, 0, 3, 5)}, {1}, econ, 30.0,
                                     [](const EdgeServer&) { return false; });
    CHECK(g.node_count() == 1);
  }
  SUBCASE("filter keeps the matching subset with its demand") {
    const RouteGraph g = build_graph(a, {server(0, 100, 0, 3, 5), server(1, 0, 200, 3, 5)}, {4, 7}, econ, 30.0,
                                     [](const EdgeServer& e) { return e.id == 1; });
    REQUIRE(g.node_count() == 2);
    CHECK(g.ess[0].id == 1);
    CHECK(g.demand[0] == 7);
  }
}

TEST_CASE("feasible set") {
  const EconomyConfig econ;
  const AgentPair a = vehicle(5, 10.0);
  // Start times 90 s, 0 s and 30 s; travel times 10 s, 10 s and 50 s.
  const RouteGraph g =
      build_graph(a, {server(0, 100, 0, 3, 5), server(1, 0, 100, 0, 5), server(2, 500, 0, 1, 5)}, {1, 1, 1}, econ, 30.0);
  AntState st = initial_state(g);
  const auto J = feasible_set(g, st);
  std::vector<int> direct;
  for (int s = 1; s < g.node_count(); ++s)
    if (st.time_s + g.travel_s[0][static_cast<std::size_t>(s)] <= g.start_time_s(s)) direct.push_back(s);
  CHECK(J == direct);
  CHECK(J == std::vector<int>{1});
  st.capacity = 0;
  CHECK(feasible_set(g, st).empty());
}

TEST_CASE("transition probabilities") {
  const EconomyConfig econ;
  const AgentPair a = vehicle(5, 10.0);
  const RouteGraph g = build_graph(a, {server(0, 100, 0, 5, 5), server(1, 0, 100, 5, 5)}, {1, 1}, econ, 30.0);
  const AntState st = initial_state(g);
  const AcoParams p;
  Pheromone phi(3, std::vector<double>(3, 1.0));
  SUBCASE("symmetric candidates split evenly") {
    const auto pr = transition_probs(g, phi, st, p, {1, 2});
    CHECK(pr[0] == doctest::Approx(0.5));
    CHECK(pr[1] == doctest::Approx(0.5));
  }
  SUBCASE("pheromone ratio two to one") {
    phi[0][1] = 2.0;
    AcoParams only_pheromone = p;
    only_pheromone.eps_visibility = 0.0;
    only_pheromone.eps_slack = 0.0;
    for (const AcoParams& q : {p, only_pheromone}) {
      const auto pr = transition_probs(g, phi, st, q, {1, 2});
      CHECK(pr[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
      CHECK(pr[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
  }
  SUBCASE("single candidate gets all mass") { CHECK(transition_probs(g, phi, st, p, {2}) == std::vector<double>{1.0}); }
  SUBCASE("empty set is a contract violation") { CHECK_THROWS_AS(transition_probs(g, phi, st, p, {}), ContractViolation); }
}

TEST_CASE("transition distributions are valid on random states") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const RouteGraph g = random_graph(static_cast<std::uint64_t>(trial), 8);
    const auto n = static_cast<std::size_t>(g.node_count());
    Pheromone phi(n, std::vector<double>(n));
    for (auto& row : phi)
      for (double& v : row) v = rng.uniform(0.01, 5.0);
    AntState st = initial_state(g);
    for (;;) {
      const auto J = feasible_set(g, st);
      if (J.empty()) break;
      const auto pr = transition_probs(g, phi, st, AcoParams{}, J);
      double sum = 0.0;
      for (double v : pr) {
        REQUIRE(v >= 0.0);
        sum += v;
      }
      REQUIRE(std::abs(sum - 1.0) <= 1e-12);
      const int node = J[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(J.size()) - 1))];
      st.time_s += g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(node)] + g.economy.dispatch_s;
      st.capacity -= std::min(g.demand[static_cast<std::size_t>(node - 1)], st.capacity);
      st.visited[static_cast<std::size_t>(node)] = true;
      st.node = node;
    }
  }
}

TEST_CASE("slack width is floored at one slot") {
  const EconomyConfig econ;
  const RouteGraph g = build_graph(vehicle(5, 10.0), {server(0, 300, 0, 1, 5), server(1, 300, 0, 9, 5)}, {1, 1}, econ, 30.0);
  const AntState st = initial_state(g);
  CHECK(slack_width(g, st, 1) == 1.0);
  CHECK(slack_width(g, st, 2) == doctest::Approx((270.0 - 30.0) / 30.0));
}

TEST_CASE("leg utility") {
  EconomyConfig e;
  e.fly_base_s = 0.0;
  e.fly_per_task_s = 0.0;
  AgentPair zero;
  zero.uav_compute_hz = 0.0;
  CHECK(step_utility(zero, EdgeServer{}, 0, 0.0, 0.0, e) == 0.0);

  // c_move = 2 (20 s at 0.1 W), c_fly = 1 (10 s at 0.1 W), c_comp = 1 per task.
  AgentPair a;
  a.power_move_w = 0.1;
  a.power_fly_w = 0.1;
  a.uav_compute_hz = 1e10;
  EdgeServer es;
  es.power_w = 10.0;
  e.fly_base_s = 10.0;
  e.mean_task_cycles = 1e9;
  CHECK(step_utility(a, es, 3, 10.0, 20.0, e) == doctest::Approx(4.0));
  e.omega1 = 2.0;
  CHECK(step_utility(a, es, 3, 10.0, 20.0, e) == doctest::Approx(8.0));
  CHECK_THROWS_AS(step_utility(a, es, -1, 10.0, 20.0, e), ContractViolation);
}

TEST_CASE("route replay and per-route hardware cost") {
  const EconomyConfig econ = cheap_economy();
  const RouteGraph g = build_graph(vehicle(5, 10.0), {server(0, 100, 0, 5, 6), server(1, 200, 0, 8, 6)}, {2, 2}, econ, 30.0);
  const RewardFn reward = bid_reward(g);
  const Route r = evaluate_route(g, {1, 2}, reward);
  CHECK(r.visits == std::vector<int>{0, 1});
  CHECK(r.arrival_s[0] == doctest::Approx(10.0));
  CHECK(r.arrival_s[1] == doctest::Approx(10.0 + econ.dispatch_s + 10.0));
  CHECK(r.utility == doctest::Approx(r.leg_utility[0] + r.leg_utility[1] - econ.omega2 * econ.c_hard));
  CHECK(evaluate_route(g, {}, reward).utility == 0.0);
  CHECK(route_feasible(g, r));
  CHECK_THROWS_AS(evaluate_route(g, {1, 1}, reward), ContractViolation);
}

TEST_CASE("eaco degenerate instances") {
  const EconomyConfig econ = cheap_economy();
  const AgentPair a = vehicle(5, 10.0);
  SUBCASE("no servers") {
    const RouteGraph g = build_graph(a, {}, {}, econ, 30.0);
    CHECK(run_eaco(g, AcoParams{}, bid_reward(g), 1).empty());
    CHECK(oracle_best_route(g, bid_reward(g)).utility == 0.0);
  }
  SUBCASE("single profitable server") {
    const RouteGraph g = build_graph(a, {server(0, 100, 0, 5, 8)}, {3}, econ, 30.0);
    const Route r = run_eaco(g, AcoParams{}, bid_reward(g), 1);
    CHECK(r.visits == std::vector<int>{0});
    CHECK(r.tasks == std::vector<int>{3});
    CHECK(r.utility > 0.0);
  }
  SUBCASE("single server out of time reach") {
    const RouteGraph g = build_graph(a, {server(0, 900, 0, 0, 8)}, {3}, econ, 30.0);
    CHECK(run_eaco(g, AcoParams{}, bid_reward(g), 1).empty());
    const Route o = oracle_best_route(g, bid_reward(g));
    CHECK(o.empty());
    CHECK(o.utility == 0.0);
  }
  SUBCASE("invalid parameters") {
    const RouteGraph g = build_graph(a, {server(0, 100, 0, 5, 8)}, {3}, econ, 30.0);
    AcoParams p;
    p.evaporation = 1.0;
    CHECK_THROWS_AS(run_eaco(g, p, bid_reward(g), 1), ConfigError);
  }
}

TEST_CASE("oracle agrees with plain enumeration") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const RouteGraph g = random_graph(seed, 3 + static_cast<int>(seed % 3));
    const RewardFn reward = bid_reward(g);
    const Route o = oracle_best_route(g, reward);
    CHECK(o.utility == doctest::Approx(brute_force(g, reward)).epsilon(1e-12));
    CHECK(route_feasible(g, o));
  }
  CHECK_THROWS_AS(oracle_best_route(random_graph(1, 9), [](int, int) { return 1.0; }), ContractViolation);
}

TEST_CASE("eaco is deterministic, feasible and dominated by the oracle") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const RouteGraph g = random_graph(seed + 500, 6);
    const RewardFn reward = bid_reward(g);
    AcoParams p;
    p.iterations = 30;
    AcoTrace trace;
    const Route r = run_eaco(g, p, reward, seed, &trace);
    const Route again = run_eaco(g, p, reward, seed);
    CHECK(nlohmann::json(r).dump() == nlohmann::json(again).dump());
    CHECK(route_feasible(g, r));
    CHECK(r.utility <= oracle_best_route(g, reward).utility + 1e-9);
    CHECK(std::is_sorted(trace.best_so_far.begin(), trace.best_so_far.end()));
    CHECK(trace.min_pheromone >= std::pow(1.0 - p.evaporation, p.iterations) * p.pheromone0);
    CHECK(trace.min_pheromone > 0.0);
  }
}

TEST_CASE("returned routes are feasible over many runs") {
  AcoParams p;
  p.ants = 5;
  p.iterations = 5;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const RouteGraph g = random_graph(seed, 4 + static_cast<int>(seed % 5));
    const Route r = run_eaco(g, p, bid_reward(g), seed);
    REQUIRE(route_feasible(g, r));
    int used = 0;
    for (std::size_t i = 0; i < r.visits.size(); ++i) {
      REQUIRE(r.arrival_s[i] <= g.start_time_s(r.candidates[i] + 1));
      used += r.tasks[i];
    }
    REQUIRE(used <= g.ap.uav_count);
  }
}

TEST_CASE("greedy baseline is feasible") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const RouteGraph g = random_graph(seed, 6);
    const Route r = greedy_route(g, bid_reward(g));
    CHECK(route_feasible(g, r));
    CHECK(r.utility >= 0.0);
  }
}

TEST_CASE("route exports") {
  const RouteGraph g = build_graph(vehicle(5, 10.0), {server(0, 100, 0, 5, 8)}, {3}, cheap_economy(), 30.0);
  const Route r = run_eaco(g, AcoParams{}, bid_reward(g), 1);
  const nlohmann::json j = r;
  CHECK(j.at("visits").size() == 1);
  CHECK(route_dot(g, r).find("digraph") != std::string::npos);
  const AcoParams p = nlohmann::json(AcoParams{}).get<AcoParams>();
  CHECK(p.ants == AcoParams{}.ants);
}

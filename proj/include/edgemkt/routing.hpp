#pragma once
/**
 * Route planning for one agent pair: a directed complete graph over the
 * candidate edge servers, time-window and capacity feasibility, an ant
 * colony search with elite pheromone reinforcement, an exhaustive oracle
 * and a nearest-feasible greedy baseline.
 *
 * Times are seconds from the start of the offline stage. An edge server
 * with start slot t is reachable when the vehicle arrives no later than
 * t * slot_seconds; after arriving it dwells for dispatch_s seconds.
 */

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "edgemkt/scenario.hpp"

namespace edgemkt {

/** Money earned for serving n_tasks at a candidate (index into the graph's ES list). */
using RewardFn = std::function<double(int candidate, int n_tasks)>;

struct RouteGraph {
  AgentPair ap;
  std::vector<EdgeServer> ess;      ///< candidates; node s (s >= 1) is ess[s - 1]
  std::vector<int> demand;          ///< contractable tasks per candidate
  std::vector<std::vector<double>> travel_s;  ///< (|ess|+1)^2, node 0 = origin
  std::vector<std::vector<double>> dist_m;
  EconomyConfig economy;
  double slot_seconds = 30.0;
  double min_distance_m = 1.0;

  int node_count() const { return static_cast<int>(ess.size()) + 1; }
  double start_time_s(int node) const;
};

/** Keeps the ESs for which filter(es) is true (all when filter is empty). */
RouteGraph build_graph(const AgentPair& ap, const std::vector<EdgeServer>& ess, const std::vector<int>& demand,
                       const EconomyConfig& economy, double slot_seconds,
                       const std::function<bool(const EdgeServer&)>& filter = {});

struct AntState {
  int node = 0;
  double time_s = 0.0;
  int capacity = 0;
  std::vector<bool> visited;  ///< indexed by node
};

AntState initial_state(const RouteGraph& g);

/** Nodes an ant may move to next. */
std::vector<int> feasible_set(const RouteGraph& g, const AntState& st);

struct AcoParams {
  double eps_pheromone = 1.0;  ///< exponent on pheromone
  double eps_visibility = 2.0; ///< exponent on 1/distance
  double eps_slack = 1.0;      ///< exponent on 1/width
  double evaporation = 0.1;
  double pheromone0 = 1.0;
  int ants = 20;
  int iterations = 100;

  void validate() const;
};

using Pheromone = std::vector<std::vector<double>>;

/** Slack in slots between arrival at a node and its start, floored at one slot. */
double slack_width(const RouteGraph& g, const AntState& st, int node);

/** Transition distribution over feasible_set(g, st), in that order. */
std::vector<double> transition_probs(const RouteGraph& g, const Pheromone& phi, const AntState& st,
                                     const AcoParams& p, const std::vector<int>& feasible);

/** Per-leg utility: reward minus moving, flying and per-task compute costs, scaled by omega1. */
double step_utility(const AgentPair& ap, const EdgeServer& es, int n_tasks, double reward, double travel_s,
                    const EconomyConfig& economy);

struct Route {
  std::vector<int> visits;        ///< ES ids in visiting order
  std::vector<int> candidates;    ///< graph candidate indices in visiting order
  std::vector<double> arrival_s;
  std::vector<int> tasks;         ///< contracted tasks per visit
  std::vector<double> leg_utility;
  double utility = 0.0;           ///< sum of legs minus the per-route hardware cost; 0 when empty

  bool empty() const { return visits.empty(); }
};

/** Replays a visiting order (graph nodes) and evaluates it; throws ContractViolation when infeasible. */
Route evaluate_route(const RouteGraph& g, const std::vector<int>& nodes, const RewardFn& reward);

/** Checks arrival-before-start at every visit and the capacity budget. */
bool route_feasible(const RouteGraph& g, const Route& r);

struct AcoTrace {
  std::vector<double> best_so_far;  ///< per iteration
  double min_pheromone = 0.0;       ///< smallest entry seen after any update
};

Route run_eaco(const RouteGraph& g, const AcoParams& p, const RewardFn& reward, std::uint64_t seed,
               AcoTrace* trace = nullptr);

/** Exact best route by depth-first enumeration with time-window pruning; at most 8 candidates. */
Route oracle_best_route(const RouteGraph& g, const RewardFn& reward);

/** Repeatedly moves to the nearest feasible candidate; returns the best prefix. */
Route greedy_route(const RouteGraph& g, const RewardFn& reward);

/** Reward of es.bid per task. */
RewardFn bid_reward(const RouteGraph& g);

void to_json(nlohmann::json& j, const Route& r);
void to_json(nlohmann::json& j, const AcoParams& p);
void from_json(const nlohmann::json& j, AcoParams& p);

/** Graphviz rendering of a route over its graph. */
std::string route_dot(const RouteGraph& g, const Route& r);

}  // namespace edgemkt

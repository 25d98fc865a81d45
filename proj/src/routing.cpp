#include "edgemkt/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "edgemkt/errors.hpp"
#include "edgemkt/rng.hpp"

namespace edgemkt {

double RouteGraph::start_time_s(int node) const {
  require(node >= 1 && node < node_count(), "start_time_s: node out of range");
  return static_cast<double>(ess[static_cast<std::size_t>(node - 1)].start_slot) * slot_seconds;
}

RouteGraph build_graph(const AgentPair& ap, const std::vector<EdgeServer>& ess, const std::vector<int>& demand,
                       const EconomyConfig& economy, double slot_seconds,
                       const std::function<bool(const EdgeServer&)>& filter) {
  require(demand.size() == ess.size(), "build_graph: one demand entry per ES required");
  require(ap.speed_mps > 0.0, "build_graph: speed must be positive");
  RouteGraph g;
  g.ap = ap;
  g.economy = economy;
  g.slot_seconds = slot_seconds;
  for (std::size_t i = 0; i < ess.size(); ++i) {
    if (filter && !filter(ess[i])) continue;
    require(demand[i] >= 0, "build_graph: demand must be non-negative");
    g.ess.push_back(ess[i]);
    g.demand.push_back(demand[i]);
  }
  const int n = g.node_count();
  g.travel_s.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  g.dist_m = g.travel_s;
  auto loc = [&](int node) { return node == 0 ? ap.origin : g.ess[static_cast<std::size_t>(node - 1)].loc; };
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) {
      const double d = r == s ? 0.0 : distance2d(loc(r), loc(s));
      g.dist_m[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = d;
      g.travel_s[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = d / ap.speed_mps;
    }
  return g;
}

AntState initial_state(const RouteGraph& g) {
  AntState st;
  st.capacity = g.ap.uav_count;
  st.visited.assign(static_cast<std::size_t>(g.node_count()), false);
  st.visited[0] = true;
  return st;
}

namespace {

double arrival_at(const RouteGraph& g, const AntState& st, int node) {
  return st.time_s + g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(node)];
}

bool node_feasible(const RouteGraph& g, const AntState& st, int s) {
  return !st.visited[static_cast<std::size_t>(s)] && st.capacity > 0 && arrival_at(g, st, s) <= g.start_time_s(s);
}

int tasks_at(const RouteGraph& g, const AntState& st, int node) {
  return std::min(g.demand[static_cast<std::size_t>(node - 1)], st.capacity);
}

void advance(const RouteGraph& g, AntState& st, int node) {
  const int n = tasks_at(g, st, node);
  st.time_s = arrival_at(g, st, node) + g.economy.dispatch_s;
  st.capacity -= n;
  st.node = node;
  st.visited[static_cast<std::size_t>(node)] = true;
}

double route_cost(const EconomyConfig& e) { return e.omega2 * e.c_hard; }

/** Evaluates a node sequence that is known to be feasible and truncates it to its best prefix. */
Route best_prefix(const RouteGraph& g, const std::vector<int>& nodes, const RewardFn& reward) {
  Route full;
  AntState st = initial_state(g);
  double running = 0.0, best = 0.0;
  std::size_t best_len = 0;
  for (int node : nodes) {
    const EdgeServer& es = g.ess[static_cast<std::size_t>(node - 1)];
    const int n = tasks_at(g, st, node);
    const double travel = g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(node)];
    const double leg = step_utility(g.ap, es, n, reward(node - 1, n), travel, g.economy);
    full.visits.push_back(es.id);
    full.candidates.push_back(node - 1);
    full.arrival_s.push_back(arrival_at(g, st, node));
    full.tasks.push_back(n);
    full.leg_utility.push_back(leg);
    advance(g, st, node);
    running += leg;
    if (running - route_cost(g.economy) > best) {
      best = running - route_cost(g.economy);
      best_len = full.visits.size();
    }
  }
  full.visits.resize(best_len);
  full.candidates.resize(best_len);
  full.arrival_s.resize(best_len);
  full.tasks.resize(best_len);
  full.leg_utility.resize(best_len);
  full.utility = best;
  return full;
}

}  // namespace

std::vector<int> feasible_set(const RouteGraph& g, const AntState& st) {
  std::vector<int> out;
  for (int s = 1; s < g.node_count(); ++s)
    if (node_feasible(g, st, s)) out.push_back(s);
  return out;
}

void AcoParams::validate() const {
  if (eps_pheromone <= 0.0 || eps_visibility <= 0.0 || eps_slack <= 0.0)
    throw ConfigError("aco: exponents must be positive");
  if (!(evaporation > 0.0 && evaporation < 1.0)) throw ConfigError("aco: evaporation must lie in (0,1)");
  if (!(pheromone0 > 0.0)) throw ConfigError("aco: initial pheromone must be positive");
  if (ants < 1 || iterations < 1) throw ConfigError("aco: ants and iterations must be at least 1");
}

double slack_width(const RouteGraph& g, const AntState& st, int node) {
  const double slack = (g.start_time_s(node) - arrival_at(g, st, node)) / g.slot_seconds;
  return std::max(slack, 1.0);
}

namespace {

double pow_exp(double x, double e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  return std::pow(x, e);
}

void fill_transition_probs(const RouteGraph& g, const Pheromone& phi, const AntState& st, const AcoParams& p,
                           const std::vector<int>& feasible, std::vector<double>& w) {
  w.clear();
  double total = 0.0;
  for (int s : feasible) {
    const double d = std::max(g.dist_m[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(s)],
                              g.min_distance_m);
    const double v = pow_exp(phi[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(s)], p.eps_pheromone) *
                     pow_exp(1.0 / d, p.eps_visibility) * pow_exp(1.0 / slack_width(g, st, s), p.eps_slack);
    w.push_back(v);
    total += v;
  }
  for (double& v : w) v /= total;
}

/** Utility of the best prefix of a feasible node sequence, and that prefix's length. */
double best_prefix_utility(const RouteGraph& g, const std::vector<int>& nodes, const RewardFn& reward,
                           std::size_t& best_len) {
  AntState st = initial_state(g);
  double running = 0.0, best = 0.0;
  best_len = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int node = nodes[i];
    const int n = tasks_at(g, st, node);
    const double travel = g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(node)];
    running += step_utility(g.ap, g.ess[static_cast<std::size_t>(node - 1)], n, reward(node - 1, n), travel,
                            g.economy);
    advance(g, st, node);
    if (running - route_cost(g.economy) > best) {
      best = running - route_cost(g.economy);
      best_len = i + 1;
    }
  }
  return best;
}

}  // namespace

std::vector<double> transition_probs(const RouteGraph& g, const Pheromone& phi, const AntState& st,
                                     const AcoParams& p, const std::vector<int>& feasible) {
  require(!feasible.empty(), "transition_probs: empty feasible set");
  std::vector<double> w;
  w.reserve(feasible.size());
  fill_transition_probs(g, phi, st, p, feasible, w);
  return w;
}

double step_utility(const AgentPair& ap, const EdgeServer& es, int n_tasks, double reward, double travel_s,
                    const EconomyConfig& e) {
  require(n_tasks >= 0, "step_utility: n_tasks must be non-negative");
  const double c_move = travel_s * ap.power_move_w;
  const double fly_s = e.fly_base_s + e.fly_per_task_s * static_cast<double>(n_tasks);
  const double c_fly = fly_s * ap.power_fly_w;
  const double c_comp = ap.uav_compute_hz > 0.0 ? e.mean_task_cycles * es.power_w / ap.uav_compute_hz : 0.0;
  return e.omega1 * (reward - c_move - c_fly - static_cast<double>(n_tasks) * c_comp);
}

Route evaluate_route(const RouteGraph& g, const std::vector<int>& nodes, const RewardFn& reward) {
  Route r;
  AntState st = initial_state(g);
  double total = 0.0;
  for (int node : nodes) {
    require(node >= 1 && node < g.node_count(), "evaluate_route: node out of range");
    require(node_feasible(g, st, node), "evaluate_route: infeasible visit");
    const EdgeServer& es = g.ess[static_cast<std::size_t>(node - 1)];
    const int n = tasks_at(g, st, node);
    const double travel = g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(node)];
    const double leg = step_utility(g.ap, es, n, reward(node - 1, n), travel, g.economy);
    r.visits.push_back(es.id);
    r.candidates.push_back(node - 1);
    r.arrival_s.push_back(arrival_at(g, st, node));
    r.tasks.push_back(n);
    r.leg_utility.push_back(leg);
    total += leg;
    advance(g, st, node);
  }
  r.utility = nodes.empty() ? 0.0 : total - route_cost(g.economy);
  return r;
}

bool route_feasible(const RouteGraph& g, const Route& r) {
  if (r.visits.size() != r.candidates.size() || r.tasks.size() != r.visits.size()) return false;
  AntState st = initial_state(g);
  int used = 0;
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const int node = r.candidates[i] + 1;
    if (node < 1 || node >= g.node_count() || !node_feasible(g, st, node)) return false;
    if (arrival_at(g, st, node) > g.start_time_s(node)) return false;
    if (r.tasks[i] != tasks_at(g, st, node)) return false;
    used += r.tasks[i];
    advance(g, st, node);
  }
  return used <= g.ap.uav_count && st.capacity >= 0;
}

Route run_eaco(const RouteGraph& g, const AcoParams& p, const RewardFn& reward, std::uint64_t seed, AcoTrace* trace) {
  p.validate();
  const auto n = static_cast<std::size_t>(g.node_count());
  Pheromone phi(n, std::vector<double>(n, p.pheromone0));
  Route best;
  bool have_best = false;
  const Rng root = Rng(seed).split("eaco");
  if (trace) {
    trace->best_so_far.clear();
    trace->min_pheromone = p.pheromone0;
  }
  std::vector<int> path, feasible, elite_nodes;
  std::vector<double> probs;
  for (int it = 0; it < p.iterations; ++it) {
    const Rng iter_rng = root.split(static_cast<std::uint64_t>(it));
    double elite_utility = 0.0;
    bool have_elite = false;
    for (int a = 0; a < p.ants; ++a) {
      Rng rng = iter_rng.split(static_cast<std::uint64_t>(a));
      AntState st = initial_state(g);
      path.clear();
      for (;;) {
        feasible.clear();
        for (int s = 1; s < g.node_count(); ++s)
          if (node_feasible(g, st, s)) feasible.push_back(s);
        if (feasible.empty()) break;
        fill_transition_probs(g, phi, st, p, feasible, probs);
        int pick = rng.weighted_index(probs);
        if (pick < 0) pick = 0;
        const int node = feasible[static_cast<std::size_t>(pick)];
        path.push_back(node);
        advance(g, st, node);
      }
      std::size_t len = 0;
      const double u = best_prefix_utility(g, path, reward, len);
      if (!have_elite || u > elite_utility) {
        elite_utility = u;
        elite_nodes.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(len));
        have_elite = true;
      }
    }
    const Route elite = best_prefix(g, elite_nodes, reward);
    for (auto& row : phi)
      for (double& v : row) v *= (1.0 - p.evaporation);
    const double deposit = std::max(0.0, elite.utility);
    int prev = 0;
    for (int node : elite_nodes) {
      phi[static_cast<std::size_t>(prev)][static_cast<std::size_t>(node)] += deposit;
      prev = node;
    }
    if (!have_best || elite.utility > best.utility) {
      best = elite;
      have_best = true;
    }
    if (trace) {
      trace->best_so_far.push_back(best.utility);
      for (const auto& row : phi)
        for (double v : row) trace->min_pheromone = std::min(trace->min_pheromone, v);
    }
  }
  return best;
}

namespace {

struct OracleSearch {
  const RouteGraph& g;
  const RewardFn& reward;
  std::vector<int> path;
  std::vector<int> best_path;
  double best = 0.0;
  std::vector<double> optimistic;  ///< per node, an upper bound on any leg there

  void dfs(const AntState& st, double running) {
    double bound = running;
    for (int s = 1; s < g.node_count(); ++s)
      if (!st.visited[static_cast<std::size_t>(s)]) bound += std::max(0.0, optimistic[static_cast<std::size_t>(s)]);
    if (bound - route_cost(g.economy) <= best && !path.empty()) return;
    for (int s = 1; s < g.node_count(); ++s) {
      if (!node_feasible(g, st, s)) continue;
      const int n = tasks_at(g, st, s);
      const double travel = g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(s)];
      const double leg = step_utility(g.ap, g.ess[static_cast<std::size_t>(s - 1)], n, reward(s - 1, n), travel, g.economy);
      AntState next = st;
      advance(g, next, s);
      path.push_back(s);
      const double value = running + leg - route_cost(g.economy);
      if (value > best) {
        best = value;
        best_path = path;
      }
      dfs(next, running + leg);
      path.pop_back();
    }
  }
};

}  // namespace

Route oracle_best_route(const RouteGraph& g, const RewardFn& reward) {
  require(g.ess.size() <= 8, "oracle_best_route: at most 8 candidate ESs");
  OracleSearch s{g, reward, {}, {}, 0.0, {}};
  s.optimistic.assign(static_cast<std::size_t>(g.node_count()), 0.0);
  for (int node = 1; node < g.node_count(); ++node) {
    double hi = 0.0;
    const int cap_max = std::min(g.demand[static_cast<std::size_t>(node - 1)], g.ap.uav_count);
    for (int n = 0; n <= cap_max; ++n)
      hi = std::max(hi, step_utility(g.ap, g.ess[static_cast<std::size_t>(node - 1)], n, reward(node - 1, n), 0.0,
                                     g.economy));
    s.optimistic[static_cast<std::size_t>(node)] = hi;
  }
  s.dfs(initial_state(g), 0.0);
  return s.best_path.empty() ? Route{} : evaluate_route(g, s.best_path, reward);
}

Route greedy_route(const RouteGraph& g, const RewardFn& reward) {
  AntState st = initial_state(g);
  std::vector<int> path;
  for (;;) {
    const auto J = feasible_set(g, st);
    if (J.empty()) break;
    int pick = J.front();
    for (int s : J)
      if (g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(s)] <
          g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(pick)])
        pick = s;
    path.push_back(pick);
    advance(g, st, pick);
  }
  return best_prefix(g, path, reward);
}

RewardFn bid_reward(const RouteGraph& g) {
  return [&g](int candidate, int n) { return g.ess[static_cast<std::size_t>(candidate)].bid * n; };
}

void to_json(nlohmann::json& j, const Route& r) {
  j = nlohmann::json{{"visits", r.visits},
                     {"arrival_s", r.arrival_s},
                     {"tasks", r.tasks},
                     {"leg_utility", r.leg_utility},
                     {"utility", r.utility}};
}

void to_json(nlohmann::json& j, const AcoParams& p) {
  j = nlohmann::json{{"eps_pheromone", p.eps_pheromone}, {"eps_visibility", p.eps_visibility},
                     {"eps_slack", p.eps_slack},         {"evaporation", p.evaporation},
                     {"pheromone0", p.pheromone0},       {"ants", p.ants},
                     {"iterations", p.iterations}};
}

void from_json(const nlohmann::json& j, AcoParams& p) {
  AcoParams d;
  p.eps_pheromone = j.value("eps_pheromone", d.eps_pheromone);
  p.eps_visibility = j.value("eps_visibility", d.eps_visibility);
  p.eps_slack = j.value("eps_slack", d.eps_slack);
  p.evaporation = j.value("evaporation", d.evaporation);
  p.pheromone0 = j.value("pheromone0", d.pheromone0);
  p.ants = j.value("ants", d.ants);
  p.iterations = j.value("iterations", d.iterations);
}

std::string route_dot(const RouteGraph& g, const Route& r) {
  std::ostringstream out;
  out << "digraph route {\n  n0 [label=\"AP " << g.ap.id << "\", shape=box];\n";
  for (std::size_t i = 0; i < g.ess.size(); ++i)
    out << "  n" << i + 1 << " [label=\"ES " << g.ess[i].id << "\"];\n";
  int prev = 0;
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const int node = r.candidates[i] + 1;
    out << "  n" << prev << " -> n" << node << " [label=\"" << r.tasks[i] << "\"];\n";
    prev = node;
  }
  out << "}\n";
  return out.str();
}

}  // namespace edgemkt

#include "edgemkt/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "edgemkt/errors.hpp"
#include "edgemkt/rng.hpp"

namespace edgemkt {

void Market::validate() const {
  require(demand.size() == ess.size(), "market: one demand entry per ES required");
  for (std::size_t i = 0; i < ess.size(); ++i)
    require(ess[i].bid >= 0.0 && demand[i] >= 0, "market: bids and demands must be non-negative");
  for (const auto& ap : aps) require(ap.ask >= 0.0 && ap.uav_count >= 0, "market: asks and capacities must be non-negative");
}

Market make_market(const Scenario& s, const std::vector<int>& demand) {
  Market m;
  m.ess = s.ess;
  m.demand = demand;
  m.aps = s.aps;
  m.economy = s.config.economy;
  m.slot_seconds = s.config.slot_seconds;
  m.validate();
  return m;
}

PivotalRanks sort_and_pivot(const Market& m) {
  PivotalRanks r;
  r.buyers.resize(m.ess.size());
  std::iota(r.buyers.begin(), r.buyers.end(), 0);
  std::stable_sort(r.buyers.begin(), r.buyers.end(), [&](int a, int b) {
    const auto& ea = m.ess[static_cast<std::size_t>(a)];
    const auto& eb = m.ess[static_cast<std::size_t>(b)];
    return ea.bid != eb.bid ? ea.bid > eb.bid : ea.id < eb.id;
  });
  r.sellers.resize(m.aps.size());
  std::iota(r.sellers.begin(), r.sellers.end(), 0);
  std::stable_sort(r.sellers.begin(), r.sellers.end(), [&](int a, int b) {
    const auto& pa = m.aps[static_cast<std::size_t>(a)];
    const auto& pb = m.aps[static_cast<std::size_t>(b)];
    return pa.ask != pb.ask ? pa.ask < pb.ask : pa.id < pb.id;
  });
  long long cum_demand = 0;
  for (int I = 1; I <= static_cast<int>(r.buyers.size()); ++I) {
    const auto bi = static_cast<std::size_t>(r.buyers[static_cast<std::size_t>(I - 1)]);
    cum_demand += m.demand[bi];
    long long cum_cap = 0;
    int bestK = 0;
    for (int K = 1; K <= static_cast<int>(r.sellers.size()); ++K) {
      const auto& ap = m.aps[static_cast<std::size_t>(r.sellers[static_cast<std::size_t>(K - 1)])];
      cum_cap += ap.uav_count;
      if (m.ess[bi].bid >= ap.ask && cum_cap >= cum_demand) bestK = K;  // larger K, larger slack
    }
    if (bestK > 0) {
      r.I = I;
      r.K = bestK;
    }
  }
  return r;
}

void AuctionParams::validate() const {
  aco.validate();
  if (!(delta > 0.0)) throw ConfigError("auction: delta must be positive");
  if (monotone_probes < 0) throw ConfigError("auction: monotone_probes must be non-negative");
}

namespace {

std::uint64_t seller_seed(std::uint64_t seed, int ap_id) {
  return Rng(seed).split("match").split(static_cast<std::uint64_t>(ap_id)).seed();
}

/** Visits ESs in nearest-neighbour order from the AP origin, ignoring time windows. */
Route nearest_neighbour_route(const Market& m, const AgentPair& ap, std::vector<int> es_indices,
                              const std::vector<int>& tasks) {
  Route r;
  GeoPoint at = ap.origin;
  double t = 0.0;
  while (!es_indices.empty()) {
    auto it = std::min_element(es_indices.begin(), es_indices.end(), [&](int a, int b) {
      return distance2d(at, m.ess[static_cast<std::size_t>(a)].loc) < distance2d(at, m.ess[static_cast<std::size_t>(b)].loc);
    });
    const int i = *it;
    es_indices.erase(it);
    const auto& es = m.ess[static_cast<std::size_t>(i)];
    const double travel = distance2d(at, es.loc) / ap.speed_mps;
    t += travel;
    const int n = tasks[static_cast<std::size_t>(i)];
    r.visits.push_back(es.id);
    r.candidates.push_back(i);
    r.arrival_s.push_back(t);
    r.tasks.push_back(n);
    r.leg_utility.push_back(step_utility(ap, es, n, es.bid * n, travel, m.economy));
    t += m.economy.dispatch_s;
    at = es.loc;
  }
  if (!r.visits.empty())
    r.utility = std::accumulate(r.leg_utility.begin(), r.leg_utility.end(), 0.0) - m.economy.omega2 * m.economy.c_hard;
  return r;
}

}  // namespace

Matching match_winners(const Market& m, const PivotalRanks& ranks, const AuctionParams& p, std::uint64_t seed) {
  const std::size_t n_es = m.ess.size();
  Matching out;
  out.seller_of.assign(n_es, -1);
  out.tasks.assign(n_es, 0);
  out.on_time.assign(n_es, true);
  out.routes.assign(m.aps.size(), Route{});
  std::vector<bool> in_top(n_es, false);
  for (int r = 0; r < ranks.I; ++r) in_top[static_cast<std::size_t>(ranks.buyers[static_cast<std::size_t>(r)])] = true;

  for (int rk = 0; rk < ranks.K; ++rk) {
    const int k = ranks.sellers[static_cast<std::size_t>(rk)];
    const AgentPair& ap = m.aps[static_cast<std::size_t>(k)];
    auto candidate = [&](std::size_t i) {
      return in_top[i] && out.seller_of[i] < 0 && m.demand[i] > 0 && m.ess[i].bid - ap.ask > 0.0;
    };
    if (p.rule == MatchRule::Routed) {
      std::vector<EdgeServer> cand;
      std::vector<int> cand_index, cand_demand;
      for (std::size_t i = 0; i < n_es; ++i)
        if (candidate(i)) {
          cand.push_back(m.ess[i]);
          cand_index.push_back(static_cast<int>(i));
          cand_demand.push_back(m.demand[i]);
        }
      if (cand.empty()) continue;
      RouteGraph g = build_graph(ap, cand, cand_demand, m.economy, m.slot_seconds);
      Route route = run_eaco(g, p.aco, bid_reward(g), seller_seed(seed, ap.id));
      for (std::size_t v = 0; v < route.candidates.size(); ++v) {
        const auto i = static_cast<std::size_t>(cand_index[static_cast<std::size_t>(route.candidates[v])]);
        route.candidates[v] = static_cast<int>(i);
        out.seller_of[i] = k;
        out.tasks[i] = route.tasks[v];
      }
      out.routes[static_cast<std::size_t>(k)] = std::move(route);
    } else {
      int remaining = ap.uav_count;
      std::vector<int> chosen;
      for (int r = 0; r < ranks.I && remaining > 0; ++r) {
        const auto i = static_cast<std::size_t>(ranks.buyers[static_cast<std::size_t>(r)]);
        if (!candidate(i)) continue;
        const int n = std::min(m.demand[i], remaining);
        remaining -= n;
        out.seller_of[i] = k;
        out.tasks[i] = n;
        chosen.push_back(static_cast<int>(i));
      }
      Route route = nearest_neighbour_route(m, ap, chosen, out.tasks);
      for (std::size_t v = 0; v < route.candidates.size(); ++v) {
        const auto i = static_cast<std::size_t>(route.candidates[v]);
        out.on_time[i] = route.arrival_s[v] <= static_cast<double>(m.ess[i].start_slot) * m.slot_seconds;
      }
      out.routes[static_cast<std::size_t>(k)] = std::move(route);
    }
  }
  return out;
}

Matching allocate(const Market& m, const AuctionParams& p, std::uint64_t seed) {
  return match_winners(m, sort_and_pivot(m), p, seed);
}

namespace {

/** Probe memo over integer grid indices. */
struct GridProbe {
  double lo, hi, delta;
  int J;
  std::map<int, bool> seen;
  std::function<bool(double)> wins;

  GridProbe(double lo_, double hi_, double delta_, std::function<bool(double)> f)
      : lo(lo_), hi(hi_), delta(delta_), J(0), wins(std::move(f)) {
    J = hi > lo ? static_cast<int>(std::ceil((hi - lo) / delta - 1e-9)) : 0;
  }
  double value(int j) const { return j >= J ? hi : lo + static_cast<double>(j) * delta; }
  bool at(int j) {
    auto it = seen.find(j);
    if (it != seen.end()) return it->second;
    const bool w = wins(value(j));
    seen.emplace(j, w);
    return w;
  }
  int probes() const { return static_cast<int>(seen.size()); }
};

/** Evenly spaced grid indices in [a, b], at most count of them. */
std::vector<int> spread(int a, int b, int count) {
  std::vector<int> out;
  if (b < a || count <= 0) return out;
  const int n = std::min(count, b - a + 1);
  for (int s = 0; s < n; ++s) {
    const int j = n == 1 ? a : a + static_cast<int>(std::llround(static_cast<double>(s) * (b - a) / (n - 1)));
    if (out.empty() || out.back() != j) out.push_back(j);
  }
  return out;
}

}  // namespace

PriceSearch price_buyer(const Market& m, const PivotalRanks& ranks, int es_index, const AuctionParams& p,
                        std::uint64_t seed) {
  const auto i = static_cast<std::size_t>(es_index);
  PriceSearch s;
  s.upper = m.ess[i].bid;
  s.lower = ranks.I < static_cast<int>(ranks.buyers.size())
                ? m.ess[static_cast<std::size_t>(ranks.buyers[static_cast<std::size_t>(ranks.I)])].bid
                : 0.0;
  s.lower = std::min(s.lower, s.upper);
  Market probe = m;
  GridProbe g(s.lower, s.upper, p.delta, [&](double b) {
    probe.ess[i].bid = b;
    return allocate(probe, p, seed).seller_of[i] >= 0;
  });
  g.seen.emplace(g.J, true);  // the reference run
  int lose = -1, win = g.J;
  if (g.J > 0 && g.at(0)) win = 0;
  else lose = 0;
  while (win - lose > 1) {
    const int mid = lose + (win - lose) / 2;
    (g.at(mid) ? win : lose) = mid;
  }
  bool monotone = true;
  for (int j : spread(0, win - 1, p.monotone_probes)) monotone = monotone && !g.at(j);
  for (int j : spread(win + 1, g.J - 1, p.monotone_probes)) monotone = monotone && g.at(j);
  s.price = g.value(win);
  if (!monotone) {
    s.quarantined = true;
    s.note = "non-monotone win region";
    int closure = g.J;
    for (auto it = g.seen.rbegin(); it != g.seen.rend() && it->second; ++it) closure = it->first;
    s.price = g.value(closure);
  }
  s.probes = g.probes() - 1;
  return s;
}

PriceSearch price_seller(const Market& m, const PivotalRanks& ranks, int ap_index, double buyer_cap,
                         const AuctionParams& p, std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(ap_index);
  PriceSearch s;
  s.lower = m.aps[k].ask;
  double hi = 0.0;
  if (ranks.K < static_cast<int>(ranks.sellers.size())) {
    hi = m.aps[static_cast<std::size_t>(ranks.sellers[static_cast<std::size_t>(ranks.K)])].ask;
  } else {
    for (const auto& es : m.ess) hi = std::max(hi, es.bid);
  }
  s.upper = std::min(hi, buyer_cap);
  if (s.upper < s.lower) {
    s.price = s.lower;
    s.quarantined = true;
    s.note = "empty price band";
    return s;
  }
  Market probe = m;
  GridProbe g(s.lower, s.upper, p.delta, [&](double a) {
    probe.aps[k].ask = a;
    const Matching mt = allocate(probe, p, seed);
    return std::find(mt.seller_of.begin(), mt.seller_of.end(), ap_index) != mt.seller_of.end();
  });
  g.seen.emplace(0, true);  // the reference run
  int win = 0, lose = g.J + 1;
  if (g.J > 0 && g.at(g.J)) win = g.J;
  else if (g.J > 0) lose = g.J;
  while (lose - win > 1) {
    const int mid = win + (lose - win) / 2;
    (g.at(mid) ? win : lose) = mid;
  }
  bool monotone = true;
  for (int j : spread(1, win - 1, p.monotone_probes)) monotone = monotone && g.at(j);
  for (int j : spread(win + 1, g.J, p.monotone_probes)) monotone = monotone && !g.at(j);
  s.price = g.value(win);
  if (!monotone) {
    s.quarantined = true;
    s.note = "non-monotone win region";
    int closure = 0;
    for (auto it = g.seen.begin(); it != g.seen.end() && it->second; ++it) closure = it->first;
    s.price = g.value(closure);
  }
  s.probes = g.probes() - 1;
  return s;
}

AuctionOutcome run_auction(const Market& m, const AuctionParams& p, std::uint64_t seed, const PricingScope& scope) {
  m.validate();
  p.validate();
  AuctionOutcome o;
  o.ranks = sort_and_pivot(m);
  o.matching = match_winners(m, o.ranks, p, seed);
  const std::size_t n_es = m.ess.size(), n_ap = m.aps.size();
  o.payment.assign(n_es, 0.0);
  o.reward.assign(n_ap, 0.0);
  o.buyer_search.assign(n_es, PriceSearch{});
  o.seller_search.assign(n_ap, PriceSearch{});

  std::vector<bool> seller_won(n_ap, false);
  for (std::size_t i = 0; i < n_es; ++i)
    if (o.matching.seller_of[i] >= 0) {
      seller_won[static_cast<std::size_t>(o.matching.seller_of[i])] = true;
      ++o.winners;
    }
  for (std::size_t k = 0; k < n_ap; ++k) o.winners += seller_won[k] ? 1 : 0;

  auto want_buyer = [&](std::size_t i) {
    if (scope.all) return true;
    if (scope.es_index >= 0 && static_cast<std::size_t>(scope.es_index) == i) return true;
    return scope.ap_index >= 0 && o.matching.seller_of[i] == scope.ap_index;
  };
  for (std::size_t i = 0; i < n_es; ++i) {
    if (o.matching.seller_of[i] < 0 || !want_buyer(i)) continue;
    o.buyer_search[i] = price_buyer(m, o.ranks, static_cast<int>(i), p, seed);
    o.payment[i] = o.buyer_search[i].price;
  }
  for (std::size_t k = 0; k < n_ap; ++k) {
    if (!seller_won[k] || !(scope.all || scope.ap_index == static_cast<int>(k))) continue;
    double cap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_es; ++i)
      if (o.matching.seller_of[i] == static_cast<int>(k)) cap = std::min(cap, o.payment[i]);
    o.seller_search[k] = price_seller(m, o.ranks, static_cast<int>(k), cap, p, seed);
    o.reward[k] = o.seller_search[k].price;
  }
  for (const auto& s : o.buyer_search) {
    o.probe_batches = std::max(o.probe_batches, s.probes);
    o.quarantined += s.quarantined ? 1 : 0;
  }
  for (const auto& s : o.seller_search) {
    o.probe_batches = std::max(o.probe_batches, s.probes);
    o.quarantined += s.quarantined ? 1 : 0;
  }
  for (std::size_t k = 0; k < n_ap; ++k) {
    for (int i : o.matching.routes[k].candidates) {
      const auto ii = static_cast<std::size_t>(i);
      if (o.matching.seller_of[ii] != static_cast<int>(k)) continue;
      Contract c;
      c.es_index = i;
      c.ap_index = static_cast<int>(k);
      c.es_id = m.ess[ii].id;
      c.ap_id = m.aps[k].id;
      c.tasks = o.matching.tasks[ii];
      c.payment = o.payment[ii];
      c.reward = o.reward[k];
      c.delivered = o.matching.on_time[ii];
      o.contracts.push_back(c);
    }
  }
  return o;
}

AuctionOutcome random_contracts(const Market& m, std::uint64_t seed) {
  m.validate();
  const std::size_t n_es = m.ess.size(), n_ap = m.aps.size();
  AuctionOutcome o;
  o.ranks = sort_and_pivot(m);
  o.matching.seller_of.assign(n_es, -1);
  o.matching.tasks.assign(n_es, 0);
  o.matching.on_time.assign(n_es, true);
  o.matching.routes.assign(n_ap, Route{});
  o.payment.assign(n_es, 0.0);
  o.reward.assign(n_ap, 0.0);
  o.buyer_search.assign(n_es, PriceSearch{});
  o.seller_search.assign(n_ap, PriceSearch{});
  Rng rng = Rng(seed).split("random-contracts");
  std::vector<int> order(n_ap);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (int k : order) {
    const AgentPair& ap = m.aps[static_cast<std::size_t>(k)];
    std::vector<EdgeServer> cand;
    std::vector<int> cand_index, cand_demand;
    for (std::size_t i = 0; i < n_es; ++i)
      if (o.matching.seller_of[i] < 0 && m.demand[i] > 0) {
        cand.push_back(m.ess[i]);
        cand_index.push_back(static_cast<int>(i));
        cand_demand.push_back(m.demand[i]);
      }
    if (cand.empty()) continue;
    RouteGraph g = build_graph(ap, cand, cand_demand, m.economy, m.slot_seconds);
    AntState st = initial_state(g);
    std::vector<int> nodes;
    for (;;) {
      const auto J = feasible_set(g, st);
      if (J.empty()) break;
      const int node = J[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(J.size()) - 1))];
      nodes.push_back(node);
      st.time_s += g.travel_s[static_cast<std::size_t>(st.node)][static_cast<std::size_t>(node)] + m.economy.dispatch_s;
      st.capacity -= std::min(g.demand[static_cast<std::size_t>(node - 1)], st.capacity);
      st.visited[static_cast<std::size_t>(node)] = true;
      st.node = node;
    }
    Route route = evaluate_route(g, nodes, bid_reward(g));
    for (std::size_t v = 0; v < route.candidates.size(); ++v) {
      const auto i = static_cast<std::size_t>(cand_index[static_cast<std::size_t>(route.candidates[v])]);
      route.candidates[v] = static_cast<int>(i);
      o.matching.seller_of[i] = k;
      o.matching.tasks[i] = route.tasks[v];
      o.payment[i] = m.ess[i].bid;
      Contract c;
      c.es_index = static_cast<int>(i);
      c.ap_index = k;
      c.es_id = m.ess[i].id;
      c.ap_id = ap.id;
      c.tasks = route.tasks[v];
      c.payment = m.ess[i].bid;
      c.reward = m.ess[i].bid;
      o.contracts.push_back(c);
    }
    if (!route.empty()) ++o.winners;
    o.matching.routes[static_cast<std::size_t>(k)] = std::move(route);
  }
  o.winners += static_cast<int>(o.contracts.size());
  return o;
}

OfflineWelfare offline_welfare(const AuctionOutcome& o, const Market& m) {
  OfflineWelfare w;
  w.es_utility.assign(m.ess.size(), 0.0);
  w.ap_utility.assign(m.aps.size(), 0.0);
  std::map<int, const Contract*> by_es;
  for (const auto& c : o.contracts) by_es[c.es_index] = &c;
  for (const auto& c : o.contracts) {
    if (!c.delivered) continue;
    const auto& es = m.ess[static_cast<std::size_t>(c.es_index)];
    w.es_utility[static_cast<std::size_t>(c.es_index)] += c.tasks * (es.avg_price - c.payment);
    w.auctioneer += c.tasks * (c.payment - c.reward);
  }
  for (std::size_t k = 0; k < m.aps.size() && k < o.matching.routes.size(); ++k) {
    const Route& r = o.matching.routes[k];
    if (r.candidates.empty()) continue;
    const AgentPair& ap = m.aps[k];
    GeoPoint at = ap.origin;
    double total = 0.0;
    for (std::size_t v = 0; v < r.candidates.size(); ++v) {
      const auto& es = m.ess[static_cast<std::size_t>(r.candidates[v])];
      const auto it = by_es.find(r.candidates[v]);
      const Contract* c = it == by_es.end() ? nullptr : it->second;
      const double earned = c && c->delivered ? c->reward * c->tasks : 0.0;
      total += step_utility(ap, es, r.tasks[v], earned, distance2d(at, es.loc) / ap.speed_mps, m.economy);
      at = es.loc;
    }
    w.ap_utility[k] = total - m.economy.omega2 * m.economy.c_hard;
  }
  w.social = w.auctioneer;
  for (double u : w.es_utility) w.social += u;
  for (double u : w.ap_utility) w.social += u;
  return w;
}

AuditReport audit(const AuctionOutcome& o, const Market& m) {
  AuditReport rep;
  std::vector<int> used(m.aps.size(), 0);
  std::vector<int> matched(m.ess.size(), 0);
  for (const auto& c : o.contracts) {
    const auto& es = m.ess[static_cast<std::size_t>(c.es_index)];
    const auto& ap = m.aps[static_cast<std::size_t>(c.ap_index)];
    std::ostringstream msg;
    if (c.payment > es.bid) {
      rep.ir_buyers = false;
      msg << "ES " << es.id << " pays " << c.payment << " above its bid " << es.bid;
      rep.violations.push_back(msg.str());
      msg.str("");
    }
    if (c.reward < ap.ask) {
      rep.ir_sellers = false;
      msg << "AP " << ap.id << " receives " << c.reward << " below its ask " << ap.ask;
      rep.violations.push_back(msg.str());
      msg.str("");
    }
    used[static_cast<std::size_t>(c.ap_index)] += c.tasks;
    ++matched[static_cast<std::size_t>(c.es_index)];
    rep.auctioneer_surplus += c.tasks * (c.payment - c.reward);
  }
  if (rep.auctioneer_surplus < 0.0) {
    rep.budget_balance = false;
    rep.violations.push_back("auctioneer surplus " + std::to_string(rep.auctioneer_surplus) + " is negative");
  }
  for (std::size_t k = 0; k < m.aps.size(); ++k)
    if (used[k] > m.aps[k].uav_count) {
      rep.capacity = false;
      rep.violations.push_back("AP " + std::to_string(m.aps[k].id) + " contracted " + std::to_string(used[k]) +
                               " tasks over capacity " + std::to_string(m.aps[k].uav_count));
    }
  for (std::size_t i = 0; i < m.ess.size(); ++i)
    if (matched[i] > 1) {
      rep.single_match = false;
      rep.violations.push_back("ES " + std::to_string(m.ess[i].id) + " matched more than once");
    }
  return rep;
}

std::vector<SweepPoint> deviation_sweep(const Market& m, const AuctionParams& p, std::uint64_t seed, Side side,
                                        int index, const std::vector<double>& grid) {
  if (side == Side::Buyer)
    require(index >= 0 && index < static_cast<int>(m.ess.size()), "deviation_sweep: ES index out of range");
  else
    require(index >= 0 && index < static_cast<int>(m.aps.size()), "deviation_sweep: AP index out of range");
  std::vector<SweepPoint> out;
  for (double report : grid) {
    Market dev = m;
    PricingScope scope;
    scope.all = false;
    SweepPoint pt;
    pt.report = report;
    if (side == Side::Buyer) {
      dev.ess[static_cast<std::size_t>(index)].bid = report;
      scope.es_index = index;
      const AuctionOutcome o = run_auction(dev, p, seed, scope);
      const auto i = static_cast<std::size_t>(index);
      pt.won = o.matching.seller_of[i] >= 0;
      if (pt.won) {
        pt.price = o.payment[i];
        pt.utility = o.matching.tasks[i] * (m.ess[i].avg_price - pt.price);
      }
    } else {
      dev.aps[static_cast<std::size_t>(index)].ask = report;
      scope.ap_index = index;
      const AuctionOutcome o = run_auction(dev, p, seed, scope);
      const auto k = static_cast<std::size_t>(index);
      int tasks = 0;
      for (std::size_t i = 0; i < m.ess.size(); ++i)
        if (o.matching.seller_of[i] == index) tasks += o.matching.tasks[i];
      pt.won = tasks > 0;
      if (pt.won) {
        pt.price = o.reward[k];
        pt.utility = tasks * (pt.price - m.aps[k].ask);
      }
    }
    out.push_back(pt);
  }
  return out;
}

void to_json(nlohmann::json& j, const Market& m) {
  j = nlohmann::json::object();
  auto& buyers = j["buyers"] = nlohmann::json::array();
  for (std::size_t i = 0; i < m.ess.size(); ++i)
    buyers.push_back({{"es_id", m.ess[i].id}, {"bid", m.ess[i].bid}, {"avg_price", m.ess[i].avg_price},
                      {"demand", m.demand[i]}, {"start_slot", m.ess[i].start_slot}});
  auto& sellers = j["sellers"] = nlohmann::json::array();
  for (const auto& ap : m.aps) sellers.push_back({{"ap_id", ap.id}, {"ask", ap.ask}, {"capacity", ap.uav_count}});
}

void to_json(nlohmann::json& j, const AuctionOutcome& o) {
  j = nlohmann::json::object();
  j["pivot"] = {{"I", o.ranks.I}, {"K", o.ranks.K}};
  auto& cs = j["contracts"] = nlohmann::json::array();
  for (const auto& c : o.contracts)
    cs.push_back({{"es_id", c.es_id}, {"ap_id", c.ap_id}, {"tasks", c.tasks}, {"payment", c.payment},
                  {"reward", c.reward}, {"delivered", c.delivered}});
  auto& routes = j["routes"] = nlohmann::json::array();
  for (const auto& r : o.matching.routes) routes.push_back(r);
  j["probe_batches"] = o.probe_batches;
  j["quarantined"] = o.quarantined;
  j["winners"] = o.winners;
}

void to_json(nlohmann::json& j, const AuditReport& r) {
  j = nlohmann::json{{"ir_buyers", r.ir_buyers},
                     {"ir_sellers", r.ir_sellers},
                     {"budget_balance", r.budget_balance},
                     {"capacity", r.capacity},
                     {"single_match", r.single_match},
                     {"auctioneer_surplus", r.auctioneer_surplus},
                     {"violations", r.violations}};
}

}  // namespace edgemkt

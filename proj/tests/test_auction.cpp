#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "edgemkt/auction.hpp"
#include "edgemkt/errors.hpp"
#include "edgemkt/rng.hpp"

using namespace edgemkt;

namespace {

EdgeServer buyer(int id, double bid, double x = 100.0, double y = 0.0) {
  EdgeServer e;
  e.id = id;
  e.bid = bid;
  e.avg_price = bid;
  e.loc = {x, y, 0.0};
  e.start_slot = 10;
  e.power_w = 10.0;
  e.compute_hz = 1e12;
  return e;
}

AgentPair seller(int id, double ask, int capacity) {
  AgentPair a;
  a.id = id;
  a.ask = ask;
  a.uav_count = capacity;
  a.speed_mps = 20.0;
  a.uav_compute_hz = 1e11;
  a.power_move_w = 0.01;
  a.power_fly_w = 0.01;
  return a;
}

Market hand_market(const std::vector<EdgeServer>& ess, const std::vector<int>& demand,
                   const std::vector<AgentPair>& aps) {
  Market m;
  m.ess = ess;
  m.demand = demand;
  m.aps = aps;
  m.economy.fly_base_s = 5.0;
  m.economy.fly_per_task_s = 1.0;
  m.economy.dispatch_s = 5.0;
  m.economy.c_hard = 0.1;
  return m;
}

Market random_market(std::uint64_t seed, int n_es, int n_ap) {
  ScenarioConfig c;
  c.n_es = n_es;
  c.n_ap = n_ap;
  c.n_hu = 0;
  c.n_mu = 0;
  const Scenario s = generate_scenario(c, seed);
  std::vector<int> demand;
  for (const auto& e : s.ess) demand.push_back(e.demand_series.back());
  return make_market(s, demand);
}

AuctionParams fast_params() {
  AuctionParams p;
  p.aco.ants = 8;
  p.aco.iterations = 20;
  p.delta = 0.01;
  return p;
}

/** Independent pivot oracle: scan every (I, K) pair on freshly sorted copies. */
std::pair<int, int> pivot_oracle(const Market& m) {
  std::vector<int> b(m.ess.size()), s(m.aps.size());
  std::iota(b.begin(), b.end(), 0);
  std::iota(s.begin(), s.end(), 0);
  std::stable_sort(b.begin(), b.end(), [&](int x, int y) {
    const auto &ex = m.ess[static_cast<std::size_t>(x)], &ey = m.ess[static_cast<std::size_t>(y)];
    return ex.bid != ey.bid ? ex.bid > ey.bid : ex.id < ey.id;
  });
  std::stable_sort(s.begin(), s.end(), [&](int x, int y) {
    const auto &ax = m.aps[static_cast<std::size_t>(x)], &ay = m.aps[static_cast<std::size_t>(y)];
    return ax.ask != ay.ask ? ax.ask < ay.ask : ax.id < ay.id;
  });
  int best_i = 0, best_k = 0;
  long best_slack = -1;
  for (int I = 1; I <= static_cast<int>(b.size()); ++I)
    for (int K = 1; K <= static_cast<int>(s.size()); ++K) {
      long dem = 0, cap = 0;
      for (int i = 0; i < I; ++i) dem += m.demand[static_cast<std::size_t>(b[static_cast<std::size_t>(i)])];
      for (int k = 0; k < K; ++k) cap += m.aps[static_cast<std::size_t>(s[static_cast<std::size_t>(k)])].uav_count;
      const double bid = m.ess[static_cast<std::size_t>(b[static_cast<std::size_t>(I - 1)])].bid;
      const double ask = m.aps[static_cast<std::size_t>(s[static_cast<std::size_t>(K - 1)])].ask;
      if (bid < ask || cap < dem) continue;
      if (I > best_i || (I == best_i && cap - dem > best_slack)) {
        best_i = I;
        best_k = K;
        best_slack = cap - dem;
      }
    }
  return {best_i, best_k};
}

}  // namespace

TEST_CASE("pivot examples") {
  SUBCASE("no crossing") {
    const Market m = hand_market({buyer(0, 3), buyer(1, 2)}, {1, 1}, {seller(0, 5, 4), seller(1, 6, 4)});
    const PivotalRanks r = sort_and_pivot(m);
    CHECK(r.I == 0);
    CHECK(r.K == 0);
    CHECK(match_winners(m, r, fast_params(), 1).routes.size() == m.aps.size());
    CHECK(run_auction(m, fast_params(), 1).contracts.empty());
  }
  SUBCASE("single crossing pair") {
    const PivotalRanks r = sort_and_pivot(hand_market({buyer(0, 10)}, {5}, {seller(0, 5, 10)}));
    CHECK(r.I == 1);
    CHECK(r.K == 1);
  }
  SUBCASE("three buyers, two sellers") {
    const Market m = hand_market({buyer(0, 10), buyer(1, 8), buyer(2, 3)}, {2, 2, 2}, {seller(0, 4, 3), seller(1, 6, 3)});
    const PivotalRanks r = sort_and_pivot(m);
    CHECK(r.I == 2);
    CHECK(r.K == 2);
    CHECK(r.buyers == std::vector<int>{0, 1, 2});
    CHECK(r.sellers == std::vector<int>{0, 1});
  }
  SUBCASE("ties sort by id") {
    const Market m = hand_market({buyer(3, 5), buyer(1, 5)}, {1, 1}, {seller(2, 1, 4), seller(0, 1, 4)});
    const PivotalRanks r = sort_and_pivot(m);
    CHECK(r.buyers == std::vector<int>{1, 0});
    CHECK(r.sellers == std::vector<int>{1, 0});
  }
}

TEST_CASE("pivot maximality against the exhaustive oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n_es = static_cast<int>(rng.uniform_int(0, 20));
    const int n_ap = static_cast<int>(rng.uniform_int(0, 20));
    Market m;
    for (int i = 0; i < n_es; ++i) {
      m.ess.push_back(buyer(i, std::round(rng.uniform(1, 9))));
      m.demand.push_back(static_cast<int>(rng.uniform_int(0, 6)));
    }
    for (int k = 0; k < n_ap; ++k)
      m.aps.push_back(seller(k, std::round(rng.uniform(1, 9)), static_cast<int>(rng.uniform_int(1, 10))));
    const PivotalRanks r = sort_and_pivot(m);
    const auto [I, K] = pivot_oracle(m);
    REQUIRE(r.I == I);
    REQUIRE(r.K == K);
  }
}

TEST_CASE("matching small markets") {
  const AuctionParams p = fast_params();
  SUBCASE("one buyer one seller") {
    const Market m = hand_market({buyer(0, 10)}, {5}, {seller(0, 5, 8)});
    const Matching x = allocate(m, p, 1);
    CHECK(x.seller_of == std::vector<int>{0});
    CHECK(x.tasks == std::vector<int>{5});
    CHECK(x.on_time[0]);
  }
  SUBCASE("two buyers routed by the same seller") {
    const Market m = hand_market({buyer(0, 10, 100, 0), buyer(1, 9, 200, 0)}, {2, 2}, {seller(0, 5, 6)});
    const Matching x = allocate(m, p, 1);
    CHECK(x.seller_of == std::vector<int>{0, 0});
    const RouteGraph g = build_graph(m.aps[0], m.ess, m.demand, m.economy, m.slot_seconds);
    CHECK(route_feasible(g, x.routes[0]));
    CHECK(x.routes[0].utility == doctest::Approx(oracle_best_route(g, bid_reward(g)).utility));
  }
  SUBCASE("price-greedy rule ignores time windows and flags late arrivals") {
    EdgeServer late = buyer(1, 9, 900, 0);
    late.start_slot = 0;
    const Market m = hand_market({buyer(0, 10, 100, 0), late}, {2, 2}, {seller(0, 5, 6)});
    AuctionParams g = p;
    g.rule = MatchRule::PriceGreedy;
    const Matching x = allocate(m, g, 1);
    CHECK(x.seller_of == std::vector<int>{0, 0});
    CHECK(x.on_time[0]);
    CHECK_FALSE(x.on_time[1]);
    CHECK(allocate(m, p, 1).seller_of[1] == -1);
  }
}

TEST_CASE("critical prices on a single crossing pair") {
  const AuctionParams p = fast_params();
  const Market m = hand_market({buyer(0, 10)}, {2}, {seller(0, 5, 4)});
  const PivotalRanks r = sort_and_pivot(m);
  // Candidates need a strictly positive bid-ask margin, so both thresholds sit one grid step inside.
  const PriceSearch pb = price_buyer(m, r, 0, p, 1);
  CHECK(std::abs(pb.price - 5.0) <= p.delta + 1e-9);
  CHECK_FALSE(pb.quarantined);
  const PriceSearch raw = price_seller(m, r, 0, std::numeric_limits<double>::infinity(), p, 1);
  CHECK(std::abs(raw.price - 10.0) <= p.delta + 1e-9);
  const AuctionOutcome o = run_auction(m, p, 1);
  REQUIRE(o.contracts.size() == 1);
  const Contract& c = o.contracts[0];
  CHECK(m.aps[0].ask <= c.reward);
  CHECK(c.reward <= c.payment + 1e-12);
  CHECK(c.payment <= m.ess[0].bid);
  CHECK(std::abs(c.payment - 5.0) <= p.delta + 1e-9);
}

TEST_CASE("buyer at the lower bound keeps the lower bound") {
  const AuctionParams p = fast_params();
  // Buyer 1 bids 6 and is excluded by capacity, so buyer 0's interval is [6, 6].
  const Market m = hand_market({buyer(0, 6), buyer(1, 6)}, {2, 2}, {seller(0, 1, 2)});
  const PivotalRanks r = sort_and_pivot(m);
  REQUIRE(r.I == 1);
  const PriceSearch pb = price_buyer(m, r, 0, p, 1);
  CHECK(pb.lower == doctest::Approx(6.0));
  CHECK(pb.price == doctest::Approx(6.0));
}

TEST_CASE("random markets satisfy every outcome invariant") {
  const AuctionParams p = fast_params();
  int quarantined = 0, winners = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Market m = random_market(seed, 1 + static_cast<int>(seed % 12), 1 + static_cast<int>(seed % 7));
    const AuctionOutcome o = run_auction(m, p, seed);
    const AuditReport rep = audit(o, m);
    CHECK(rep.ir_buyers);
    CHECK(rep.ir_sellers);
    CHECK(rep.capacity);
    CHECK(rep.single_match);
    if (o.clean()) CHECK(rep.budget_balance);
    quarantined += o.quarantined;
    winners += o.winners;
    for (const auto& c : o.contracts) {
      CHECK(m.ess[static_cast<std::size_t>(c.es_index)].bid >= m.aps[static_cast<std::size_t>(c.ap_index)].ask);
      const bool monotone = !o.buyer_search[static_cast<std::size_t>(c.es_index)].quarantined &&
                            !o.seller_search[static_cast<std::size_t>(c.ap_index)].quarantined;
      if (monotone) CHECK(c.reward <= c.payment + 1e-12);
    }
    CHECK(nlohmann::json(o).dump() == nlohmann::json(run_auction(m, p, seed)).dump());
  }
  CHECK(quarantined <= winners);
}

TEST_CASE("twelve by seven market") {
  const Market m = random_market(99, 12, 7);
  const AuctionOutcome o = run_auction(m, fast_params(), 3);
  CHECK(audit(o, m).ok());
  CHECK_FALSE(o.contracts.empty());
}

TEST_CASE("offline welfare") {
  Market m = hand_market({buyer(0, 5)}, {2}, {seller(0, 3, 4)});
  m.ess[0].avg_price = 6.0;
  AuctionOutcome empty;
  const OfflineWelfare zero = offline_welfare(empty, m);
  CHECK(zero.social == 0.0);
  CHECK(zero.auctioneer == 0.0);

  AuctionOutcome o = run_auction(m, fast_params(), 1);
  REQUIRE(o.contracts.size() == 1);
  o.contracts[0].payment = 4.0;
  o.contracts[0].reward = 3.5;
  const OfflineWelfare w = offline_welfare(o, m);
  CHECK(w.es_utility[0] == doctest::Approx(4.0));
  CHECK(w.auctioneer == doctest::Approx(1.0));
  CHECK(w.social == doctest::Approx(w.es_utility[0] + w.ap_utility[0] + w.auctioneer));
  o.contracts[0].delivered = false;
  CHECK(offline_welfare(o, m).es_utility[0] == 0.0);
}

TEST_CASE("audit detects injected violations") {
  const Market m = hand_market({buyer(0, 10)}, {2}, {seller(0, 5, 4)});
  CHECK(audit(AuctionOutcome{}, m).ok());
  AuctionOutcome o = run_auction(m, fast_params(), 1);
  REQUIRE(audit(o, m).ok());
  o.contracts[0].payment = 11.0;
  const AuditReport rep = audit(o, m);
  CHECK_FALSE(rep.ir_buyers);
  CHECK(rep.ir_sellers);
  CHECK(rep.violations.size() == 1);
}

TEST_CASE("random contracts stay feasible") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Market m = random_market(seed, 10, 3);
    const AuctionOutcome o = random_contracts(m, seed);
    const AuditReport rep = audit(o, m);
    CHECK(rep.capacity);
    CHECK(rep.single_match);
    for (const auto& c : o.contracts) {
      CHECK(c.tasks > 0);
      CHECK(c.payment == c.reward);
    }
    for (std::size_t k = 0; k < m.aps.size(); ++k) {
      const RouteGraph g = build_graph(m.aps[k], m.ess, m.demand, m.economy, m.slot_seconds);
      CHECK(route_feasible(g, o.matching.routes[k]));
    }
  }
}

TEST_CASE("deviation sweeps") {
  const AuctionParams p = fast_params();
  const Market m = random_market(7, 12, 7);
  const AuctionOutcome truthful = run_auction(m, p, 5);
  int buyer = -1;
  for (std::size_t i = 0; i < m.ess.size(); ++i)
    if (truthful.matching.seller_of[i] >= 0) buyer = static_cast<int>(i);
  REQUIRE(buyer >= 0);

  SUBCASE("a truthful grid reproduces the truthful run") {
    const auto pts = deviation_sweep(m, p, 5, Side::Buyer, buyer, {m.ess[static_cast<std::size_t>(buyer)].bid});
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].won);
    CHECK(pts[0].price == doctest::Approx(truthful.payment[static_cast<std::size_t>(buyer)]));
  }
  SUBCASE("buyer winning threshold sits at the critical payment") {
    const double bid = m.ess[static_cast<std::size_t>(buyer)].bid;
    const double step = p.delta;
    std::vector<double> grid;
    for (double v = 0.0; v <= bid + 1e-9; v += step) grid.push_back(v);
    const auto pts = deviation_sweep(m, p, 5, Side::Buyer, buyer, grid);
    double threshold = bid;
    for (const auto& pt : pts)
      if (pt.won) {
        threshold = pt.report;
        break;
      }
    CHECK(std::abs(threshold - truthful.payment[static_cast<std::size_t>(buyer)]) <= step + 1e-9);
  }
}

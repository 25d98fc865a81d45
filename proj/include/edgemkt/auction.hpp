#pragma once
/**
 * Sealed-bid double auction between edge servers (buyers) and agent pairs
 * (sellers): pivotal ranks over the sorted lists, route-aware matching,
 * critical-value pricing by binary search over re-runs, offline welfare,
 * economic audits and unilateral deviation sweeps.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "edgemkt/routing.hpp"
#include "edgemkt/scenario.hpp"

namespace edgemkt {

struct Market {
  std::vector<EdgeServer> ess;  ///< buyers; bid and avg_price per ES
  std::vector<int> demand;      ///< predicted tasks per ES, same order as ess
  std::vector<AgentPair> aps;   ///< sellers; ask and uav_count (task capacity)
  EconomyConfig economy;
  double slot_seconds = 30.0;

  void validate() const;
};

Market make_market(const Scenario& s, const std::vector<int>& demand);

/** Sorted orders (indices into the market) and the pivotal prefix lengths. */
struct PivotalRanks {
  int I = 0;
  int K = 0;
  std::vector<int> buyers;   ///< ES indices by bid descending, ties by id
  std::vector<int> sellers;  ///< AP indices by ask ascending, ties by id
};

PivotalRanks sort_and_pivot(const Market& m);

enum class MatchRule {
  Routed,       ///< ant-colony route per seller over its candidate set
  PriceGreedy,  ///< highest bids first, nearest-neighbour visiting order, time windows ignored
};

struct AuctionParams {
  AcoParams aco;
  MatchRule rule = MatchRule::Routed;
  double delta = 1e-3;      ///< pricing grid step
  int monotone_probes = 4;  ///< extra grid probes per side used to detect non-monotone win regions

  void validate() const;
};

/** Allocation produced by the matching step. */
struct Matching {
  std::vector<int> seller_of;  ///< per ES index: AP index or -1
  std::vector<int> tasks;      ///< per ES index
  std::vector<bool> on_time;   ///< per ES index: the AP arrives no later than the start slot
  std::vector<Route> routes;   ///< per AP index
};

Matching match_winners(const Market& m, const PivotalRanks& ranks, const AuctionParams& p, std::uint64_t seed);

/** Pivot plus matching on a market; the closure re-run by the pricing searches. */
Matching allocate(const Market& m, const AuctionParams& p, std::uint64_t seed);

struct PriceSearch {
  double price = 0.0;
  double lower = 0.0;      ///< search interval
  double upper = 0.0;
  int probes = 0;          ///< re-runs performed
  bool quarantined = false;
  std::string note;
};

/** Smallest winning bid of matched ES i on the delta grid. */
PriceSearch price_buyer(const Market& m, const PivotalRanks& ranks, int es_index, const AuctionParams& p,
                        std::uint64_t seed);

/**
 * Largest winning ask of matched AP k on the delta grid. The upper end is
 * also capped by the smallest critical payment among k's buyers, keeping the
 * reward inside the price band; an empty band is quarantined.
 */
PriceSearch price_seller(const Market& m, const PivotalRanks& ranks, int ap_index, double buyer_cap,
                         const AuctionParams& p, std::uint64_t seed);

struct Contract {
  int es_index = -1;
  int ap_index = -1;
  int es_id = -1;
  int ap_id = -1;
  int tasks = 0;
  double payment = 0.0;  ///< per task, paid by the ES
  double reward = 0.0;   ///< per task, received by the AP
  bool delivered = true;
};

struct AuctionOutcome {
  PivotalRanks ranks;
  Matching matching;
  std::vector<double> payment;  ///< per ES index, 0 when unmatched
  std::vector<double> reward;   ///< per AP index, 0 when unmatched
  std::vector<PriceSearch> buyer_search;   ///< per ES index
  std::vector<PriceSearch> seller_search;  ///< per AP index
  std::vector<Contract> contracts;
  int probe_batches = 0;  ///< lock-step pricing rounds (longest search)
  int quarantined = 0;    ///< winners whose price came from a quarantined search
  int winners = 0;        ///< matched buyers plus matched sellers

  bool clean() const { return quarantined == 0; }
};

/** Which agents the pricing stage computes; others keep price 0. */
struct PricingScope {
  bool all = true;
  int es_index = -1;
  int ap_index = -1;
};

AuctionOutcome run_auction(const Market& m, const AuctionParams& p, std::uint64_t seed,
                           const PricingScope& scope = {});

/**
 * Baseline allocation: every AP, in random order, follows a random feasible
 * route over still-unmatched ESs with positive demand until its capacity is
 * used. Both sides settle at the ES's bid.
 */
AuctionOutcome random_contracts(const Market& m, std::uint64_t seed);

struct OfflineWelfare {
  std::vector<double> es_utility;
  std::vector<double> ap_utility;
  double auctioneer = 0.0;
  double social = 0.0;
};

OfflineWelfare offline_welfare(const AuctionOutcome& o, const Market& m);

struct AuditReport {
  bool ir_buyers = true;
  bool ir_sellers = true;
  bool budget_balance = true;
  bool capacity = true;
  bool single_match = true;
  double auctioneer_surplus = 0.0;
  std::vector<std::string> violations;

  bool ok() const { return ir_buyers && ir_sellers && budget_balance && capacity && single_match; }
};

AuditReport audit(const AuctionOutcome& o, const Market& m);

enum class Side { Buyer, Seller };

struct SweepPoint {
  double report = 0.0;
  double utility = 0.0;
  bool won = false;
  double price = 0.0;
};

/**
 * Re-runs the auction with one agent's report replaced by each grid value.
 * Utility is measured against the true value (avg_price for a buyer) or
 * true cost (ask for a seller) held in the unmodified market.
 */
std::vector<SweepPoint> deviation_sweep(const Market& m, const AuctionParams& p, std::uint64_t seed, Side side,
                                        int index, const std::vector<double>& grid);

void to_json(nlohmann::json& j, const Market& m);
void to_json(nlohmann::json& j, const AuctionOutcome& o);
void to_json(nlohmann::json& j, const AuditReport& r);

}  // namespace edgemkt

#include <algorithm>

#include "doctest.h"
#include "edgemkt/errors.hpp"
#include "edgemkt/metrics.hpp"

using namespace edgemkt;

TEST_CASE("an empty ledger totals zero") {
  const InteractionLedger l;
  CHECK(l.total_delay_us() == 0);
  CHECK(l.total_energy_nj() == 0);
  CHECK(l.doi_ms() == 0.0);
  CHECK(l.ecoi_j() == 0.0);
  CHECK(l.csv() == "stage,kind,delay_us,power_mw,energy_nj\n");
}

TEST_CASE("energy is delay times power") {
  InteractionLedger l;
  record_exact(l, Stage::Offline, InteractionKind::Bid, 10000, 10000);
  CHECK(l.total_energy_nj() == 100000000);
  CHECK(l.ecoi_j() == doctest::Approx(0.1));
  CHECK(l.doi_ms() == doctest::Approx(10.0));
  record_exact(l, Stage::Online, InteractionKind::BrdQuery, 2000, 6000);
  CHECK(l.total_delay_us(true) == 2000);
  CHECK(l.total_energy_nj(true) == 12000000);
  CHECK(l.count(Stage::Offline) == 1);
  CHECK(l.count(Stage::Online) == 1);
  CHECK_THROWS_AS(record_exact(l, Stage::Online, InteractionKind::Ask, -1, 5), ContractViolation);
}

TEST_CASE("random entries stay in range and average near the midpoint") {
  InteractionLedger l;
  Rng rng(17);
  record_n(l, Stage::Online, InteractionKind::Assign, 1000, rng);
  REQUIRE(l.entries.size() == 1000);
  for (const auto& e : l.entries) {
    CHECK(e.delay_us >= 1000);
    CHECK(e.delay_us <= 15000);
    CHECK(e.power_mw >= 6000);
    CHECK(e.power_mw <= 20000);
  }
  const double mean_ms = l.doi_ms() / 1000.0;
  CHECK(mean_ms >= 7.0);
  CHECK(mean_ms <= 9.0);
}

TEST_CASE("totals are invariant under reordering") {
  InteractionLedger l;
  Rng rng(3);
  record_n(l, Stage::Offline, InteractionKind::Probe, 50, rng);
  record_n(l, Stage::Online, InteractionKind::BrdQuery, 50, rng);
  const auto d = l.total_delay_us(), e = l.total_energy_nj(), od = l.total_delay_us(true);
  std::reverse(l.entries.begin(), l.entries.end());
  std::rotate(l.entries.begin(), l.entries.begin() + 17, l.entries.end());
  CHECK(l.total_delay_us() == d);
  CHECK(l.total_energy_nj() == e);
  CHECK(l.total_delay_us(true) == od);
}

TEST_CASE("summaries use the population standard deviation") {
  TrialResult a, b;
  a.pipeline = b.pipeline = "FUSION";
  a.welfare = 1.0;
  b.welfare = 3.0;
  a.doi_ms = b.doi_ms = 5.0;
  const ExperimentReport r = summarize({a, b});
  CHECK(r.pipeline == "FUSION");
  CHECK(r.trials == 2);
  CHECK(r.welfare.mean == 2.0);
  CHECK(r.welfare.std == 1.0);
  CHECK(r.doi_ms.std == 0.0);
  CHECK_THROWS_AS(summarize({}), InputError);

  nlohmann::json j = r;
  CHECK(j["welfare_mean"] == 2.0);
  CHECK(j["trials"] == 2);
}

#include "edgemkt/metrics.hpp"

#include <cmath>
#include <sstream>

#include "edgemkt/errors.hpp"

namespace edgemkt {

const char* to_string(Stage s) { return s == Stage::Offline ? "offline" : "online"; }

const char* to_string(InteractionKind k) {
  switch (k) {
    case InteractionKind::Bid: return "bid";
    case InteractionKind::Ask: return "ask";
    case InteractionKind::Probe: return "probe";
    case InteractionKind::BrdQuery: return "brd-query";
    case InteractionKind::Assign: return "assign";
    case InteractionKind::Contract: return "contract";
  }
  return "unknown";
}

std::int64_t InteractionLedger::total_delay_us(bool online_only) const {
  std::int64_t t = 0;
  for (const auto& e : entries)
    if (!online_only || e.stage == Stage::Online) t += e.delay_us;
  return t;
}

std::int64_t InteractionLedger::total_energy_nj(bool online_only) const {
  std::int64_t t = 0;
  for (const auto& e : entries)
    if (!online_only || e.stage == Stage::Online) t += e.energy_nj();
  return t;
}

std::size_t InteractionLedger::count(Stage s) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.stage == s ? 1 : 0;
  return n;
}

std::string InteractionLedger::csv() const {
  std::ostringstream os;
  os << "stage,kind,delay_us,power_mw,energy_nj\n";
  for (const auto& e : entries)
    os << to_string(e.stage) << ',' << to_string(e.kind) << ',' << e.delay_us << ',' << e.power_mw << ','
       << e.energy_nj() << '\n';
  return os.str();
}

void record_exact(InteractionLedger& ledger, Stage stage, InteractionKind kind, std::int64_t delay_us,
                  std::int64_t power_mw) {
  require(delay_us >= 0 && power_mw >= 0, "record: delay and power must be non-negative");
  ledger.entries.push_back({stage, kind, delay_us, power_mw});
}

void record(InteractionLedger& ledger, Stage stage, InteractionKind kind, Rng& rng) {
  const std::int64_t delay = rng.uniform_int(1000, 15000);
  const std::int64_t power = rng.uniform_int(6000, 20000);
  record_exact(ledger, stage, kind, delay, power);
}

void record_n(InteractionLedger& ledger, Stage stage, InteractionKind kind, long n, Rng& rng) {
  for (long i = 0; i < n; ++i) record(ledger, stage, kind, rng);
}

Aggregate aggregate(const std::vector<double>& v) {
  Aggregate a;
  if (v.empty()) return a;
  double s = 0.0;
  for (double x : v) s += x;
  a.mean = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - a.mean) * (x - a.mean);
  a.std = std::sqrt(ss / static_cast<double>(v.size()));
  return a;
}

ExperimentReport summarize(const std::vector<TrialResult>& trials) {
  if (trials.empty()) throw InputError("summarize: no trials");
  ExperimentReport r;
  r.pipeline = trials.front().pipeline;
  r.trials = trials.size();
  std::vector<double> w, d, e;
  for (const auto& t : trials) {
    w.push_back(t.welfare);
    d.push_back(t.doi_ms);
    e.push_back(t.ecoi_j);
  }
  r.welfare = aggregate(w);
  r.doi_ms = aggregate(d);
  r.ecoi_j = aggregate(e);
  return r;
}

void to_json(nlohmann::json& j, const TrialResult& t) {
  j = nlohmann::json{{"pipeline", t.pipeline},
                     {"seed", t.seed},
                     {"welfare", t.welfare},
                     {"offline_welfare", t.offline_welfare},
                     {"online_potential", t.online_potential},
                     {"doi_ms", t.doi_ms},
                     {"ecoi_j", t.ecoi_j},
                     {"interactions", t.interactions},
                     {"contracts", t.contracts},
                     {"brd_rounds", t.brd_rounds},
                     {"converged", t.converged}};
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  j = nlohmann::json{{"pipeline", r.pipeline},
                     {"trials", r.trials},
                     {"welfare_mean", r.welfare.mean},
                     {"welfare_std", r.welfare.std},
                     {"doi_ms_mean", r.doi_ms.mean},
                     {"doi_ms_std", r.doi_ms.std},
                     {"ecoi_j_mean", r.ecoi_j.mean},
                     {"ecoi_j_std", r.ecoi_j.std}};
}

}  // namespace edgemkt

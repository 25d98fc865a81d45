#pragma once
/**
 * Interaction accounting across both stages and Monte-Carlo aggregation.
 *
 * Counting rule: one entry per submitted bid or ask, per lock-step pricing
 * probe batch, per contract signature, per online best-response evaluation
 * (one query and its reply) and per random-assignment request. Delays are
 * held in integer microseconds and powers in integer milliwatts, so energy
 * is an exact integer number of nanojoules.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "edgemkt/rng.hpp"

namespace edgemkt {

enum class Stage { Offline, Online };
enum class InteractionKind { Bid, Ask, Probe, BrdQuery, Assign, Contract };

const char* to_string(Stage s);
const char* to_string(InteractionKind k);

struct LedgerEntry {
  Stage stage = Stage::Offline;
  InteractionKind kind = InteractionKind::Bid;
  std::int64_t delay_us = 0;
  std::int64_t power_mw = 0;

  std::int64_t energy_nj() const { return delay_us * power_mw; }
};

struct InteractionLedger {
  std::vector<LedgerEntry> entries;

  std::int64_t total_delay_us(bool online_only = false) const;
  std::int64_t total_energy_nj(bool online_only = false) const;
  double doi_ms() const { return static_cast<double>(total_delay_us()) / 1e3; }
  double ecoi_j() const { return static_cast<double>(total_energy_nj()) / 1e9; }
  std::size_t count(Stage s) const;
  std::string csv() const;
};

/** Delay drawn uniformly in [1, 15] ms and power uniformly in [6, 20] W, at integer resolution. */
void record(InteractionLedger& ledger, Stage stage, InteractionKind kind, Rng& rng);
void record_n(InteractionLedger& ledger, Stage stage, InteractionKind kind, long n, Rng& rng);

/** Appends an entry with explicit delay and power. */
void record_exact(InteractionLedger& ledger, Stage stage, InteractionKind kind, std::int64_t delay_us,
                  std::int64_t power_mw);

struct TrialResult {
  std::string pipeline;
  std::uint64_t seed = 0;
  double welfare = 0.0;
  double offline_welfare = 0.0;
  double online_potential = 0.0;
  double doi_ms = 0.0;
  double ecoi_j = 0.0;
  long interactions = 0;
  int contracts = 0;
  int brd_rounds = 0;
  bool converged = true;
};

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation
};

Aggregate aggregate(const std::vector<double>& v);

struct ExperimentReport {
  std::string pipeline;
  std::size_t trials = 0;
  Aggregate welfare, doi_ms, ecoi_j;
};

/** Throws InputError when trials is empty. */
ExperimentReport summarize(const std::vector<TrialResult>& trials);

void to_json(nlohmann::json& j, const TrialResult& t);
void to_json(nlohmann::json& j, const ExperimentReport& r);

}  // namespace edgemkt

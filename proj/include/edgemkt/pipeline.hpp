#pragma once
/**
 * End-to-end experiment pipelines: demand forecasting, the offline auction
 * with route planning, deployment of contracted UAVs as online providers,
 * online scheduling, and interaction accounting. Five pipeline variants
 * differ in the offline allocation rule and the online scheduler.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "edgemkt/auction.hpp"
#include "edgemkt/forecast.hpp"
#include "edgemkt/metrics.hpp"
#include "edgemkt/online_game.hpp"
#include "edgemkt/scenario.hpp"

namespace edgemkt {

enum class OfflineRule { None, Auction, GreedyAuction, RandomContracts };
enum class OnlineRule { BestResponse, RandomAssignment };

struct PipelineSpec {
  std::string name;
  bool forecast = true;
  OfflineRule offline = OfflineRule::Auction;
  OnlineRule online = OnlineRule::BestResponse;
};

/** Accepts FUSION, FUSION_NoPG, FUSION_Random, FUSION_NoST and PurOnline; throws ConfigError otherwise. */
PipelineSpec pipeline_spec(const std::string& name);
const std::vector<std::string>& pipeline_names();

/** Light forecaster used inside pipelines. */
TrainConfig pipeline_forecast_defaults();

struct ExperimentConfig {
  ScenarioConfig scenario;
  AuctionParams auction;
  TrainConfig forecast = pipeline_forecast_defaults();
  BrdParams brd;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ExperimentConfig& c);

struct TrialDetail {
  TrialResult result;
  std::vector<int> predicted_demand;
  std::vector<int> realized_demand;
  AuctionOutcome outcome;
  OfflineWelfare offline;
  OnlineInstance instance;
  Profile profile;
  BrdResult brd;
  InteractionLedger ledger;
};

/** Forecasts each ES's demand at the online round from the preceding history. */
std::vector<int> forecast_demand(const Scenario& s, const TrainConfig& cfg, std::uint64_t seed);

/**
 * Runs one trial. `forecast`, when given, must equal forecast_demand(s, cfg.forecast, seed); sweeps pass it
 * so that pipelines sharing a trial train the forecaster once.
 */
TrialDetail run_pipeline(const Scenario& s, const PipelineSpec& spec, const ExperimentConfig& cfg,
                         std::uint64_t seed, const std::vector<int>* forecast = nullptr);

enum class SweepAxis { EsCount, Population };
SweepAxis sweep_axis(const std::string& name);

struct SweepCell {
  std::string axis;
  int value = 0;
  ExperimentReport report;
  std::vector<TrialResult> trials;
};

/**
 * For each axis value and trial, one scenario seed shared by every listed
 * pipeline. Population sets both the human and the machine user counts.
 */
std::vector<SweepCell> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<int>& values, int trials,
                             const std::vector<std::string>& pipelines, std::uint64_t seed);

std::string sweep_csv(const std::vector<SweepCell>& cells);
std::string trials_csv(const std::vector<TrialResult>& trials);

/** Seed of trial t under a base seed. */
std::uint64_t trial_seed(std::uint64_t seed, int trial);

}  // namespace edgemkt

#pragma once
/**
 * Domain model of the edge-service market, seeded scenario generation,
 * demand-trace ingestion and the radio link model.
 */

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace edgemkt {

struct GeoPoint {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;
};

double distance2d(const GeoPoint& a, const GeoPoint& b);
double distance3d(const GeoPoint& a, const GeoPoint& b);

/** Closed real interval [lo, hi]. */
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/** Closed integer interval [lo, hi]. */
struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct EdgeServer {
  int id = 0;
  int start_slot = 0;
  double compute_hz = 0.0;  ///< f^E
  double power_w = 0.0;     ///< e^E
  int subcarrier_cap = 1;   ///< G
  GeoPoint loc;
  double avg_price = 0.0;  ///< p-bar, money per task
  double bid = 0.0;        ///< submitted per-task bid, never above avg_price
  std::vector<int> demand_series;
};

struct AgentPair {
  int id = 0;
  int uav_count = 1;      ///< C^A, also the task budget
  double uav_compute_hz = 0.0;
  double power_comp_w = 0.0;
  double power_move_w = 0.0;
  double power_fly_w = 0.0;
  int per_uav_cap = 1;    ///< G^A
  GeoPoint origin;
  double speed_mps = 1.0;
  double ask = 0.0;       ///< money per task
};

enum class UserKind { Human, Machine };

struct ServiceDemander {
  int id = 0;
  UserKind kind = UserKind::Human;
  double tx_power_w = 0.0;
  double workload_cycles = 0.0;
  double data_bits = 0.0;
  double local_hz = 1.0;
  double local_power_w = 0.0;
  GeoPoint loc;
  int home_es = -1;
  std::vector<int> coverage;  ///< ES ids within the coverage radius
  double deadline_s = 0.0;    ///< machine users only
  double reward = 0.0;        ///< machine users only
};

struct ChannelConfig {
  double bandwidth_hz = 50e6;
  double ref_snr_db = 66.8;       ///< SNR at 1 W transmit power and ref distance
  double ref_distance_m = 1.0;
  double path_loss_exponent = 2.0;
  double min_distance_m = 1.0;
  double uav_los_bonus_db = 2.0;
};

/** Valuation and cost coefficients shared by offline and online stages. */
struct EconomyConfig {
  double v_time_hu = 1.0;      ///< V^H_t, money per second saved
  double v_energy_hu = 0.5;    ///< V^H_e, money per joule saved
  double v_energy_mu = 0.05;   ///< V^M_e
  double omega1 = 1.0;
  double omega2 = 1.0;
  double c_hard = 1.0;
  double tariff = 0.0;          ///< rho, money per cycle
  double mean_task_cycles = 1e9;  ///< r-bar used by the per-task compute cost
  double fly_base_s = 60.0;
  double fly_per_task_s = 20.0;
  double dispatch_s = 20.0;      ///< dwell time at each visited ES
};

struct ScenarioConfig {
  int n_es = 10;
  int n_ap = 3;
  int n_hu = 40;
  int n_mu = 40;
  double region_w = 1000.0;
  double region_h = 1000.0;
  int slots = 12;
  double slot_seconds = 30.0;
  int history = 96;       ///< length of each generated demand series
  int day_period = 24;    ///< slots per synthetic day
  double demand_noise = 0.15;

  Range es_compute{1e12, 3e12};
  Range es_power{5.0, 15.0};
  IntRange es_subcarriers{6, 8};
  Range es_height{10.0, 30.0};
  Range avg_price{2.0, 8.0};
  Range bid_shade{1.0, 1.0};
  IntRange demand_range{0, 6};

  IntRange uav_count{8, 10};
  Range uav_compute{1e10, 3e10};
  Range ap_power_comp{5.0, 15.0};
  Range ap_power_move{0.05, 0.1};
  Range ap_power_fly{0.02, 0.04};
  IntRange per_uav_cap{1, 2};
  Range ap_speed{10.0, 20.0};
  Range ask{2.0, 6.0};
  double uav_altitude = 100.0;

  Range tx_power{0.2, 0.4};
  Range hu_data_mbit{10.0, 55.0};
  Range mu_data_mbit{100.0, 550.0};
  double cycles_per_bit = 600.0;
  Range local_compute{1e9, 2e9};
  Range local_power{0.5, 1.0};
  Range mu_deadline{3.0, 8.0};
  Range mu_reward{20.0, 60.0};
  double coverage_radius = 300.0;
  double sd_placement_base = 0.5;  ///< weight of G_i when choosing SD home ESs

  ChannelConfig channel;
  EconomyConfig economy;

  /** Throws ConfigError on inverted ranges or inconsistent counts. */
  void validate() const;
};

struct Scenario {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  std::vector<EdgeServer> ess;
  std::vector<AgentPair> aps;
  std::vector<ServiceDemander> hus;
  std::vector<ServiceDemander> mus;

  /** Index of the online trading round, the last entry of every demand series. */
  int online_round() const;
};

/** Deterministic generation; SD home ESs are weighted by realised demand. */
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

/**
 * Parses a delimited trace (header row, first column a timestamp) and maps the
 * first n_es numeric columns to integer demand series in demand_range.
 */
std::vector<std::vector<int>> ingest_demand_trace(const std::string& csv_text, int n_es,
                                                  IntRange demand_range);

/** Linear SNR of a link; zero transmit power gives zero. */
double link_snr(double tx_power_w, const GeoPoint& from, const GeoPoint& to, bool uav_target,
                const ChannelConfig& ch);
double link_rate(double tx_power_w, const GeoPoint& from, const GeoPoint& to, bool uav_target,
                 const ChannelConfig& ch);
inline double to_db(double linear) { return 10.0 * std::log10(linear); }

void to_json(nlohmann::json& j, const GeoPoint& p);
void from_json(const nlohmann::json& j, GeoPoint& p);
void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);
void to_json(nlohmann::json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);

/** Loads a config JSON; missing keys keep their defaults. Throws ConfigError. */
ScenarioConfig config_from_json(const nlohmann::json& j);

}  // namespace edgemkt

#include "edgemkt/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "edgemkt/errors.hpp"
#include "edgemkt/rng.hpp"

namespace edgemkt {

double distance2d(const GeoPoint& a, const GeoPoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double distance3d(const GeoPoint& a, const GeoPoint& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.h - b.h) * (a.h - b.h));
}

namespace {

void check_range(const Range& r, const char* name, bool positive = false) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
    throw ConfigError(std::string("range '") + name + "' is not well-ordered");
  if (positive && r.lo <= 0.0) throw ConfigError(std::string("range '") + name + "' must be positive");
  if (r.lo < 0.0) throw ConfigError(std::string("range '") + name + "' must be non-negative");
}

void check_range(const IntRange& r, const char* name, int min_lo = 0) {
  if (r.lo > r.hi) throw ConfigError(std::string("range '") + name + "' is not well-ordered");
  if (r.lo < min_lo)
    throw ConfigError(std::string("range '") + name + "' must be at least " + std::to_string(min_lo));
}

GeoPoint uniform_point(Rng& rng, double w, double h, double height) {
  return GeoPoint{rng.uniform(0.0, w), rng.uniform(0.0, h), height};
}

/** Area-uniform point in the disc around centre, kept inside the region. */
GeoPoint point_in_disc(Rng& rng, const GeoPoint& centre, double radius, double w, double h) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double r = radius * std::sqrt(rng.uniform01());
    const double a = 2.0 * std::numbers::pi * rng.uniform01();
    GeoPoint p{centre.x + r * std::cos(a), centre.y + r * std::sin(a), 0.0};
    if (p.x >= 0.0 && p.x <= w && p.y >= 0.0 && p.y <= h) return p;
  }
  return GeoPoint{centre.x, centre.y, 0.0};
}

std::vector<int> synthetic_demand(Rng& rng, const ScenarioConfig& c) {
  const double base = rng.uniform(0.2, 0.8);
  const double amp = rng.uniform(0.1, 0.4);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double lo = c.demand_range.lo;
  const double hi = c.demand_range.hi;
  std::vector<int> out(static_cast<std::size_t>(c.history));
  for (int t = 0; t < c.history; ++t) {
    double v = base + amp * std::sin(2.0 * std::numbers::pi * t / c.day_period + phase) +
               rng.normal(0.0, c.demand_noise * amp);
    v = std::clamp(v, 0.0, 1.0);
    out[static_cast<std::size_t>(t)] = static_cast<int>(std::lround(lo + v * (hi - lo)));
  }
  return out;
}

ServiceDemander make_user(Rng& rng, const ScenarioConfig& c, const Scenario& s, int id, UserKind kind,
                          const std::vector<double>& home_weights) {
  ServiceDemander u;
  u.id = id;
  u.kind = kind;
  u.tx_power_w = rng.uniform(c.tx_power.lo, c.tx_power.hi);
  const Range& mbit = kind == UserKind::Human ? c.hu_data_mbit : c.mu_data_mbit;
  u.data_bits = rng.uniform(mbit.lo, mbit.hi) * 1e6;
  u.workload_cycles = c.cycles_per_bit * u.data_bits;
  u.local_hz = rng.uniform(c.local_compute.lo, c.local_compute.hi);
  u.local_power_w = rng.uniform(c.local_power.lo, c.local_power.hi);
  if (kind == UserKind::Machine) {
    u.deadline_s = rng.uniform(c.mu_deadline.lo, c.mu_deadline.hi);
    u.reward = rng.uniform(c.mu_reward.lo, c.mu_reward.hi);
  }
  int home = rng.weighted_index(home_weights);
  if (home < 0) home = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(s.ess.size()) - 1));
  u.home_es = s.ess[static_cast<std::size_t>(home)].id;
  u.loc = point_in_disc(rng, s.ess[static_cast<std::size_t>(home)].loc, c.coverage_radius, c.region_w,
                        c.region_h);
  for (const auto& es : s.ess)
    if (distance2d(u.loc, es.loc) <= c.coverage_radius || es.id == u.home_es) u.coverage.push_back(es.id);
  return u;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n_es < 0 || n_ap < 0 || n_hu < 0 || n_mu < 0) throw ConfigError("entity counts must be non-negative");
  if (n_es == 0 && (n_hu > 0 || n_mu > 0)) throw ConfigError("service demanders require at least one ES");
  if (!(region_w > 0.0) || !(region_h > 0.0)) throw ConfigError("region must have positive size");
  if (slots < 1 || !(slot_seconds > 0.0)) throw ConfigError("slots and slot_seconds must be positive");
  if (history < 1 || day_period < 1) throw ConfigError("history and day_period must be positive");
  if (demand_noise < 0.0) throw ConfigError("demand_noise must be non-negative");
  check_range(es_compute, "es_compute", true);
  check_range(es_power, "es_power");
  check_range(es_subcarriers, "es_subcarriers", 1);
  check_range(es_height, "es_height");
  check_range(avg_price, "avg_price");
  check_range(bid_shade, "bid_shade");
  if (bid_shade.hi > 1.0) throw ConfigError("bid_shade must not exceed 1 (bids never exceed p-bar)");
  check_range(demand_range, "demand_range");
  check_range(uav_count, "uav_count", 1);
  check_range(uav_compute, "uav_compute", true);
  check_range(ap_power_comp, "ap_power_comp");
  check_range(ap_power_move, "ap_power_move");
  check_range(ap_power_fly, "ap_power_fly");
  check_range(per_uav_cap, "per_uav_cap", 1);
  check_range(ap_speed, "ap_speed", true);
  check_range(ask, "ask");
  check_range(tx_power, "tx_power");
  check_range(hu_data_mbit, "hu_data_mbit", true);
  check_range(mu_data_mbit, "mu_data_mbit", true);
  check_range(local_compute, "local_compute", true);
  check_range(local_power, "local_power");
  check_range(mu_deadline, "mu_deadline", true);
  check_range(mu_reward, "mu_reward");
  if (!(cycles_per_bit > 0.0)) throw ConfigError("cycles_per_bit must be positive");
  if (!(coverage_radius > 0.0)) throw ConfigError("coverage_radius must be positive");
  if (sd_placement_base < 0.0) throw ConfigError("sd_placement_base must be non-negative");
  if (!(channel.bandwidth_hz > 0.0) || !(channel.ref_distance_m > 0.0) || !(channel.min_distance_m > 0.0))
    throw ConfigError("channel parameters must be positive");
  if (economy.omega1 < 0.0 || economy.omega2 < 0.0 || economy.c_hard < 0.0 || economy.tariff < 0.0)
    throw ConfigError("economy weights must be non-negative");
}

int Scenario::online_round() const {
  return ess.empty() ? 0 : static_cast<int>(ess.front().demand_series.size()) - 1;
}

Scenario generate_scenario(const ScenarioConfig& c, std::uint64_t seed) {
  c.validate();
  Scenario s;
  s.config = c;
  s.seed = seed;
  const Rng root(seed);

  Rng es_rng = root.split("edge-servers");
  Rng demand_rng = root.split("demand");
  for (int i = 0; i < c.n_es; ++i) {
    EdgeServer e;
    e.id = i;
    e.start_slot = static_cast<int>(es_rng.uniform_int(0, c.slots - 1));
    e.compute_hz = es_rng.uniform(c.es_compute.lo, c.es_compute.hi);
    e.power_w = es_rng.uniform(c.es_power.lo, c.es_power.hi);
    e.subcarrier_cap = static_cast<int>(es_rng.uniform_int(c.es_subcarriers.lo, c.es_subcarriers.hi));
    e.loc = uniform_point(es_rng, c.region_w, c.region_h, es_rng.uniform(c.es_height.lo, c.es_height.hi));
    e.avg_price = es_rng.uniform(c.avg_price.lo, c.avg_price.hi);
    e.bid = e.avg_price * es_rng.uniform(c.bid_shade.lo, c.bid_shade.hi);
    Rng series_rng = demand_rng.split(static_cast<std::uint64_t>(i));
    e.demand_series = synthetic_demand(series_rng, c);
    s.ess.push_back(std::move(e));
  }

  Rng ap_rng = root.split("agent-pairs");
  for (int k = 0; k < c.n_ap; ++k) {
    AgentPair a;
    a.id = k;
    a.uav_count = static_cast<int>(ap_rng.uniform_int(c.uav_count.lo, c.uav_count.hi));
    a.uav_compute_hz = ap_rng.uniform(c.uav_compute.lo, c.uav_compute.hi);
    a.power_comp_w = ap_rng.uniform(c.ap_power_comp.lo, c.ap_power_comp.hi);
    a.power_move_w = ap_rng.uniform(c.ap_power_move.lo, c.ap_power_move.hi);
    a.power_fly_w = ap_rng.uniform(c.ap_power_fly.lo, c.ap_power_fly.hi);
    a.per_uav_cap = static_cast<int>(ap_rng.uniform_int(c.per_uav_cap.lo, c.per_uav_cap.hi));
    a.origin = uniform_point(ap_rng, c.region_w, c.region_h, 0.0);
    a.speed_mps = ap_rng.uniform(c.ap_speed.lo, c.ap_speed.hi);
    a.ask = ap_rng.uniform(c.ask.lo, c.ask.hi);
    s.aps.push_back(a);
  }

  std::vector<double> home_weights;
  for (const auto& e : s.ess)
    home_weights.push_back(e.demand_series.back() + c.sd_placement_base * e.subcarrier_cap);
  Rng hu_rng = root.split("human-users");
  for (int j = 0; j < c.n_hu; ++j) s.hus.push_back(make_user(hu_rng, c, s, j, UserKind::Human, home_weights));
  Rng mu_rng = root.split("machine-users");
  for (int j = 0; j < c.n_mu; ++j)
    s.mus.push_back(make_user(mu_rng, c, s, c.n_hu + j, UserKind::Machine, home_weights));
  return s;
}

std::vector<std::vector<int>> ingest_demand_trace(const std::string& csv_text, int n_es, IntRange demand_range) {
  if (n_es < 0) throw InputError("n_es must be non-negative");
  if (demand_range.lo > demand_range.hi) throw ConfigError("demand_range is not well-ordered");
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("trace is empty");
  const char delim = line.find(';') != std::string::npos ? ';' : ',';

  auto split = [delim](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, delim)) cells.push_back(cell);
    if (!l.empty() && l.back() == delim) cells.emplace_back();
    return cells;
  };
  const auto header = split(line);
  if (static_cast<int>(header.size()) - 1 < n_es)
    throw InputError("trace has " + std::to_string(header.size() > 0 ? header.size() - 1 : 0) +
                     " value columns, need " + std::to_string(n_es));

  std::vector<std::vector<double>> cols(static_cast<std::size_t>(n_es));
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) - 1 < n_es)
      throw InputError("row " + std::to_string(row) + " has too few columns");
    for (int c = 0; c < n_es; ++c) {
      std::string cell = cells[static_cast<std::size_t>(c + 1)];
      cell.erase(std::remove_if(cell.begin(), cell.end(), [](unsigned char ch) { return std::isspace(ch) || ch == '"'; }),
                 cell.end());
      // UCI layout writes decimals with a comma when the delimiter is ';'.
      if (delim == ';') std::replace(cell.begin(), cell.end(), ',', '.');
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (cell.empty() || used != cell.size() || !std::isfinite(v))
        throw InputError("non-numeric cell at row " + std::to_string(row) + ", column " + std::to_string(c + 2));
      cols[static_cast<std::size_t>(c)].push_back(v);
    }
  }

  std::vector<std::vector<int>> out;
  for (const auto& col : cols) {
    std::vector<int> series;
    if (col.empty()) {
      out.push_back(series);
      continue;
    }
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    const double lo = *mn;
    const double span = *mx - *mn;
    for (double v : col) {
      const double unit = span > 0.0 ? (v - lo) / span : 0.0;
      series.push_back(static_cast<int>(std::lround(demand_range.lo + unit * (demand_range.hi - demand_range.lo))));
    }
    out.push_back(std::move(series));
  }
  return out;
}

double link_snr(double tx_power_w, const GeoPoint& from, const GeoPoint& to, bool uav_target,
                const ChannelConfig& ch) {
  if (tx_power_w <= 0.0) return 0.0;
  const double d = std::max(distance3d(from, to), ch.min_distance_m);
  double db = ch.ref_snr_db - 10.0 * ch.path_loss_exponent * std::log10(d / ch.ref_distance_m);
  if (uav_target) db += ch.uav_los_bonus_db;
  return tx_power_w * std::pow(10.0, db / 10.0);
}

double link_rate(double tx_power_w, const GeoPoint& from, const GeoPoint& to, bool uav_target,
                 const ChannelConfig& ch) {
  return ch.bandwidth_hz * std::log2(1.0 + link_snr(tx_power_w, from, to, uav_target, ch));
}

// ---------------------------------------------------------------- JSON

void to_json(nlohmann::json& j, const Range& r) { j = nlohmann::json::array({r.lo, r.hi}); }
void from_json(const nlohmann::json& j, Range& r) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("range must be a two-element array");
  r.lo = j.at(0).get<double>();
  r.hi = j.at(1).get<double>();
}
void to_json(nlohmann::json& j, const IntRange& r) { j = nlohmann::json::array({r.lo, r.hi}); }
void from_json(const nlohmann::json& j, IntRange& r) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("range must be a two-element array");
  r.lo = j.at(0).get<int>();
  r.hi = j.at(1).get<int>();
}

void to_json(nlohmann::json& j, const GeoPoint& p) { j = nlohmann::json::array({p.x, p.y, p.h}); }
void from_json(const nlohmann::json& j, GeoPoint& p) {
  p.x = j.at(0).get<double>();
  p.y = j.at(1).get<double>();
  p.h = j.at(2).get<double>();
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ChannelConfig, bandwidth_hz, ref_snr_db, ref_distance_m,
                                                path_loss_exponent, min_distance_m, uav_los_bonus_db)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EconomyConfig, v_time_hu, v_energy_hu, v_energy_mu, omega1, omega2,
                                                c_hard, tariff, mean_task_cycles, fly_base_s, fly_per_task_s,
                                                dispatch_s)

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  j = nlohmann::json{{"n_es", c.n_es},
                     {"n_ap", c.n_ap},
                     {"n_hu", c.n_hu},
                     {"n_mu", c.n_mu},
                     {"region_w", c.region_w},
                     {"region_h", c.region_h},
                     {"slots", c.slots},
                     {"slot_seconds", c.slot_seconds},
                     {"history", c.history},
                     {"day_period", c.day_period},
                     {"demand_noise", c.demand_noise},
                     {"es_compute", c.es_compute},
                     {"es_power", c.es_power},
                     {"es_subcarriers", c.es_subcarriers},
                     {"es_height", c.es_height},
                     {"avg_price", c.avg_price},
                     {"bid_shade", c.bid_shade},
                     {"demand_range", c.demand_range},
                     {"uav_count", c.uav_count},
                     {"uav_compute", c.uav_compute},
                     {"ap_power_comp", c.ap_power_comp},
                     {"ap_power_move", c.ap_power_move},
                     {"ap_power_fly", c.ap_power_fly},
                     {"per_uav_cap", c.per_uav_cap},
                     {"ap_speed", c.ap_speed},
                     {"ask", c.ask},
                     {"uav_altitude", c.uav_altitude},
                     {"tx_power", c.tx_power},
                     {"hu_data_mbit", c.hu_data_mbit},
                     {"mu_data_mbit", c.mu_data_mbit},
                     {"cycles_per_bit", c.cycles_per_bit},
                     {"local_compute", c.local_compute},
                     {"local_power", c.local_power},
                     {"mu_deadline", c.mu_deadline},
                     {"mu_reward", c.mu_reward},
                     {"coverage_radius", c.coverage_radius},
                     {"sd_placement_base", c.sd_placement_base},
                     {"channel", c.channel},
                     {"economy", c.economy}};
}

namespace {
template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
  read_opt(j, "n_es", c.n_es);
  read_opt(j, "n_ap", c.n_ap);
  read_opt(j, "n_hu", c.n_hu);
  read_opt(j, "n_mu", c.n_mu);
  read_opt(j, "region_w", c.region_w);
  read_opt(j, "region_h", c.region_h);
  read_opt(j, "slots", c.slots);
  read_opt(j, "slot_seconds", c.slot_seconds);
  read_opt(j, "history", c.history);
  read_opt(j, "day_period", c.day_period);
  read_opt(j, "demand_noise", c.demand_noise);
  read_opt(j, "es_compute", c.es_compute);
  read_opt(j, "es_power", c.es_power);
  read_opt(j, "es_subcarriers", c.es_subcarriers);
  read_opt(j, "es_height", c.es_height);
  read_opt(j, "avg_price", c.avg_price);
  read_opt(j, "bid_shade", c.bid_shade);
  read_opt(j, "demand_range", c.demand_range);
  read_opt(j, "uav_count", c.uav_count);
  read_opt(j, "uav_compute", c.uav_compute);
  read_opt(j, "ap_power_comp", c.ap_power_comp);
  read_opt(j, "ap_power_move", c.ap_power_move);
  read_opt(j, "ap_power_fly", c.ap_power_fly);
  read_opt(j, "per_uav_cap", c.per_uav_cap);
  read_opt(j, "ap_speed", c.ap_speed);
  read_opt(j, "ask", c.ask);
  read_opt(j, "uav_altitude", c.uav_altitude);
  read_opt(j, "tx_power", c.tx_power);
  read_opt(j, "hu_data_mbit", c.hu_data_mbit);
  read_opt(j, "mu_data_mbit", c.mu_data_mbit);
  read_opt(j, "cycles_per_bit", c.cycles_per_bit);
  read_opt(j, "local_compute", c.local_compute);
  read_opt(j, "local_power", c.local_power);
  read_opt(j, "mu_deadline", c.mu_deadline);
  read_opt(j, "mu_reward", c.mu_reward);
  read_opt(j, "coverage_radius", c.coverage_radius);
  read_opt(j, "sd_placement_base", c.sd_placement_base);
  if (j.contains("channel")) c.channel = j.at("channel").get<ChannelConfig>();
  if (j.contains("economy")) c.economy = j.at("economy").get<EconomyConfig>();
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  try {
    c = j.get<ScenarioConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid scenario config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {
nlohmann::json user_json(const ServiceDemander& u) {
  nlohmann::json j{{"id", u.id},
                   {"kind", u.kind == UserKind::Human ? "human" : "machine"},
                   {"tx_power_w", u.tx_power_w},
                   {"workload_cycles", u.workload_cycles},
                   {"data_bits", u.data_bits},
                   {"local_hz", u.local_hz},
                   {"local_power_w", u.local_power_w},
                   {"loc", u.loc},
                   {"home_es", u.home_es},
                   {"coverage", u.coverage}};
  if (u.kind == UserKind::Machine) {
    j["deadline_s"] = u.deadline_s;
    j["reward"] = u.reward;
  }
  return j;
}

ServiceDemander user_from(const nlohmann::json& j) {
  ServiceDemander u;
  u.id = j.at("id").get<int>();
  u.kind = j.at("kind").get<std::string>() == "machine" ? UserKind::Machine : UserKind::Human;
  u.tx_power_w = j.at("tx_power_w").get<double>();
  u.workload_cycles = j.at("workload_cycles").get<double>();
  u.data_bits = j.at("data_bits").get<double>();
  u.local_hz = j.at("local_hz").get<double>();
  u.local_power_w = j.at("local_power_w").get<double>();
  u.loc = j.at("loc").get<GeoPoint>();
  u.home_es = j.at("home_es").get<int>();
  u.coverage = j.at("coverage").get<std::vector<int>>();
  u.deadline_s = j.value("deadline_s", 0.0);
  u.reward = j.value("reward", 0.0);
  return u;
}
}  // namespace

void to_json(nlohmann::json& j, const Scenario& s) {
  nlohmann::json ess = nlohmann::json::array();
  for (const auto& e : s.ess)
    ess.push_back({{"id", e.id},
                   {"start_slot", e.start_slot},
                   {"compute_hz", e.compute_hz},
                   {"power_w", e.power_w},
                   {"subcarrier_cap", e.subcarrier_cap},
                   {"loc", e.loc},
                   {"avg_price", e.avg_price},
                   {"bid", e.bid},
                   {"demand_series", e.demand_series}});
  nlohmann::json aps = nlohmann::json::array();
  for (const auto& a : s.aps)
    aps.push_back({{"id", a.id},
                   {"uav_count", a.uav_count},
                   {"uav_compute_hz", a.uav_compute_hz},
                   {"power_comp_w", a.power_comp_w},
                   {"power_move_w", a.power_move_w},
                   {"power_fly_w", a.power_fly_w},
                   {"per_uav_cap", a.per_uav_cap},
                   {"origin", a.origin},
                   {"speed_mps", a.speed_mps},
                   {"ask", a.ask}});
  nlohmann::json hus = nlohmann::json::array();
  for (const auto& u : s.hus) hus.push_back(user_json(u));
  nlohmann::json mus = nlohmann::json::array();
  for (const auto& u : s.mus) mus.push_back(user_json(u));
  j = nlohmann::json{{"config", s.config}, {"seed", s.seed}, {"ess", ess}, {"aps", aps}, {"hus", hus}, {"mus", mus}};
}

void from_json(const nlohmann::json& j, Scenario& s) {
  s.config = config_from_json(j.at("config"));
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ess.clear();
  for (const auto& e : j.at("ess")) {
    EdgeServer x;
    x.id = e.at("id").get<int>();
    x.start_slot = e.at("start_slot").get<int>();
    x.compute_hz = e.at("compute_hz").get<double>();
    x.power_w = e.at("power_w").get<double>();
    x.subcarrier_cap = e.at("subcarrier_cap").get<int>();
    x.loc = e.at("loc").get<GeoPoint>();
    x.avg_price = e.at("avg_price").get<double>();
    x.bid = e.at("bid").get<double>();
    x.demand_series = e.at("demand_series").get<std::vector<int>>();
    s.ess.push_back(std::move(x));
  }
  s.aps.clear();
  for (const auto& a : j.at("aps")) {
    AgentPair x;
    x.id = a.at("id").get<int>();
    x.uav_count = a.at("uav_count").get<int>();
    x.uav_compute_hz = a.at("uav_compute_hz").get<double>();
    x.power_comp_w = a.at("power_comp_w").get<double>();
    x.power_move_w = a.at("power_move_w").get<double>();
    x.power_fly_w = a.at("power_fly_w").get<double>();
    x.per_uav_cap = a.at("per_uav_cap").get<int>();
    x.origin = a.at("origin").get<GeoPoint>();
    x.speed_mps = a.at("speed_mps").get<double>();
    x.ask = a.at("ask").get<double>();
    s.aps.push_back(x);
  }
  s.hus.clear();
  for (const auto& u : j.at("hus")) s.hus.push_back(user_from(u));
  s.mus.clear();
  for (const auto& u : j.at("mus")) s.mus.push_back(user_from(u));
}

}  // namespace edgemkt

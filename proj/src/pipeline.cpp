#include "edgemkt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "edgemkt/errors.hpp"

namespace edgemkt {

const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"FUSION", "FUSION_NoPG", "FUSION_Random", "FUSION_NoST", "PurOnline"};
  return names;
}

PipelineSpec pipeline_spec(const std::string& name) {
  PipelineSpec p;
  p.name = name;
  if (name == "FUSION") return p;
  if (name == "FUSION_NoPG") {
    p.online = OnlineRule::RandomAssignment;
    return p;
  }
  if (name == "FUSION_Random") {
    p.offline = OfflineRule::RandomContracts;
    return p;
  }
  if (name == "FUSION_NoST") {
    p.offline = OfflineRule::GreedyAuction;
    return p;
  }
  if (name == "PurOnline") {
    p.forecast = false;
    p.offline = OfflineRule::None;
    return p;
  }
  throw ConfigError("unknown pipeline '" + name + "'");
}

TrainConfig pipeline_forecast_defaults() {
  TrainConfig c;
  c.L = 24;
  c.H = 3;
  c.K = 1;
  c.hidden = 8;
  c.readout_hidden = 8;
  c.epochs = 5;
  c.batch_size = 16;
  c.learning_rate = 0.05;
  return c;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  auction.validate();
  forecast.validate();
  brd.validate();
  if (scenario.history < forecast.L + forecast.H + forecast.K + 1)
    throw ConfigError("history is too short for the forecaster window");
}

namespace {

void read_train(const nlohmann::json& j, TrainConfig& c) {
  c.L = j.value("L", c.L);
  c.H = j.value("H", c.H);
  c.K = j.value("K", c.K);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.lambda = j.value("lambda", c.lambda);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.dv = j.value("dv", c.dv);
  c.hidden = j.value("hidden", c.hidden);
  c.readout_hidden = j.value("readout_hidden", c.readout_hidden);
  c.time_features = j.value("time_features", c.time_features);
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("scenario")) c.scenario = config_from_json(j.at("scenario"));
    if (j.contains("aco")) c.auction.aco = j.at("aco").get<AcoParams>();
    if (j.contains("auction")) {
      const auto& a = j.at("auction");
      c.auction.delta = a.value("delta", c.auction.delta);
      c.auction.monotone_probes = a.value("monotone_probes", c.auction.monotone_probes);
    }
    if (j.contains("forecast")) read_train(j.at("forecast"), c.forecast);
    if (j.contains("brd")) {
      const auto& b = j.at("brd");
      c.brd.epsilon = b.value("epsilon", c.brd.epsilon);
      c.brd.t_max = b.value("t_max", c.brd.t_max);
      c.brd.skip_unchanged = b.value("skip_unchanged", c.brd.skip_unchanged);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.forecast.day_period = c.scenario.day_period;
  c.validate();
  return c;
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json aco;
  to_json(aco, c.auction.aco);
  j = nlohmann::json{{"scenario", c.scenario},
                     {"aco", aco},
                     {"auction", {{"delta", c.auction.delta}, {"monotone_probes", c.auction.monotone_probes}}},
                     {"forecast",
                      {{"L", c.forecast.L},
                       {"H", c.forecast.H},
                       {"K", c.forecast.K},
                       {"learning_rate", c.forecast.learning_rate},
                       {"lambda", c.forecast.lambda},
                       {"batch_size", c.forecast.batch_size},
                       {"epochs", c.forecast.epochs},
                       {"dv", c.forecast.dv},
                       {"hidden", c.forecast.hidden},
                       {"readout_hidden", c.forecast.readout_hidden},
                       {"time_features", c.forecast.time_features}}},
                     {"brd",
                      {{"epsilon", c.brd.epsilon}, {"t_max", c.brd.t_max}, {"skip_unchanged", c.brd.skip_unchanged}}}};
}

std::vector<int> forecast_demand(const Scenario& s, const TrainConfig& cfg, std::uint64_t seed) {
  std::vector<std::vector<double>> history;
  for (const auto& es : s.ess) {
    require(!es.demand_series.empty(), "forecast_demand: empty demand series");
    history.emplace_back(es.demand_series.begin(), es.demand_series.end() - 1);
  }
  std::vector<int> out;
  if (history.empty()) return out;
  TrainConfig c = cfg;
  c.seed = Rng(seed).split("forecast").seed();
  const TrainResult tr = train(history, c);
  for (const auto& h : history) {
    const double v = forecast_next(tr.model, h, static_cast<int>(h.size()) - 1, c.L).front();
    out.push_back(std::max(0, static_cast<int>(std::lround(v))));
  }
  return out;
}

TrialDetail run_pipeline(const Scenario& s, const PipelineSpec& spec, const ExperimentConfig& cfg,
                         std::uint64_t seed, const std::vector<int>* forecast) {
  TrialDetail t;
  t.result.pipeline = spec.name;
  t.result.seed = seed;
  Rng ledger_rng = Rng(seed).split("ledger");
  for (const auto& es : s.ess) t.realized_demand.push_back(es.demand_series.empty() ? 0 : es.demand_series.back());

  std::vector<UavDeployment> uavs;
  if (spec.offline != OfflineRule::None) {
    try {
      if (!spec.forecast)
        t.predicted_demand = t.realized_demand;
      else
        t.predicted_demand = forecast ? *forecast : forecast_demand(s, cfg.forecast, seed);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("forecast stage: ") + e.what());
    }
    const Market market = make_market(s, t.predicted_demand);
    record_n(t.ledger, Stage::Offline, InteractionKind::Bid, static_cast<long>(market.ess.size()), ledger_rng);
    record_n(t.ledger, Stage::Offline, InteractionKind::Ask, static_cast<long>(market.aps.size()), ledger_rng);
    const std::uint64_t auction_seed = Rng(seed).split("auction").seed();
    try {
      if (spec.offline == OfflineRule::RandomContracts) {
        t.outcome = random_contracts(market, auction_seed);
      } else {
        AuctionParams p = cfg.auction;
        p.rule = spec.offline == OfflineRule::GreedyAuction ? MatchRule::PriceGreedy : MatchRule::Routed;
        t.outcome = run_auction(market, p, auction_seed);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("auction stage: ") + e.what());
    }
    record_n(t.ledger, Stage::Offline, InteractionKind::Probe, t.outcome.probe_batches, ledger_rng);
    record_n(t.ledger, Stage::Offline, InteractionKind::Contract, static_cast<long>(t.outcome.contracts.size()),
             ledger_rng);
    t.offline = offline_welfare(t.outcome, market);
    t.result.offline_welfare = t.offline.social;
    t.result.contracts = static_cast<int>(t.outcome.contracts.size());
    for (const auto& c : t.outcome.contracts)
      if (c.delivered && c.tasks > 0) uavs.push_back({c.es_id, c.tasks, s.aps[static_cast<std::size_t>(c.ap_index)]});
  }

  t.instance = build_online_instance(s, uavs);
  const std::uint64_t online_seed = Rng(seed).split("online").seed();
  record_n(t.ledger, Stage::Online, InteractionKind::Assign, static_cast<long>(t.instance.demanders.size()), ledger_rng);
  if (spec.online == OnlineRule::BestResponse) {
    t.brd = pg_brd(t.instance, cfg.brd, online_seed);
    t.profile = t.brd.profile;
    t.result.brd_rounds = t.brd.rounds;
    t.result.converged = t.brd.converged;
    record_n(t.ledger, Stage::Online, InteractionKind::BrdQuery, t.brd.evaluations, ledger_rng);
  } else {
    Rng rng = Rng(online_seed).split("random-assignment");
    t.profile = random_assignment(t.instance, rng);
  }
  t.result.online_potential = potential(t.instance, t.profile);
  t.result.welfare = t.result.offline_welfare + t.result.online_potential;
  t.result.doi_ms = t.ledger.doi_ms();
  t.result.ecoi_j = t.ledger.ecoi_j();
  t.result.interactions = static_cast<long>(t.ledger.entries.size());
  return t;
}

SweepAxis sweep_axis(const std::string& name) {
  if (name == "es_count") return SweepAxis::EsCount;
  if (name == "population") return SweepAxis::Population;
  throw ConfigError("unknown sweep axis '" + name + "' (expected es_count or population)");
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return Rng(seed).split("trial").split(static_cast<std::uint64_t>(trial)).seed();
}

std::vector<SweepCell> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<int>& values, int trials,
                             const std::vector<std::string>& pipelines, std::uint64_t seed) {
  if (values.empty()) throw ConfigError("sweep: no axis values");
  if (trials < 1) throw ConfigError("sweep: trials must be at least 1");
  std::vector<PipelineSpec> specs;
  for (const auto& n : pipelines) specs.push_back(pipeline_spec(n));
  std::vector<SweepCell> cells;
  for (int v : values) {
    ExperimentConfig c = cfg;
    if (axis == SweepAxis::EsCount) {
      c.scenario.n_es = v;
    } else {
      c.scenario.n_hu = v;
      c.scenario.n_mu = v;
    }
    c.validate();
    std::vector<std::vector<TrialResult>> per(specs.size());
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t ts = trial_seed(seed, t);
      const Scenario s = generate_scenario(c.scenario, ts);
      std::vector<int> shared;
      bool trained = false;
      for (std::size_t p = 0; p < specs.size(); ++p) {
        if (specs[p].forecast && specs[p].offline != OfflineRule::None && !trained) {
          try {
            shared = forecast_demand(s, c.forecast, ts);
          } catch (const std::exception& e) {
            throw std::runtime_error(std::string("forecast stage: ") + e.what());
          }
          trained = true;
        }
        per[p].push_back(run_pipeline(s, specs[p], c, ts, trained ? &shared : nullptr).result);
      }
    }
    for (std::size_t p = 0; p < specs.size(); ++p) {
      SweepCell cell;
      cell.axis = axis == SweepAxis::EsCount ? "es_count" : "population";
      cell.value = v;
      cell.report = summarize(per[p]);
      cell.trials = std::move(per[p]);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << "axis,value,pipeline,trials,welfare_mean,welfare_std,doi_ms_mean,doi_ms_std,ecoi_j_mean,ecoi_j_std\n";
  for (const auto& c : cells)
    os << c.axis << ',' << c.value << ',' << c.report.pipeline << ',' << c.report.trials << ','
       << num(c.report.welfare.mean) << ',' << num(c.report.welfare.std) << ',' << num(c.report.doi_ms.mean) << ','
       << num(c.report.doi_ms.std) << ',' << num(c.report.ecoi_j.mean) << ',' << num(c.report.ecoi_j.std) << '\n';
  return os.str();
}

std::string trials_csv(const std::vector<TrialResult>& trials) {
  std::ostringstream os;
  os << "pipeline,seed,welfare,offline_welfare,online_potential,doi_ms,ecoi_j,interactions,contracts,brd_rounds,"
        "converged\n";
  for (const auto& t : trials)
    os << t.pipeline << ',' << t.seed << ',' << num(t.welfare) << ',' << num(t.offline_welfare) << ','
       << num(t.online_potential) << ',' << num(t.doi_ms) << ',' << num(t.ecoi_j) << ',' << t.interactions << ','
       << t.contracts << ',' << t.brd_rounds << ',' << (t.converged ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace edgemkt

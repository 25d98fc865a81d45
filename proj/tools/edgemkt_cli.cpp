// Command-line harness for the edge-service market simulator.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "edgemkt/auction.hpp"
#include "edgemkt/errors.hpp"
#include "edgemkt/forecast.hpp"
#include "edgemkt/online_game.hpp"
#include "edgemkt/pipeline.hpp"
#include "edgemkt/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAudit = 3;

struct Options {
  std::string config_path;
  std::uint64_t seed = 1;
  int trials = 1;
  std::string out_dir;
  std::string pipeline = "FUSION";
  std::string format = "csv";
  std::string axis = "es_count";
  std::vector<int> values{8, 10, 12};
};

edgemkt::ExperimentConfig load_config(const Options& o) {
  if (o.config_path.empty()) return edgemkt::experiment_config_from_json(json::object());
  std::ifstream in(o.config_path);
  if (!in) throw edgemkt::ConfigError("cannot open config file " + o.config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw edgemkt::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return edgemkt::experiment_config_from_json(j);
}

/** Writes to <out>/<name>, or to stdout when no output directory was given. */
void emit(const Options& o, const std::string& name, const std::string& text) {
  if (o.out_dir.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  fs::create_directories(o.out_dir);
  std::ofstream f(fs::path(o.out_dir) / name, std::ios::binary);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string dump(const json& j) { return j.dump(2); }

int cmd_gen(const Options& o) {
  const auto cfg = load_config(o);
  const auto s = edgemkt::generate_scenario(cfg.scenario, o.seed);
  emit(o, "scenario.json", dump(json(s)));
  return 0;
}

int cmd_train(const Options& o) {
  auto cfg = load_config(o);
  const auto s = edgemkt::generate_scenario(cfg.scenario, o.seed);
  std::vector<std::vector<double>> series;
  for (const auto& es : s.ess) series.emplace_back(es.demand_series.begin(), es.demand_series.end());
  if (series.empty()) throw edgemkt::ConfigError("train: scenario has no edge servers");
  cfg.forecast.seed = o.seed;
  const auto res = edgemkt::train(series, cfg.forecast);
  std::ostringstream log;
  log << "epoch,loss\n";
  log.precision(17);
  for (std::size_t e = 0; e < res.epoch_loss.size(); ++e) log << e + 1 << ',' << res.epoch_loss[e] << '\n';
  if (o.out_dir.empty()) {
    std::cout << (o.format == "json" ? dump(json(res.model)) + "\n" : log.str());
  } else {
    emit(o, "model.json", dump(json(res.model)));
    emit(o, "train_log.csv", log.str());
  }
  return 0;
}

int cmd_auction(const Options& o) {
  const auto cfg = load_config(o);
  const auto s = edgemkt::generate_scenario(cfg.scenario, o.seed);
  std::vector<int> demand;
  for (const auto& es : s.ess) demand.push_back(es.demand_series.empty() ? 0 : es.demand_series.back());
  const auto market = edgemkt::make_market(s, demand);
  const auto outcome = edgemkt::run_auction(market, cfg.auction, o.seed);
  const auto report = edgemkt::audit(outcome, market);
  if (o.format == "json") {
    emit(o, "auction.json", dump(json{{"market", market}, {"outcome", outcome}, {"audit", report}}));
  } else {
    std::ostringstream os;
    os.precision(10);
    os << "es_id,ap_id,tasks,payment,reward,delivered\n";
    for (const auto& c : outcome.contracts)
      os << c.es_id << ',' << c.ap_id << ',' << c.tasks << ',' << c.payment << ',' << c.reward << ','
         << (c.delivered ? 1 : 0) << '\n';
    emit(o, "contracts.csv", os.str());
  }
  return report.ok() ? 0 : kExitAudit;
}

int cmd_online(const Options& o) {
  const auto cfg = load_config(o);
  const auto s = edgemkt::generate_scenario(cfg.scenario, o.seed);
  const auto inst = edgemkt::build_online_instance(s, {});
  const auto res = edgemkt::pg_brd(inst, cfg.brd, o.seed);
  const auto ne = edgemkt::verify_ne(inst, res.profile, cfg.brd.epsilon);
  if (o.format == "json") {
    emit(o, "online.json", dump(json{{"profile", res.profile},
                                     {"rounds", res.rounds},
                                     {"converged", res.converged},
                                     {"potential", edgemkt::potential(inst, res.profile)},
                                     {"realized_welfare", edgemkt::realized_welfare(inst, res.profile)},
                                     {"nash_equilibrium", ne.ok}}));
  } else {
    emit(o, "trace.csv", edgemkt::trace_csv(inst, res));
  }
  return res.converged && ne.ok ? 0 : kExitAudit;
}

int cmd_run(const Options& o) {
  const auto cfg = load_config(o);
  const auto spec = edgemkt::pipeline_spec(o.pipeline);
  std::vector<edgemkt::TrialResult> trials;
  for (int t = 0; t < o.trials; ++t) {
    const std::uint64_t ts = edgemkt::trial_seed(o.seed, t);
    const auto s = edgemkt::generate_scenario(cfg.scenario, ts);
    trials.push_back(edgemkt::run_pipeline(s, spec, cfg, ts).result);
  }
  if (o.format == "json") {
    emit(o, "run.json", dump(json{{"trials", trials}, {"summary", edgemkt::summarize(trials)}}));
  } else {
    emit(o, "trials.csv", edgemkt::trials_csv(trials));
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto cfg = load_config(o);
  const auto cells = edgemkt::sweep(cfg, edgemkt::sweep_axis(o.axis), o.values, o.trials, edgemkt::pipeline_names(),
                                    o.seed);
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& c : cells) {
      json row = c.report;
      row["axis"] = c.axis;
      row["value"] = c.value;
      arr.push_back(row);
    }
    emit(o, "sweep.json", dump(arr));
  } else {
    emit(o, "sweep.csv", edgemkt::sweep_csv(cells));
  }
  return 0;
}

int cmd_audit(const Options& o) {
  const auto cfg = load_config(o);
  json rep = json::object();
  bool ok = true;
  long winners = 0, quarantined = 0, violations = 0;
  for (int t = 0; t < o.trials; ++t) {
    const std::uint64_t ts = edgemkt::trial_seed(o.seed, t);
    const auto s = edgemkt::generate_scenario(cfg.scenario, ts);
    std::vector<int> demand;
    for (const auto& es : s.ess) demand.push_back(es.demand_series.back());
    const auto market = edgemkt::make_market(s, demand);
    const auto outcome = edgemkt::run_auction(market, cfg.auction, ts);
    const auto a = edgemkt::audit(outcome, market);
    winners += outcome.winners;
    quarantined += outcome.quarantined;
    if (outcome.clean() && !a.ok()) violations += static_cast<long>(a.violations.size());
    if (!a.ir_buyers || !a.ir_sellers || !a.capacity || !a.single_match) ok = false;
    if (outcome.clean() && !a.budget_balance) ok = false;

    const auto inst = edgemkt::build_online_instance(s, {});
    const auto brd = edgemkt::pg_brd(inst, cfg.brd, ts);
    if (!brd.converged || !edgemkt::verify_ne(inst, brd.profile, cfg.brd.epsilon).ok) ok = false;
  }
  rep["auction"] = {{"markets", o.trials}, {"winners", winners}, {"quarantined", quarantined}, {"violations", violations}};
  const auto ord = edgemkt::check_ordinal(2000, o.seed);
  rep["ordinal"] = {{"samples", ord.samples},
                    {"violations", ord.violations},
                    {"sandwich_violations", ord.sandwich_violations},
                    {"exact_potential_violations", ord.exact_violations},
                    {"counterexample", ord.counterexample}};
  if (ord.violations > 0 || ord.sandwich_violations > 0) ok = false;
  if (winners > 0 && quarantined * 20 > winners) ok = false;
  rep["passed"] = ok;
  emit(o, "audit.json", dump(rep));
  return ok ? 0 : kExitAudit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-service market simulator"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON configuration file");
    sub->add_option("--seed", o.seed, "root random seed");
    sub->add_option("--out", o.out_dir, "output directory (stdout when omitted)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* gen = app.add_subcommand("gen", "generate a scenario");
  auto* train = app.add_subcommand("train", "train the demand forecaster on a generated scenario");
  auto* auction = app.add_subcommand("auction", "run the offline auction on a generated scenario");
  auto* online = app.add_subcommand("online", "run best-response scheduling without contracted UAVs");
  auto* run = app.add_subcommand("run", "run one pipeline over Monte-Carlo trials");
  auto* sweep = app.add_subcommand("sweep", "sweep every pipeline over an axis");
  auto* audit = app.add_subcommand("audit", "run the economic and game-theoretic audits");
  for (auto* sub : {gen, train, auction, online, run, sweep, audit}) common(sub);
  for (auto* sub : {run, sweep, audit}) sub->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
  run->add_option("--pipeline", o.pipeline, "FUSION, FUSION_NoPG, FUSION_Random, FUSION_NoST or PurOnline");
  sweep->add_option("--axis", o.axis, "es_count or population");
  sweep->add_option("--values", o.values, "axis values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  try {
    if (gen->parsed()) return cmd_gen(o);
    if (train->parsed()) return cmd_train(o);
    if (auction->parsed()) return cmd_auction(o);
    if (online->parsed()) return cmd_online(o);
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (audit->parsed()) return cmd_audit(o);
  } catch (const edgemkt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const edgemkt::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

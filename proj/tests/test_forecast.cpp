#include <cmath>
#include <numbers>

#include "doctest.h"
#include "edgemkt/errors.hpp"
#include "edgemkt/forecast.hpp"
#include "edgemkt/rng.hpp"

using namespace edgemkt;

namespace {

LiquidModel zero_model(const LiquidShape& shape) {
  LiquidModel m;
  m.shape = shape;
  m.params = LiquidParams::zeros(shape);
  return m;
}

LiquidModel scalar_cell() {
  LiquidModel m = zero_model(LiquidShape{1, 1, 1, 1});
  m.params.W_x(0, 0) = 1.0;
  m.tau_min = 1.0;
  m.tau_max = 10.0;
  m.alpha_min = 0.01;
  m.alpha_max = 0.99;
  m.gamma_res = 0.0;
  return m;
}

double max_relative_error(const LiquidParams& a, const LiquidParams& b) {
  const auto fa = a.flatten();
  const auto fb = b.flatten();
  double worst = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const double denom = std::max({std::abs(fa[i]), std::abs(fb[i]), 1e-6});
    worst = std::max(worst, std::abs(fa[i] - fb[i]) / denom);
  }
  return worst;
}

ForecastWindow random_window(Rng& rng, int L) {
  ForecastWindow w;
  w.t0 = static_cast<int>(rng.uniform_int(0, 23));
  for (int i = 0; i < L; ++i) w.demand.push_back(rng.uniform(0.0, 1.0));
  return w;
}

std::vector<double> sinusoid(int n, double noise, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s;
  for (int t = 0; t < n; ++t)
    s.push_back(0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * t / 24.0) + rng.normal(0.0, noise));
  return s;
}

}  // namespace

TEST_CASE("cell step zero fixed point") {
  LiquidModel m = zero_model(LiquidShape{3, 5, 4, 2});
  const Eigen::VectorXd h = cell_step(m, Eigen::Vector3d(0.7, -0.2, 0.4), Eigen::VectorXd::Zero(5), 1.0);
  CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cell step convex combination of equal points") {
  // W_h = 0, W_x = 0 and b = 0 give h~ = tanh(LN(0)) = 0, so h = 0 is the equal-point case.
  LiquidModel m = zero_model(LiquidShape{1, 3, 2, 1});
  m.gamma_res = 0.0;
  m.alpha_min = m.alpha_max = 0.95;
  const Eigen::VectorXd h = Eigen::VectorXd::Zero(3);
  CHECK((cell_step(m, Eigen::VectorXd::Constant(1, 2.0), h, 1.0) - h).norm() == 0.0);
}

TEST_CASE("scalar cell hand evaluation") {
  const LiquidModel m = scalar_cell();
  const Eigen::VectorXd h = cell_step(m, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1), 1.0);
  const double tau = 1.0 + std::log(2.0);
  CHECK(h(0) == doctest::Approx(std::tanh(1.0) / tau).epsilon(1e-12));
  CHECK(h(0) == doctest::Approx(0.4498).epsilon(1e-4));
}

TEST_CASE("cell step rejects mismatched dimensions") {
  LiquidModel m = zero_model(LiquidShape{3, 4, 4, 2});
  CHECK_THROWS_AS(cell_step(m, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(4), 1.0), ContractViolation);
  CHECK_THROWS_AS(cell_step(m, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(5), 1.0), ContractViolation);
}

TEST_CASE("layer norm") {
  CHECK(layer_norm(Eigen::VectorXd::Constant(1, 3.5), 1e-5)(0) == 3.5);
  CHECK(layer_norm(Eigen::VectorXd::Zero(4), 1e-5).norm() == 0.0);
  const Eigen::VectorXd v = layer_norm(Eigen::Vector3d(1.0, 2.0, 6.0), 0.0);
  CHECK(v.mean() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((v.array() * v.array()).mean() == doctest::Approx(1.0));
}

TEST_CASE("encode folds the cell from the zero state") {
  LiquidModel m = init_model(LiquidShape{3, 6, 5, 2}, 3);
  ForecastWindow single{{0.4}, 7};
  const Eigen::VectorXd direct = cell_step(m, input_vector(m, 0.4, 7), Eigen::VectorXd::Zero(6), 1.0);
  CHECK((encode(m, single) - direct).norm() == 0.0);

  ForecastWindow w{{0.1, 0.5, 0.9, 0.3}, 2};
  Eigen::VectorXd h = Eigen::VectorXd::Zero(6);
  for (std::size_t i = 0; i < w.demand.size(); ++i)
    h = cell_step(m, input_vector(m, w.demand[i], w.t0 + static_cast<int>(i)), h, 1.0);
  CHECK((encode(m, w) - h).norm() == 0.0);
  CHECK((encode(m, w) - encode(m, w)).norm() == 0.0);
  CHECK(encode(zero_model(m.shape), w).norm() == 0.0);
}

TEST_CASE("predict on a zero model and purity") {
  const LiquidShape shape{3, 6, 5, 4};
  ForecastWindow w{{0.2, 0.3, 0.8}, 0};
  CHECK(predict(zero_model(shape), w).norm() == 0.0);
  const LiquidModel m = init_model(shape, 8);
  CHECK((predict(m, w) - predict(m, w)).norm() == 0.0);
  CHECK(predict(m, w).size() == 4);
}

TEST_CASE("parameter count") {
  const LiquidShape def;
  const LiquidModel m = init_model(def, 1);
  CHECK(m.parameter_count() == LiquidModel::parameter_count_formula(def));
  CHECK(m.parameter_count() == 11146);
  for (int d : {1, 4, 17}) {
    const LiquidShape s{3, d, d + 2, 5};
    CHECK(init_model(s, 2).parameter_count() == LiquidModel::parameter_count_formula(s));
  }
}

TEST_CASE("loss hand evaluation") {
  LiquidModel m = zero_model(LiquidShape{1, 2, 2, 2});
  m.params.c2 = Eigen::Vector2d(1.0, 3.0);
  ForecastWindow w{{0.5, 0.5}, 0};
  CHECK(loss(m, w, {0.0, 0.0}, LossSpec{}) == doctest::Approx(5.0));
  CHECK(loss(m, w, {1.0, 3.0}, LossSpec{}) == 0.0);
  CHECK_THROWS_AS(loss(m, w, {1.0}, LossSpec{}), ContractViolation);
  CHECK_THROWS_AS(loss(m, w, {1.0, 3.0}, LossSpec{3, 0.0, 1.0, 1.0}), ContractViolation);
}

TEST_CASE("perfect one-step rollout leaves the loss unchanged") {
  LiquidModel m = zero_model(LiquidShape{1, 2, 2, 2});
  m.params.c2 = Eigen::Vector2d(0.4, 0.4);
  ForecastWindow w{{0.4, 0.4, 0.4}, 0};
  const std::vector<double> targets{0.4, 0.4};
  CHECK(loss(m, w, targets, LossSpec{0, 0.0, 1.0, 1.0}) == loss(m, w, targets, LossSpec{2, 0.0, 1.0, 1.0}));
}

TEST_CASE("gradient at a zero residual is zero") {
  LiquidModel m = init_model(LiquidShape{3, 4, 4, 2}, 5);
  ForecastWindow w{{0.3, 0.6, 0.1}, 4};
  const Eigen::VectorXd y = predict(m, w);
  const LiquidParams g = gradient(m, w, {y(0), y(1)}, LossSpec{});
  for (double v : g.flatten()) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("weight decay gradient") {
  LiquidModel m = init_model(LiquidShape{3, 4, 3, 2}, 6);
  m.params.b.setConstant(0.3);
  ForecastWindow w{{0.3, 0.6}, 0};
  const double lambda = 0.01;
  const LiquidParams g = gradient(m, w, {0.0, 0.0}, LossSpec{0, lambda, 0.0, 1.0});
  CHECK((g.W_tau - 2.0 * lambda * m.params.W_tau).norm() < 1e-14);
  CHECK((g.W_h - 2.0 * lambda * m.params.W_h).norm() < 1e-14);
  CHECK((g.R2 - 2.0 * lambda * m.params.R2).norm() < 1e-14);
  CHECK(g.b.norm() == 0.0);
  CHECK(g.c1.norm() == 0.0);
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    LiquidShape shape{3, 4, 4, 2};
    if (trial % 2 == 1) shape = LiquidShape{1, 1 + trial % 5, 3, 1 + trial % 3};
    LiquidModel m = init_model(shape, static_cast<std::uint64_t>(trial) + 100);
    for (auto* v : {&m.params.b, &m.params.c1, &m.params.c2})
      for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = rng.uniform(-0.3, 0.3);
    m.gamma_res = trial % 3 == 0 ? 0.0 : 0.05;
    const int L = 3;
    const ForecastWindow w = random_window(rng, L);
    const LossSpec spec{trial % 3, trial % 2 ? 1e-3 : 0.0, 1.0, 1.0};
    std::vector<double> targets;
    for (int i = 0; i < std::max(shape.horizon, spec.K); ++i) targets.push_back(rng.uniform(0.0, 1.0));
    double analytic_loss = 0.0;
    const LiquidParams ga = gradient(m, w, targets, spec, &analytic_loss);
    CHECK(analytic_loss == doctest::Approx(loss(m, w, targets, spec)).epsilon(1e-12));
    CHECK(max_relative_error(ga, numeric_gradient(m, w, targets, spec)) < 1e-4);
  }
}

TEST_CASE("hidden state stays bounded over long random input streams") {
  LiquidModel m = init_model(LiquidShape{3, 8, 4, 2}, 77);
  m.params.W_h *= 5.0;
  m.params.W_x *= 5.0;
  Rng rng(4);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(8);
  const double bound_gap = m.alpha_max + m.gamma_res;
  for (int t = 0; t < 10000; ++t) {
    const Eigen::VectorXd z = Eigen::Vector3d(rng.uniform(-10, 10), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Eigen::VectorXd next = cell_step(m, z, h, 1.0);
    REQUIRE(next.allFinite());
    REQUIRE(next.cwiseAbs().maxCoeff() <= (1.0 - m.alpha_min) * h.cwiseAbs().maxCoeff() + bound_gap + 1e-12);
    h = next;
  }
}

TEST_CASE("training is deterministic and reduces the loss") {
  TrainConfig cfg;
  cfg.L = 12;
  cfg.H = 2;
  cfg.K = 1;
  cfg.hidden = 6;
  cfg.readout_hidden = 6;
  cfg.epochs = 4;
  const std::vector<std::vector<double>> series{sinusoid(120, 0.02, 1)};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.seed = seed;
    const TrainResult a = train(series, cfg);
    CHECK(a.final_loss <= a.initial_loss);
    CHECK(a.epoch_loss.back() <= a.epoch_loss.front());
    if (seed == 1) {
      const TrainResult b = train(series, cfg);
      CHECK(nlohmann::json(a.model).dump() == nlohmann::json(b.model).dump());
    }
  }
}

TEST_CASE("training rejects short or non-finite series") {
  TrainConfig cfg;
  cfg.L = 10;
  cfg.H = 2;
  cfg.K = 1;
  CHECK_THROWS_AS(train({std::vector<double>(12, 1.0)}, cfg), InputError);
  std::vector<double> bad(40, 1.0);
  bad[5] = std::nan("");
  CHECK_THROWS_AS(train({bad}, cfg), InputError);
  TrainConfig invalid;
  invalid.learning_rate = 0.0;
  CHECK_THROWS_AS(train({std::vector<double>(100, 1.0)}, invalid), ConfigError);
}

TEST_CASE("constant series is forecast within five percent of the range") {
  const TrainConfig cfg;
  const std::vector<double> s(cfg.L + cfg.H + cfg.K + 120, 4.0);
  const TrainResult r = train({s}, cfg);
  const auto f = forecast_next(r.model, s, static_cast<int>(s.size()) - 1, cfg.L);
  const double range = r.model.scale_hi - r.model.scale_lo;
  for (double v : f) CHECK(std::abs(v - 4.0) <= 0.05 * range);
}

TEST_CASE("trained model beats persistence on a sinusoid") {
  TrainConfig cfg;
  cfg.L = 24;
  cfg.H = 3;
  cfg.K = 1;
  cfg.hidden = 16;
  cfg.readout_hidden = 16;
  cfg.epochs = 10;
  const auto s = sinusoid(400, 0.02, 9);
  const std::vector<double> head(s.begin(), s.begin() + 300), tail(s.begin() + 300, s.end());
  const TrainResult r = train({head}, cfg);
  std::vector<double> norm;
  for (double v : tail) norm.push_back(r.model.normalize(v));
  CHECK(model_mse(r.model, norm, norm, cfg.L, cfg.H, 300) <= persistence_mse(norm, norm, cfg.L, cfg.H));
}

TEST_CASE("corruption conventions") {
  const auto s = sinusoid(50, 0.0, 3);
  CHECK(corrupt(s, 0.0, 0.0, BurstSpec{0.0, 0.5}, 1) == s);
  const auto all_missing = corrupt(s, 1.0, 0.0, BurstSpec{0.0, 0.5}, 1);
  for (double v : all_missing) CHECK(v == s.front());
  CHECK(corrupt(s, 0.3, 0.05, BurstSpec{}, 5) == corrupt(s, 0.3, 0.05, BurstSpec{}, 5));
  CHECK(corrupt(s, 0.3, 0.05, BurstSpec{}, 5) != corrupt(s, 0.3, 0.05, BurstSpec{}, 6));
}

TEST_CASE("corrupted inputs raise a trained model's error") {
  TrainConfig cfg;
  cfg.L = 24;
  cfg.H = 3;
  cfg.K = 1;
  cfg.hidden = 16;
  cfg.readout_hidden = 16;
  cfg.epochs = 10;
  const auto s = sinusoid(400, 0.02, 12);
  const std::vector<double> head(s.begin(), s.begin() + 300), tail(s.begin() + 300, s.end());
  const TrainResult r = train({head}, cfg);
  std::vector<double> clean, dirty;
  for (double v : tail) clean.push_back(r.model.normalize(v));
  for (double v : corrupt(tail, 0.3, 0.05, BurstSpec{}, 2)) dirty.push_back(r.model.normalize(v));
  CHECK(model_mse(r.model, dirty, clean, cfg.L, cfg.H, 300) > model_mse(r.model, clean, clean, cfg.L, cfg.H, 300));
}

TEST_CASE("model JSON round trip") {
  const LiquidModel m = init_model(LiquidShape{3, 5, 4, 2}, 13);
  const nlohmann::json j = m;
  const LiquidModel back = j.get<LiquidModel>();
  CHECK(nlohmann::json(back).dump() == j.dump());
  ForecastWindow w{{0.2, 0.9}, 1};
  CHECK((predict(back, w) - predict(m, w)).norm() == 0.0);
}

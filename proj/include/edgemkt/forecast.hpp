#pragma once
/**
 * Liquid-cell demand forecaster: a leaky-integrator recurrent cell with
 * bounded neuron-wise time constants, a two-layer readout producing an
 * H-step forecast, closed-loop rollout consistency in the loss, analytic
 * reverse-mode gradients and a deterministic mini-batch trainer.
 *
 * Demand values are handled on a min-max normalised scale stored in the
 * model; optional exogenous inputs are sin/cos of the time-of-day index.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace edgemkt {

struct LiquidShape {
  int input_dim = 3;        ///< demand plus (sin, cos) time features
  int hidden = 58;          ///< d
  int readout_hidden = 58;  ///< width of the readout's inner layer
  int horizon = 10;         ///< H
};

/** Trainable tensors; the same layout stores gradients. */
struct LiquidParams {
  Eigen::MatrixXd W_tau;  ///< d x (input_dim + d)
  Eigen::MatrixXd W_h;    ///< d x d
  Eigen::MatrixXd W_x;    ///< d x input_dim
  Eigen::VectorXd b;      ///< d
  Eigen::MatrixXd R1;     ///< readout_hidden x d
  Eigen::VectorXd c1;
  Eigen::MatrixXd R2;     ///< horizon x readout_hidden
  Eigen::VectorXd c2;

  static LiquidParams zeros(const LiquidShape& s);
  std::size_t size() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);
  /** this += a * other */
  void axpy(double a, const LiquidParams& other);
  /** Sum of squared entries of the weight matrices (biases excluded). */
  double weight_l2() const;
};

struct LiquidModel {
  LiquidShape shape;
  LiquidParams params;
  double tau_min = 1.0;
  double tau_max = 10.0;
  double alpha_min = 0.05;
  double alpha_max = 0.95;
  double gamma_res = 0.05;
  double ln_eps = 1e-5;
  int day_period = 24;
  double scale_lo = 0.0;  ///< demand value mapped to 0
  double scale_hi = 1.0;  ///< demand value mapped to 1

  /** Counted from the stored tensors. */
  std::size_t parameter_count() const { return params.size(); }
  /** Closed-form count for a shape. */
  static std::size_t parameter_count_formula(const LiquidShape& s);
  /** Throws ContractViolation if bounds or tensor shapes are inconsistent. */
  void validate() const;

  double normalize(double v) const;
  double denormalize(double v) const;
};

/** Xavier-style random initialisation; deterministic per seed. */
LiquidModel init_model(const LiquidShape& shape, std::uint64_t seed);

/** Window of L normalised demand values whose first entry sits at time index t0. */
struct ForecastWindow {
  std::vector<double> demand;
  int t0 = 0;
};

/** Input vector at absolute time t for a normalised demand value. */
Eigen::VectorXd input_vector(const LiquidModel& m, double demand, int t);

Eigen::VectorXd layer_norm(const Eigen::VectorXd& v, double eps);
Eigen::VectorXd cell_step(const LiquidModel& m, const Eigen::VectorXd& z, const Eigen::VectorXd& h, double dv);
Eigen::VectorXd encode(const LiquidModel& m, const ForecastWindow& w, double dv = 1.0);
Eigen::VectorXd readout(const LiquidModel& m, const Eigen::VectorXd& h);
Eigen::VectorXd predict(const LiquidModel& m, const ForecastWindow& w, double dv = 1.0);

struct LossSpec {
  int K = 0;               ///< closed-loop rollout depth
  double lambda = 0.0;     ///< weight decay
  double data_weight = 1.0;
  double dv = 1.0;
};

/** targets must hold at least max(H, K) normalised values following the window. */
double loss(const LiquidModel& m, const ForecastWindow& w, const std::vector<double>& targets, const LossSpec& spec);

/** Analytic gradient of loss() with respect to every parameter. */
LiquidParams gradient(const LiquidModel& m, const ForecastWindow& w, const std::vector<double>& targets,
                      const LossSpec& spec, double* loss_out = nullptr);

/** Central finite differences of loss() with the given step; the reference for gradient(). */
LiquidParams numeric_gradient(const LiquidModel& m, const ForecastWindow& w, const std::vector<double>& targets,
                              const LossSpec& spec, double step = 1e-5);

struct TrainConfig {
  int L = 48;
  int H = 10;
  double learning_rate = 0.05;
  int K = 2;
  double lambda = 1e-5;
  int batch_size = 16;
  int epochs = 20;
  double dv = 1.0;
  std::uint64_t seed = 1;
  int hidden = 58;
  int readout_hidden = 58;
  int day_period = 24;
  bool time_features = true;

  void validate() const;
};

struct TrainResult {
  LiquidModel model;
  double initial_loss = 0.0;  ///< mean training loss of the initial model
  double final_loss = 0.0;    ///< mean training loss of the returned model
  std::vector<double> epoch_loss;  ///< mean mini-batch loss seen during each epoch
};

/** Trains one model shared across all series (each a time-aligned demand sequence). */
TrainResult train(const std::vector<std::vector<double>>& series, const TrainConfig& cfg);

/** Mean loss over every training window of the (already normalised) series. */
double dataset_loss(const LiquidModel& m, const std::vector<std::vector<double>>& normalized, const TrainConfig& cfg);

/** Forecast H raw-scale values following the last L entries of a raw series ending at time t_end. */
std::vector<double> forecast_next(const LiquidModel& m, const std::vector<double>& raw_history, int t_end,
                                  int L);

struct BurstSpec {
  double rate = 0.02;       ///< probability that a burst starts at a given step
  double magnitude = 0.5;   ///< additive shock height
};

/**
 * Masks entries at missing_rate and forward-fills them (the first entry is
 * always kept), adds Gaussian noise, then adds bursts of 1-3 steps.
 */
std::vector<double> corrupt(const std::vector<double>& series, double missing_rate, double noise_sigma,
                            const BurstSpec& bursts, std::uint64_t seed);

/** Mean squared error of the last-value predictor over the given windows. */
double persistence_mse(const std::vector<double>& inputs, const std::vector<double>& truth, int L, int H);

/** Mean squared H-step error of the model with windows from inputs and targets from truth. */
double model_mse(const LiquidModel& m, const std::vector<double>& inputs, const std::vector<double>& truth, int L,
                 int H, int t_offset = 0);

void to_json(nlohmann::json& j, const LiquidModel& m);
void from_json(const nlohmann::json& j, LiquidModel& m);

}  // namespace edgemkt

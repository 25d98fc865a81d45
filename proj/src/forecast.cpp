#include "edgemkt/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgemkt/errors.hpp"
#include "edgemkt/rng.hpp"

namespace edgemkt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------- parameters

LiquidParams LiquidParams::zeros(const LiquidShape& s) {
  LiquidParams p;
  const int d = s.hidden;
  p.W_tau = MatrixXd::Zero(d, s.input_dim + d);
  p.W_h = MatrixXd::Zero(d, d);
  p.W_x = MatrixXd::Zero(d, s.input_dim);
  p.b = VectorXd::Zero(d);
  p.R1 = MatrixXd::Zero(s.readout_hidden, d);
  p.c1 = VectorXd::Zero(s.readout_hidden);
  p.R2 = MatrixXd::Zero(s.horizon, s.readout_hidden);
  p.c2 = VectorXd::Zero(s.horizon);
  return p;
}

std::size_t LiquidParams::size() const {
  return static_cast<std::size_t>(W_tau.size() + W_h.size() + W_x.size() + b.size() + R1.size() + c1.size() +
                                  R2.size() + c2.size());
}

namespace {

template <class F>
void for_each_block(LiquidParams& p, F&& f) {
  f(p.W_tau.data(), p.W_tau.size(), true);
  f(p.W_h.data(), p.W_h.size(), true);
  f(p.W_x.data(), p.W_x.size(), true);
  f(p.b.data(), p.b.size(), false);
  f(p.R1.data(), p.R1.size(), true);
  f(p.c1.data(), p.c1.size(), false);
  f(p.R2.data(), p.R2.size(), true);
  f(p.c2.data(), p.c2.size(), false);
}

template <class F>
void for_each_block(const LiquidParams& p, F&& f) {
  for_each_block(const_cast<LiquidParams&>(p), [&](double* data, Eigen::Index n, bool is_weight) {
    f(static_cast<const double*>(data), n, is_weight);
  });
}

/** Row-major copy-out for serialisation; Eigen stores column-major. */
std::vector<double> row_major(const MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

MatrixXd from_row_major(const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) throw InputError("weight array has the wrong length");
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
  return m;
}

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::vector<double> LiquidParams::flatten() const {
  std::vector<double> out;
  out.reserve(size());
  for_each_block(*this, [&](const double* data, Eigen::Index n, bool) { out.insert(out.end(), data, data + n); });
  return out;
}

void LiquidParams::unflatten(const std::vector<double>& flat) {
  require(flat.size() == size(), "flat parameter vector has the wrong length");
  std::size_t off = 0;
  for_each_block(*this, [&](double* data, Eigen::Index n, bool) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off), flat.begin() + static_cast<std::ptrdiff_t>(off + n),
              data);
    off += static_cast<std::size_t>(n);
  });
}

void LiquidParams::axpy(double a, const LiquidParams& o) {
  W_tau += a * o.W_tau;
  W_h += a * o.W_h;
  W_x += a * o.W_x;
  b += a * o.b;
  R1 += a * o.R1;
  c1 += a * o.c1;
  R2 += a * o.R2;
  c2 += a * o.c2;
}

double LiquidParams::weight_l2() const {
  return W_tau.squaredNorm() + W_h.squaredNorm() + W_x.squaredNorm() + R1.squaredNorm() + R2.squaredNorm();
}

std::size_t LiquidModel::parameter_count_formula(const LiquidShape& s) {
  const std::size_t d = static_cast<std::size_t>(s.hidden);
  const std::size_t in = static_cast<std::size_t>(s.input_dim);
  const std::size_t m = static_cast<std::size_t>(s.readout_hidden);
  const std::size_t H = static_cast<std::size_t>(s.horizon);
  return d * (in + d) + d * d + d * in + d + m * d + m + H * m + H;
}

void LiquidModel::validate() const {
  require(shape.input_dim >= 1 && shape.hidden >= 1 && shape.readout_hidden >= 1 && shape.horizon >= 1,
          "model dimensions must be positive");
  require(tau_min > 0.0 && tau_min <= tau_max, "require 0 < tau_min <= tau_max");
  require(alpha_min > 0.0 && alpha_min <= alpha_max && alpha_max < 1.0, "require 0 < alpha_min <= alpha_max < 1");
  require(gamma_res >= 0.0, "gamma_res must be non-negative");
  const auto z = LiquidParams::zeros(shape);
  require(params.W_tau.rows() == z.W_tau.rows() && params.W_tau.cols() == z.W_tau.cols() &&
              params.W_h.rows() == z.W_h.rows() && params.W_x.cols() == z.W_x.cols() && params.b.size() == z.b.size() &&
              params.R1.rows() == z.R1.rows() && params.R1.cols() == z.R1.cols() && params.R2.rows() == z.R2.rows() &&
              params.c1.size() == z.c1.size() && params.c2.size() == z.c2.size(),
          "parameter tensors do not match the model shape");
  const auto flat = params.flatten();
  require(std::all_of(flat.begin(), flat.end(), [](double v) { return std::isfinite(v); }),
          "model weights must be finite");
}

double LiquidModel::normalize(double v) const {
  const double span = scale_hi - scale_lo;
  return span > 0.0 ? (v - scale_lo) / span : v - scale_lo;
}

double LiquidModel::denormalize(double v) const {
  const double span = scale_hi - scale_lo;
  return span > 0.0 ? scale_lo + v * span : scale_lo + v;
}

LiquidModel init_model(const LiquidShape& shape, std::uint64_t seed) {
  LiquidModel m;
  m.shape = shape;
  m.params = LiquidParams::zeros(shape);
  Rng rng = Rng(seed).split("liquid-init");
  auto fill = [&](MatrixXd& w) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-limit, limit);
  };
  fill(m.params.W_tau);
  fill(m.params.W_h);
  fill(m.params.W_x);
  fill(m.params.R1);
  fill(m.params.R2);
  return m;
}

// ---------------------------------------------------------------- forward

VectorXd input_vector(const LiquidModel& m, double demand, int t) {
  VectorXd z(m.shape.input_dim);
  z(0) = demand;
  if (m.shape.input_dim >= 3) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(m.day_period);
    z(1) = std::sin(ang);
    z(2) = std::cos(ang);
    for (int i = 3; i < m.shape.input_dim; ++i) z(i) = 0.0;
  } else {
    for (int i = 1; i < m.shape.input_dim; ++i) z(i) = 0.0;
  }
  return z;
}

VectorXd layer_norm(const VectorXd& v, double eps) {
  if (v.size() <= 1) return v;
  const double mu = v.mean();
  const VectorXd c = v.array() - mu;
  const double var = c.squaredNorm() / static_cast<double>(v.size());
  return c / std::sqrt(var + eps);
}

namespace {

struct StepCache {
  VectorXd z, h_prev, zh, a, tau, alpha, ht, xhat_u, xhat_h, r;
  Eigen::Array<bool, Eigen::Dynamic, 1> tau_free, alpha_free;
  double sig_u = 1.0, sig_h = 1.0;
};

struct LnOut {
  VectorXd y;
  double sigma = 1.0;
};

LnOut ln_forward(const VectorXd& v, double eps) {
  if (v.size() <= 1) return {v, 1.0};
  const double mu = v.mean();
  const VectorXd c = v.array() - mu;
  const double sigma = std::sqrt(c.squaredNorm() / static_cast<double>(v.size()) + eps);
  return {c / sigma, sigma};
}

VectorXd ln_backward(const VectorXd& dy, const VectorXd& xhat, double sigma) {
  if (dy.size() <= 1) return dy;
  const double n = static_cast<double>(dy.size());
  const double mean_dy = dy.sum() / n;
  const double mean_dyx = dy.dot(xhat) / n;
  return (dy.array() - mean_dy - xhat.array() * mean_dyx).matrix() / sigma;
}

VectorXd step_forward(const LiquidModel& m, const VectorXd& z, const VectorXd& h, double dv, StepCache* cache) {
  const auto& p = m.params;
  const int d = m.shape.hidden;
  VectorXd zh(z.size() + h.size());
  zh << z, h;
  const VectorXd a = p.W_tau * zh;
  VectorXd tau(d), alpha(d);
  Eigen::Array<bool, Eigen::Dynamic, 1> tau_free(d), alpha_free(d);
  for (int i = 0; i < d; ++i) {
    const double raw = softplus(a(i)) + m.tau_min;
    tau_free(i) = raw < m.tau_max;
    tau(i) = std::clamp(raw, m.tau_min, m.tau_max);
    const double ratio = dv / tau(i);
    alpha_free(i) = ratio > m.alpha_min && ratio < m.alpha_max;
    alpha(i) = std::clamp(ratio, m.alpha_min, m.alpha_max);
  }
  const VectorXd u = p.W_h * h + p.W_x * z + p.b;
  const LnOut lu = ln_forward(u, m.ln_eps);
  const VectorXd ht = lu.y.array().tanh();
  const LnOut lh = ln_forward(h, m.ln_eps);
  const VectorXd r = lh.y.array().tanh();
  VectorXd out = ((1.0 - alpha.array()) * h.array() + alpha.array() * ht.array() + m.gamma_res * r.array()).matrix();
  if (cache) {
    cache->z = z;
    cache->h_prev = h;
    cache->zh = std::move(zh);
    cache->a = a;
    cache->tau = tau;
    cache->alpha = alpha;
    cache->tau_free = tau_free;
    cache->alpha_free = alpha_free;
    cache->ht = ht;
    cache->xhat_u = lu.y;
    cache->sig_u = lu.sigma;
    cache->xhat_h = lh.y;
    cache->sig_h = lh.sigma;
    cache->r = r;
  }
  return out;
}

/** Backpropagates dh_out through one step; accumulates into g and returns dh_prev, writes dz. */
VectorXd step_backward(const LiquidModel& m, const StepCache& c, const VectorXd& dh_out, double dv, LiquidParams& g,
                       VectorXd& dz) {
  const auto& p = m.params;
  const int in = m.shape.input_dim;
  const int d = m.shape.hidden;
  VectorXd dh_prev = (dh_out.array() * (1.0 - c.alpha.array())).matrix();

  const VectorXd dht = (dh_out.array() * c.alpha.array()).matrix();
  const VectorXd dxu = (dht.array() * (1.0 - c.ht.array().square())).matrix();
  const VectorXd du = ln_backward(dxu, c.xhat_u, c.sig_u);
  g.W_h.noalias() += du * c.h_prev.transpose();
  g.W_x.noalias() += du * c.z.transpose();
  g.b += du;
  dh_prev.noalias() += p.W_h.transpose() * du;
  dz.noalias() = p.W_x.transpose() * du;

  if (m.gamma_res != 0.0) {
    const VectorXd dxh = (m.gamma_res * dh_out.array() * (1.0 - c.r.array().square())).matrix();
    dh_prev += ln_backward(dxh, c.xhat_h, c.sig_h);
  }

  VectorXd da(d);
  for (int i = 0; i < d; ++i) {
    const double dalpha = dh_out(i) * (c.ht(i) - c.h_prev(i));
    double v = 0.0;
    if (c.alpha_free(i) && c.tau_free(i)) {
      const double dtau = dalpha * (-dv / (c.tau(i) * c.tau(i)));
      v = dtau * sigmoid(c.a(i));
    }
    da(i) = v;
  }
  g.W_tau.noalias() += da * c.zh.transpose();
  const VectorXd dzh = p.W_tau.transpose() * da;
  dz += dzh.head(in);
  dh_prev += dzh.tail(d);
  return dh_prev;
}

std::vector<VectorXd> window_inputs(const LiquidModel& m, const ForecastWindow& w) {
  std::vector<VectorXd> zs;
  zs.reserve(w.demand.size());
  for (std::size_t t = 0; t < w.demand.size(); ++t)
    zs.push_back(input_vector(m, w.demand[t], w.t0 + static_cast<int>(t)));
  return zs;
}

VectorXd encode_inputs(const LiquidModel& m, const std::vector<VectorXd>& zs, double dv, std::vector<StepCache>* caches) {
  VectorXd h = VectorXd::Zero(m.shape.hidden);
  if (caches) caches->resize(zs.size());
  for (std::size_t t = 0; t < zs.size(); ++t) h = step_forward(m, zs[t], h, dv, caches ? &(*caches)[t] : nullptr);
  return h;
}

struct ReadoutCache {
  VectorXd h, q;
};

VectorXd readout_forward(const LiquidModel& m, const VectorXd& h, ReadoutCache* c) {
  const VectorXd q = (m.params.R1 * h + m.params.c1).array().tanh();
  if (c) {
    c->h = h;
    c->q = q;
  }
  return m.params.R2 * q + m.params.c2;
}

VectorXd readout_backward(const LiquidModel& m, const ReadoutCache& c, const VectorXd& dy, LiquidParams& g) {
  g.R2.noalias() += dy * c.q.transpose();
  g.c2 += dy;
  const VectorXd dq = m.params.R2.transpose() * dy;
  const VectorXd dpre = (dq.array() * (1.0 - c.q.array().square())).matrix();
  g.R1.noalias() += dpre * c.h.transpose();
  g.c1 += dpre;
  return m.params.R1.transpose() * dpre;
}

/** Inputs of the k-th rollout window (k >= 1): the base window shifted by k-1 with predictions appended. */
std::vector<VectorXd> rollout_inputs(const LiquidModel& m, const ForecastWindow& w, const std::vector<double>& preds,
                                     int k) {
  const int L = static_cast<int>(w.demand.size());
  std::vector<VectorXd> zs;
  zs.reserve(static_cast<std::size_t>(L));
  for (int pos = 0; pos < L; ++pos) {
    const int src = pos + (k - 1);  // index into the extended sequence
    const double v = src < L ? w.demand[static_cast<std::size_t>(src)] : preds[static_cast<std::size_t>(src - L)];
    zs.push_back(input_vector(m, v, w.t0 + src));
  }
  return zs;
}

void check_loss_inputs(const LiquidModel& m, const ForecastWindow& w, const std::vector<double>& targets,
                       const LossSpec& spec) {
  require(!w.demand.empty(), "forecast window must not be empty");
  require(spec.K >= 0, "K must be non-negative");
  require(static_cast<int>(targets.size()) >= std::max(m.shape.horizon, spec.K),
          "not enough targets for the horizon and rollout depth");
  require(spec.dv > 0.0, "slot gap must be positive");
}

}  // namespace

VectorXd cell_step(const LiquidModel& m, const VectorXd& z, const VectorXd& h, double dv) {
  require(z.size() == m.shape.input_dim && h.size() == m.shape.hidden, "cell_step: dimension mismatch");
  require(dv > 0.0, "cell_step: slot gap must be positive");
  return step_forward(m, z, h, dv, nullptr);
}

VectorXd encode(const LiquidModel& m, const ForecastWindow& w, double dv) {
  return encode_inputs(m, window_inputs(m, w), dv, nullptr);
}

VectorXd readout(const LiquidModel& m, const VectorXd& h) { return readout_forward(m, h, nullptr); }

VectorXd predict(const LiquidModel& m, const ForecastWindow& w, double dv) { return readout(m, encode(m, w, dv)); }

double loss(const LiquidModel& m, const ForecastWindow& w, const std::vector<double>& targets, const LossSpec& spec) {
  check_loss_inputs(m, w, targets, spec);
  const int H = m.shape.horizon;
  const VectorXd y = predict(m, w, spec.dv);
  double sse = 0.0;
  for (int h = 0; h < H; ++h) sse += (y(h) - targets[static_cast<std::size_t>(h)]) * (y(h) - targets[static_cast<std::size_t>(h)]);
  std::vector<double> preds;
  for (int k = 1; k <= spec.K; ++k) {
    const double pk = readout(m, encode_inputs(m, rollout_inputs(m, w, preds, k), spec.dv, nullptr))(0);
    const double e = pk - targets[static_cast<std::size_t>(k - 1)];
    sse += e * e;
    preds.push_back(pk);
  }
  return spec.data_weight * sse / static_cast<double>(H + spec.K) + spec.lambda * m.params.weight_l2();
}

LiquidParams gradient(const LiquidModel& m, const ForecastWindow& w, const std::vector<double>& targets,
                      const LossSpec& spec, double* loss_out) {
  check_loss_inputs(m, w, targets, spec);
  const int H = m.shape.horizon;
  const int L = static_cast<int>(w.demand.size());
  const double norm = spec.data_weight / static_cast<double>(H + spec.K);
  LiquidParams g = LiquidParams::zeros(m.shape);

  // Base H-step term.
  std::vector<StepCache> base_cache;
  ReadoutCache base_rc;
  const VectorXd y = readout_forward(m, encode_inputs(m, window_inputs(m, w), spec.dv, &base_cache), &base_rc);
  double sse = 0.0;
  VectorXd dy(H);
  for (int h = 0; h < H; ++h) {
    const double e = y(h) - targets[static_cast<std::size_t>(h)];
    sse += e * e;
    dy(h) = 2.0 * e * norm;
  }
  VectorXd dz;
  {
    VectorXd dh = readout_backward(m, base_rc, dy, g);
    for (int t = L - 1; t >= 0; --t) dh = step_backward(m, base_cache[static_cast<std::size_t>(t)], dh, spec.dv, g, dz);
  }

  // Closed-loop rollouts: forward all, then backward from the deepest.
  std::vector<double> preds;
  std::vector<std::vector<StepCache>> caches(static_cast<std::size_t>(spec.K));
  std::vector<ReadoutCache> rcs(static_cast<std::size_t>(spec.K));
  std::vector<double> gpred(static_cast<std::size_t>(spec.K), 0.0);
  for (int k = 1; k <= spec.K; ++k) {
    const auto zs = rollout_inputs(m, w, preds, k);
    const VectorXd yk = readout_forward(m, encode_inputs(m, zs, spec.dv, &caches[static_cast<std::size_t>(k - 1)]),
                                       &rcs[static_cast<std::size_t>(k - 1)]);
    const double e = yk(0) - targets[static_cast<std::size_t>(k - 1)];
    sse += e * e;
    gpred[static_cast<std::size_t>(k - 1)] = 2.0 * e * norm;
    preds.push_back(yk(0));
  }
  for (int k = spec.K; k >= 1; --k) {
    VectorXd dyk = VectorXd::Zero(H);
    dyk(0) = gpred[static_cast<std::size_t>(k - 1)];
    VectorXd dh = readout_backward(m, rcs[static_cast<std::size_t>(k - 1)], dyk, g);
    const auto& cache = caches[static_cast<std::size_t>(k - 1)];
    for (int pos = L - 1; pos >= 0; --pos) {
      dh = step_backward(m, cache[static_cast<std::size_t>(pos)], dh, spec.dv, g, dz);
      const int src = pos + (k - 1);
      if (src >= L) gpred[static_cast<std::size_t>(src - L)] += dz(0);
    }
  }

  if (spec.lambda != 0.0) {
    const double s = 2.0 * spec.lambda;
    g.W_tau += s * m.params.W_tau;
    g.W_h += s * m.params.W_h;
    g.W_x += s * m.params.W_x;
    g.R1 += s * m.params.R1;
    g.R2 += s * m.params.R2;
  }
  if (loss_out) *loss_out = spec.data_weight * sse / static_cast<double>(H + spec.K) + spec.lambda * m.params.weight_l2();
  return g;
}

LiquidParams numeric_gradient(const LiquidModel& m, const ForecastWindow& w, const std::vector<double>& targets,
                              const LossSpec& spec, double step) {
  require(step > 0.0, "numeric_gradient: step must be positive");
  std::vector<double> flat = m.params.flatten();
  std::vector<double> grad(flat.size(), 0.0);
  LiquidModel probe = m;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double orig = flat[i];
    flat[i] = orig + step;
    probe.params.unflatten(flat);
    const double up = loss(probe, w, targets, spec);
    flat[i] = orig - step;
    probe.params.unflatten(flat);
    const double down = loss(probe, w, targets, spec);
    flat[i] = orig;
    grad[i] = (up - down) / (2.0 * step);
  }
  LiquidParams g = LiquidParams::zeros(m.shape);
  g.unflatten(grad);
  return g;
}

// ---------------------------------------------------------------- training

void TrainConfig::validate() const {
  if (L < 1 || H < 1 || K < 0) throw ConfigError("train config: require L >= 1, H >= 1, K >= 0");
  if (!(learning_rate > 0.0) || lambda < 0.0) throw ConfigError("train config: require learning_rate > 0, lambda >= 0");
  if (batch_size < 1 || epochs < 0 || hidden < 1 || readout_hidden < 1 || day_period < 1)
    throw ConfigError("train config: sizes must be positive");
  if (!(dv > 0.0)) throw ConfigError("train config: dv must be positive");
}

namespace {

struct Sample {
  std::size_t series = 0;
  int start = 0;
};

int target_span(const TrainConfig& cfg) { return std::max(cfg.H, cfg.K); }

std::vector<Sample> training_samples(const std::vector<std::vector<double>>& norm, const TrainConfig& cfg) {
  std::vector<Sample> out;
  const int span = target_span(cfg);
  for (std::size_t s = 0; s < norm.size(); ++s) {
    const int n = static_cast<int>(norm[s].size());
    for (int t = 0; t + cfg.L + span <= n; ++t) out.push_back({s, t});
  }
  return out;
}

void sample_window(const std::vector<double>& series, int start, const TrainConfig& cfg, ForecastWindow& w,
                   std::vector<double>& targets) {
  w.t0 = start;
  w.demand.assign(series.begin() + start, series.begin() + start + cfg.L);
  targets.assign(series.begin() + start + cfg.L, series.begin() + start + cfg.L + target_span(cfg));
}

}  // namespace

double dataset_loss(const LiquidModel& m, const std::vector<std::vector<double>>& norm, const TrainConfig& cfg) {
  const auto samples = training_samples(norm, cfg);
  if (samples.empty()) return 0.0;
  const LossSpec spec{cfg.K, 0.0, 1.0, cfg.dv};
  double total = 0.0;
  ForecastWindow w;
  std::vector<double> targets;
  for (const auto& s : samples) {
    sample_window(norm[s.series], s.start, cfg, w, targets);
    total += loss(m, w, targets, spec);
  }
  return total / static_cast<double>(samples.size()) + cfg.lambda * m.params.weight_l2();
}

TrainResult train(const std::vector<std::vector<double>>& series, const TrainConfig& cfg) {
  cfg.validate();
  if (series.empty()) throw InputError("train: no series given");
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    if (static_cast<int>(s.size()) < cfg.L + cfg.H + cfg.K)
      throw InputError("train: series shorter than L + H + K");
    for (double v : s) {
      if (!std::isfinite(v)) throw InputError("train: series contains non-finite values");
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  LiquidShape shape;
  shape.input_dim = cfg.time_features ? 3 : 1;
  shape.hidden = cfg.hidden;
  shape.readout_hidden = cfg.readout_hidden;
  shape.horizon = cfg.H;
  TrainResult res;
  res.model = init_model(shape, cfg.seed);
  res.model.day_period = cfg.day_period;
  res.model.scale_lo = lo;
  res.model.scale_hi = hi > lo ? hi : lo + 1.0;

  std::vector<std::vector<double>> norm;
  for (const auto& s : series) {
    std::vector<double> n;
    n.reserve(s.size());
    for (double v : s) n.push_back(res.model.normalize(v));
    norm.push_back(std::move(n));
  }
  auto samples = training_samples(norm, cfg);
  res.initial_loss = dataset_loss(res.model, norm, cfg);

  Rng rng = Rng(cfg.seed).split("liquid-train");
  const LossSpec data_spec{cfg.K, 0.0, 1.0, cfg.dv};
  ForecastWindow w;
  std::vector<double> targets;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(samples);
    double epoch_total = 0.0;
    std::size_t batches = 0;
    for (std::size_t off = 0; off < samples.size(); off += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(samples.size(), off + static_cast<std::size_t>(cfg.batch_size));
      LiquidParams g = LiquidParams::zeros(shape);
      double batch_loss = 0.0;
      for (std::size_t i = off; i < end; ++i) {
        sample_window(norm[samples[i].series], samples[i].start, cfg, w, targets);
        double l = 0.0;
        g.axpy(1.0, gradient(res.model, w, targets, data_spec, &l));
        batch_loss += l;
      }
      const double inv = 1.0 / static_cast<double>(end - off);
      g.W_tau = g.W_tau * inv + 2.0 * cfg.lambda * res.model.params.W_tau;
      g.W_h = g.W_h * inv + 2.0 * cfg.lambda * res.model.params.W_h;
      g.W_x = g.W_x * inv + 2.0 * cfg.lambda * res.model.params.W_x;
      g.b *= inv;
      g.R1 = g.R1 * inv + 2.0 * cfg.lambda * res.model.params.R1;
      g.c1 *= inv;
      g.R2 = g.R2 * inv + 2.0 * cfg.lambda * res.model.params.R2;
      g.c2 *= inv;
      epoch_total += batch_loss * inv + cfg.lambda * res.model.params.weight_l2();
      ++batches;
      res.model.params.axpy(-cfg.learning_rate, g);
    }
    res.epoch_loss.push_back(batches ? epoch_total / static_cast<double>(batches) : 0.0);
  }
  res.final_loss = dataset_loss(res.model, norm, cfg);
  return res;
}

std::vector<double> forecast_next(const LiquidModel& m, const std::vector<double>& raw, int t_end, int L) {
  require(L >= 1 && static_cast<int>(raw.size()) >= L, "forecast_next: history shorter than L");
  ForecastWindow w;
  w.t0 = t_end - L + 1;
  for (std::size_t i = raw.size() - static_cast<std::size_t>(L); i < raw.size(); ++i) w.demand.push_back(m.normalize(raw[i]));
  const VectorXd y = predict(m, w);
  std::vector<double> out;
  for (Eigen::Index h = 0; h < y.size(); ++h) out.push_back(m.denormalize(y(h)));
  return out;
}

// ---------------------------------------------------------------- corruption and baselines

std::vector<double> corrupt(const std::vector<double>& series, double missing_rate, double noise_sigma,
                            const BurstSpec& bursts, std::uint64_t seed) {
  require(missing_rate >= 0.0 && missing_rate <= 1.0, "missing_rate must lie in [0,1]");
  require(noise_sigma >= 0.0, "noise_sigma must be non-negative");
  require(bursts.rate >= 0.0 && bursts.rate <= 1.0, "burst rate must lie in [0,1]");
  const Rng root(seed);
  Rng mask_rng = root.split("mask");
  Rng noise_rng = root.split("noise");
  Rng burst_rng = root.split("burst");
  std::vector<double> out(series);
  for (std::size_t t = 1; t < out.size(); ++t)
    if (mask_rng.uniform01() < missing_rate) out[t] = out[t - 1];
  if (noise_sigma > 0.0)
    for (double& v : out) v += noise_rng.normal(0.0, noise_sigma);
  if (bursts.rate > 0.0 && bursts.magnitude != 0.0) {
    for (std::size_t t = 0; t < out.size();) {
      if (burst_rng.uniform01() < bursts.rate) {
        const auto len = static_cast<std::size_t>(burst_rng.uniform_int(1, 3));
        for (std::size_t i = t; i < std::min(out.size(), t + len); ++i) out[i] += bursts.magnitude;
        t += len;
      } else {
        ++t;
      }
    }
  }
  return out;
}

double persistence_mse(const std::vector<double>& inputs, const std::vector<double>& truth, int L, int H) {
  require(inputs.size() == truth.size(), "persistence_mse: length mismatch");
  double total = 0.0;
  std::size_t count = 0;
  for (int t = 0; t + L + H <= static_cast<int>(truth.size()); ++t) {
    const double last = inputs[static_cast<std::size_t>(t + L - 1)];
    for (int h = 0; h < H; ++h) {
      const double e = last - truth[static_cast<std::size_t>(t + L + h)];
      total += e * e;
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

double model_mse(const LiquidModel& m, const std::vector<double>& inputs, const std::vector<double>& truth, int L, int H,
                 int t_offset) {
  require(inputs.size() == truth.size(), "model_mse: length mismatch");
  require(H <= m.shape.horizon, "model_mse: horizon exceeds model horizon");
  double total = 0.0;
  std::size_t count = 0;
  ForecastWindow w;
  for (int t = 0; t + L + H <= static_cast<int>(truth.size()); ++t) {
    w.t0 = t_offset + t;
    w.demand.assign(inputs.begin() + t, inputs.begin() + t + L);
    const VectorXd y = predict(m, w);
    for (int h = 0; h < H; ++h) {
      const double e = y(h) - truth[static_cast<std::size_t>(t + L + h)];
      total += e * e;
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

// ---------------------------------------------------------------- JSON

void to_json(nlohmann::json& j, const LiquidModel& m) {
  const auto& p = m.params;
  j = nlohmann::json{
      {"shape",
       {{"input_dim", m.shape.input_dim},
        {"hidden", m.shape.hidden},
        {"readout_hidden", m.shape.readout_hidden},
        {"horizon", m.shape.horizon}}},
      {"bounds",
       {{"tau_min", m.tau_min},
        {"tau_max", m.tau_max},
        {"alpha_min", m.alpha_min},
        {"alpha_max", m.alpha_max},
        {"gamma_res", m.gamma_res},
        {"ln_eps", m.ln_eps}}},
      {"day_period", m.day_period},
      {"scale", {m.scale_lo, m.scale_hi}},
      {"weights",
       {{"W_tau", row_major(p.W_tau)},
        {"W_h", row_major(p.W_h)},
        {"W_x", row_major(p.W_x)},
        {"b", std::vector<double>(p.b.data(), p.b.data() + p.b.size())},
        {"R1", row_major(p.R1)},
        {"c1", std::vector<double>(p.c1.data(), p.c1.data() + p.c1.size())},
        {"R2", row_major(p.R2)},
        {"c2", std::vector<double>(p.c2.data(), p.c2.data() + p.c2.size())}}}};
}

void from_json(const nlohmann::json& j, LiquidModel& m) {
  const auto& s = j.at("shape");
  m.shape.input_dim = s.at("input_dim").get<int>();
  m.shape.hidden = s.at("hidden").get<int>();
  m.shape.readout_hidden = s.at("readout_hidden").get<int>();
  m.shape.horizon = s.at("horizon").get<int>();
  const auto& b = j.at("bounds");
  m.tau_min = b.at("tau_min").get<double>();
  m.tau_max = b.at("tau_max").get<double>();
  m.alpha_min = b.at("alpha_min").get<double>();
  m.alpha_max = b.at("alpha_max").get<double>();
  m.gamma_res = b.at("gamma_res").get<double>();
  m.ln_eps = b.at("ln_eps").get<double>();
  m.day_period = j.at("day_period").get<int>();
  m.scale_lo = j.at("scale").at(0).get<double>();
  m.scale_hi = j.at("scale").at(1).get<double>();
  const auto& w = j.at("weights");
  const int d = m.shape.hidden, in = m.shape.input_dim, r = m.shape.readout_hidden, H = m.shape.horizon;
  auto vec = [&](const char* key) {
    const auto v = w.at(key).get<std::vector<double>>();
    return VectorXd(Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  m.params.W_tau = from_row_major(w.at("W_tau").get<std::vector<double>>(), d, in + d);
  m.params.W_h = from_row_major(w.at("W_h").get<std::vector<double>>(), d, d);
  m.params.W_x = from_row_major(w.at("W_x").get<std::vector<double>>(), d, in);
  m.params.b = vec("b");
  m.params.R1 = from_row_major(w.at("R1").get<std::vector<double>>(), r, d);
  m.params.c1 = vec("c1");
  m.params.R2 = from_row_major(w.at("R2").get<std::vector<double>>(), H, r);
  m.params.c2 = vec("c2");
  m.validate();
}

}  // namespace edgemkt

#include "edgemkt/online_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "edgemkt/errors.hpp"

namespace edgemkt {

double OnlineInstance::kappa(int sd) const {
  const Demander& d = demanders[static_cast<std::size_t>(sd)];
  return d.kind == UserKind::Machine ? d.reward / d.deadline_s : economy.v_time_hu;
}

const Link* OnlineInstance::link(int sd, int sp) const {
  for (const Link& l : demanders[static_cast<std::size_t>(sd)].links)
    if (l.provider == sp) return &l;
  return nullptr;
}

void OnlineInstance::validate() const {
  for (const auto& p : providers) require(p.compute_hz > 0.0 && p.capacity >= 0, "provider compute must be positive");
  for (std::size_t j = 0; j < demanders.size(); ++j) {
    const auto& d = demanders[j];
    require(d.local_hz > 0.0 && d.cycles >= 0.0, "demander local compute must be positive");
    if (d.kind == UserKind::Machine) require(d.deadline_s > 0.0, "machine-user deadline must be positive");
    require(kappa(static_cast<int>(j)) > 0.0, "congestion sensitivity must be positive");
    for (const auto& l : d.links) {
      require(l.provider >= 0 && l.provider < static_cast<int>(providers.size()), "link to unknown provider");
      require(l.gamma > 0.0, "weights must be positive");
    }
  }
}

double congestion_weight(double kappa, double cycles) { return std::sqrt(kappa * cycles); }

namespace {

Link make_link(const ServiceDemander& sd, int provider_index, const Provider& sp, double kappa,
               const ChannelConfig& ch) {
  Link l;
  l.provider = provider_index;
  l.gamma = congestion_weight(kappa, sd.workload_cycles);
  const double rate = link_rate(sd.tx_power_w, sd.loc, sp.loc, sp.kind == ProviderKind::Uav, ch);
  l.t_tx = rate > 0.0 ? sd.data_bits / rate : std::numeric_limits<double>::infinity();
  l.e_tx = sd.tx_power_w * l.t_tx;
  return l;
}

}  // namespace

OnlineInstance build_online_instance(const Scenario& s, const std::vector<UavDeployment>& uavs) {
  OnlineInstance inst;
  inst.economy = s.config.economy;
  std::vector<std::vector<int>> at_es(s.ess.size());
  auto es_index = [&](int id) {
    for (std::size_t i = 0; i < s.ess.size(); ++i)
      if (s.ess[i].id == id) return static_cast<int>(i);
    throw ContractViolation("unknown ES id " + std::to_string(id));
  };
  for (const auto& es : s.ess) {
    Provider p;
    p.id = static_cast<int>(inst.providers.size());
    p.kind = ProviderKind::EdgeServer;
    p.compute_hz = es.compute_hz;
    p.capacity = es.subcarrier_cap;
    p.power_w = es.power_w;
    p.loc = es.loc;
    p.host_es = es.id;
    at_es[static_cast<std::size_t>(es_index(es.id))].push_back(p.id);
    inst.providers.push_back(p);
  }
  for (const auto& u : uavs) {
    const int ei = es_index(u.es_id);
    for (int c = 0; c < u.count; ++c) {
      Provider p;
      p.id = static_cast<int>(inst.providers.size());
      p.kind = ProviderKind::Uav;
      p.compute_hz = u.ap.uav_compute_hz;
      p.capacity = u.ap.per_uav_cap;
      p.power_w = u.ap.power_comp_w;
      p.loc = s.ess[static_cast<std::size_t>(ei)].loc;
      p.loc.h = s.config.uav_altitude;
      p.host_es = u.es_id;
      at_es[static_cast<std::size_t>(ei)].push_back(p.id);
      inst.providers.push_back(p);
    }
  }
  auto add = [&](const ServiceDemander& sd) {
    Demander d;
    d.id = static_cast<int>(inst.demanders.size());
    d.kind = sd.kind;
    d.cycles = sd.workload_cycles;
    d.bits = sd.data_bits;
    d.local_hz = sd.local_hz;
    d.local_power_w = sd.local_power_w;
    d.tx_power_w = sd.tx_power_w;
    d.deadline_s = sd.kind == UserKind::Machine ? sd.deadline_s : 1.0;
    d.reward = sd.reward;
    const double kappa = sd.kind == UserKind::Machine ? sd.reward / sd.deadline_s : s.config.economy.v_time_hu;
    for (int es_id : sd.coverage)
      for (int pi : at_es[static_cast<std::size_t>(es_index(es_id))])
        d.links.push_back(make_link(sd, pi, inst.providers[static_cast<std::size_t>(pi)], kappa, s.config.channel));
    inst.demanders.push_back(std::move(d));
  };
  for (const auto& h : s.hus) add(h);
  for (const auto& m : s.mus) add(m);
  inst.validate();
  return inst;
}

OnlineInstance random_instance(Rng& rng, const RandomInstanceSpec& spec, const EconomyConfig& economy) {
  OnlineInstance inst;
  inst.economy = economy;
  const int n_sp = static_cast<int>(rng.uniform_int(spec.min_sp, spec.max_sp));
  const int n_sd = static_cast<int>(rng.uniform_int(spec.min_sd, spec.max_sd));
  for (int i = 0; i < n_sp; ++i) {
    Provider p;
    p.id = i;
    p.kind = rng.uniform01() < spec.uav_fraction ? ProviderKind::Uav : ProviderKind::EdgeServer;
    p.compute_hz = p.kind == ProviderKind::Uav ? rng.uniform(spec.uav_compute.lo, spec.uav_compute.hi)
                                                : rng.uniform(spec.es_compute.lo, spec.es_compute.hi);
    p.capacity = static_cast<int>(rng.uniform_int(spec.capacity.lo, spec.capacity.hi));
    p.power_w = rng.uniform(spec.power.lo, spec.power.hi);
    inst.providers.push_back(p);
  }
  for (int j = 0; j < n_sd; ++j) {
    Demander d;
    d.id = j;
    d.kind = rng.uniform01() < spec.machine_fraction ? UserKind::Machine : UserKind::Human;
    d.cycles = d.kind == UserKind::Machine ? rng.uniform(spec.mu_cycles.lo, spec.mu_cycles.hi)
                                           : rng.uniform(spec.hu_cycles.lo, spec.hu_cycles.hi);
    d.bits = d.cycles / 600.0;
    d.local_hz = rng.uniform(spec.local_hz.lo, spec.local_hz.hi);
    d.local_power_w = rng.uniform(spec.local_power.lo, spec.local_power.hi);
    d.tx_power_w = rng.uniform(spec.tx_power.lo, spec.tx_power.hi);
    d.deadline_s = d.kind == UserKind::Machine ? rng.uniform(spec.deadline.lo, spec.deadline.hi) : 1.0;
    d.reward = d.kind == UserKind::Machine ? rng.uniform(spec.reward.lo, spec.reward.hi) : 0.0;
    const double kappa = d.kind == UserKind::Machine ? d.reward / d.deadline_s : economy.v_time_hu;
    for (int i = 0; i < n_sp; ++i) {
      if (rng.uniform01() >= spec.coverage_prob) continue;
      Link l;
      l.provider = i;
      l.gamma = congestion_weight(kappa, d.cycles);
      l.t_tx = rng.uniform(spec.t_tx.lo, spec.t_tx.hi);
      l.e_tx = d.tx_power_w * l.t_tx;
      d.links.push_back(l);
    }
    inst.demanders.push_back(std::move(d));
  }
  inst.validate();
  return inst;
}

bool profile_feasible(const OnlineInstance& inst, const Profile& pi) {
  if (pi.size() != inst.demanders.size()) return false;
  std::vector<int> count(inst.providers.size(), 0);
  for (std::size_t j = 0; j < pi.size(); ++j) {
    if (pi[j] == kLocal) continue;
    if (pi[j] < 0 || pi[j] >= static_cast<int>(inst.providers.size())) return false;
    if (!inst.link(static_cast<int>(j), pi[j])) return false;
    ++count[static_cast<std::size_t>(pi[j])];
  }
  for (std::size_t i = 0; i < count.size(); ++i)
    if (count[i] > inst.providers[i].capacity) return false;
  return true;
}

Loads loads(const OnlineInstance& inst, const Profile& pi) {
  require(profile_feasible(inst, pi), "loads: infeasible profile");
  Loads L;
  L.y.assign(inst.providers.size(), 0.0);
  L.cycles.assign(inst.providers.size(), 0.0);
  L.count.assign(inst.providers.size(), 0);
  for (std::size_t j = 0; j < pi.size(); ++j) {
    if (pi[j] == kLocal) continue;
    const auto i = static_cast<std::size_t>(pi[j]);
    L.y[i] += inst.link(static_cast<int>(j), pi[j])->gamma;
    L.cycles[i] += inst.demanders[j].cycles;
    ++L.count[i];
  }
  return L;
}

EdgeLatency edge_latency(const OnlineInstance& inst, int sd, int sp, double y) {
  const Link* l = inst.link(sd, sp);
  require(l != nullptr, "edge_latency: provider not covered");
  const Demander& d = inst.demanders[static_cast<std::size_t>(sd)];
  EdgeLatency e;
  e.t_comp = (d.cycles / l->gamma) * (y / inst.providers[static_cast<std::size_t>(sp)].compute_hz);
  e.t_tx = l->t_tx;
  e.total = e.t_comp + e.t_tx;
  return e;
}

double valuation(const OnlineInstance& inst, int sd, int sp) {
  if (sp == kLocal) return 0.0;
  const Link* l = inst.link(sd, sp);
  require(l != nullptr, "valuation: provider not covered");
  const Demander& d = inst.demanders[static_cast<std::size_t>(sd)];
  const double energy_saving = d.local_energy() - l->e_tx;
  if (d.kind == UserKind::Human)
    return inst.economy.v_time_hu * (d.local_time() - l->t_tx) + inst.economy.v_energy_hu * energy_saving;
  return d.reward - d.reward * l->t_tx / d.deadline_s + inst.economy.v_energy_mu * energy_saving;
}

namespace {

/** Load at sp with sd counted in, given the others follow pi. */
double load_with(const OnlineInstance& inst, const Profile& pi, int sd, int sp) {
  double y = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j)
    if (static_cast<int>(j) != sd && pi[j] == sp) y += inst.link(static_cast<int>(j), sp)->gamma;
  return y + inst.link(sd, sp)->gamma;
}

int count_without(const Profile& pi, int sd, int sp) {
  int n = 0;
  for (std::size_t j = 0; j < pi.size(); ++j)
    if (static_cast<int>(j) != sd && pi[j] == sp) ++n;
  return n;
}

double payment(const OnlineInstance& inst, int sd) {
  return inst.economy.tariff * inst.demanders[static_cast<std::size_t>(sd)].cycles;
}

/** Utility at a known post-move load. */
double utility_at(const OnlineInstance& inst, int sd, int sp, double y_with) {
  if (sp == kLocal) return 0.0;
  const Link* l = inst.link(sd, sp);
  const Demander& d = inst.demanders[static_cast<std::size_t>(sd)];
  const double theta = d.cycles / l->gamma;
  const double tau = y_with / inst.providers[static_cast<std::size_t>(sp)].compute_hz;
  return valuation(inst, sd, sp) - inst.kappa(sd) * theta * tau - payment(inst, sd);
}

double congestion_integral(double y, double f) { return y * y / (2.0 * f); }

/** Integral of z/f over [y, y + g], in a cancellation-free form. */
double congestion_step(double y, double g, double f) { return g * (y + 0.5 * g) / f; }

}  // namespace

double unified_utility(const OnlineInstance& inst, int sd, int action, const Profile& pi) {
  if (action == kLocal) return 0.0;
  require(inst.link(sd, action) != nullptr, "unified_utility: action not covered");
  return utility_at(inst, sd, action, load_with(inst, pi, sd, action));
}

double realized_utility(const OnlineInstance& inst, int sd, int action, const Profile& pi) {
  if (action == kLocal) return 0.0;
  require(inst.link(sd, action) != nullptr, "realized_utility: action not covered");
  const Demander& d = inst.demanders[static_cast<std::size_t>(sd)];
  if (d.kind == UserKind::Human) return unified_utility(inst, sd, action, pi);
  const EdgeLatency e = edge_latency(inst, sd, action, load_with(inst, pi, sd, action));
  const Link* l = inst.link(sd, action);
  const double value = d.reward * std::max(0.0, d.deadline_s - e.total) / d.deadline_s;
  return value + inst.economy.v_energy_mu * (d.local_energy() - l->e_tx) - payment(inst, sd);
}

double sp_cost(const OnlineInstance& inst, int sp, double cycles) {
  require(cycles >= 0.0, "sp_cost: workload must be non-negative");
  if (cycles == 0.0) return 0.0;
  const Provider& p = inst.providers[static_cast<std::size_t>(sp)];
  return inst.economy.omega1 * p.power_w * cycles / p.compute_hz + inst.economy.omega2 * inst.economy.c_hard;
}

double realized_welfare(const OnlineInstance& inst, const Profile& pi) {
  const Loads L = loads(inst, pi);
  double w = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) w += realized_utility(inst, static_cast<int>(j), pi[j], pi);
  for (std::size_t i = 0; i < inst.providers.size(); ++i) w -= sp_cost(inst, static_cast<int>(i), L.cycles[i]);
  return w;
}

double potential(const OnlineInstance& inst, const Profile& pi) {
  const Loads L = loads(inst, pi);
  double phi = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) phi += valuation(inst, static_cast<int>(j), pi[j]);
  for (std::size_t i = 0; i < inst.providers.size(); ++i) {
    phi -= congestion_integral(L.y[i], inst.providers[i].compute_hz);
    phi -= sp_cost(inst, static_cast<int>(i), L.cycles[i]);
  }
  return phi;
}

double potential_matrix(const OnlineInstance& inst, const Profile& pi) {
  require(profile_feasible(inst, pi), "potential_matrix: infeasible profile");
  const auto J = static_cast<Eigen::Index>(inst.demanders.size());
  const auto I = static_cast<Eigen::Index>(inst.providers.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(J, I), G = Eigen::MatrixXd::Zero(J, I), S = Eigen::MatrixXd::Zero(J, I);
  Eigen::VectorXd r(J), f(I), e(I);
  for (Eigen::Index j = 0; j < J; ++j) {
    r(j) = inst.demanders[static_cast<std::size_t>(j)].cycles;
    for (const Link& l : inst.demanders[static_cast<std::size_t>(j)].links) {
      G(j, l.provider) = l.gamma;
      S(j, l.provider) = valuation(inst, static_cast<int>(j), l.provider);
    }
    if (pi[static_cast<std::size_t>(j)] != kLocal) X(j, pi[static_cast<std::size_t>(j)]) = 1.0;
  }
  for (Eigen::Index i = 0; i < I; ++i) {
    f(i) = inst.providers[static_cast<std::size_t>(i)].compute_hz;
    e(i) = inst.providers[static_cast<std::size_t>(i)].power_w;
  }
  const Eigen::VectorXd y = X.cwiseProduct(G).transpose() * Eigen::VectorXd::Ones(J);
  const Eigen::VectorXd x = X.transpose() * r;
  const Eigen::VectorXd n = X.transpose() * Eigen::VectorXd::Ones(J);
  const double valuations = X.cwiseProduct(S).sum();
  const double congestion = (y.array().square() / (2.0 * f.array())).sum();
  const double compute = inst.economy.omega1 * (e.array() * x.array() / f.array()).sum();
  const double hardware = inst.economy.omega2 * inst.economy.c_hard * (n.array() > 0.5).cast<double>().sum();
  return valuations - congestion - compute - hardware;
}

double exact_potential(const OnlineInstance& inst, const Profile& pi) {
  const Loads L = loads(inst, pi);
  std::vector<double> self(inst.providers.size(), 0.0);
  double phi = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    if (pi[j] == kLocal) continue;
    const double g = inst.link(static_cast<int>(j), pi[j])->gamma;
    self[static_cast<std::size_t>(pi[j])] += g * g;
    phi += valuation(inst, static_cast<int>(j), pi[j]) - payment(inst, static_cast<int>(j));
  }
  for (std::size_t i = 0; i < inst.providers.size(); ++i)
    phi -= (L.y[i] * L.y[i] + self[i]) / (2.0 * inst.providers[i].compute_hz);
  return phi;
}

namespace {

struct MoveTerms {
  double valuation = 0.0;
  double leave_congestion = 0.0;  ///< congestion integral released at the origin
  double join_congestion = 0.0;   ///< congestion integral added at the destination
  double leave_cost = 0.0;
  double join_cost = 0.0;
  double leave_self = 0.0;        ///< gamma^2 / (2 f) released at the origin
  double join_self = 0.0;
  double tariff = 0.0;
};

MoveTerms move_terms(const OnlineInstance& inst, const Profile& pi, int sd, int to) {
  const int from = pi[static_cast<std::size_t>(sd)];
  const Demander& d = inst.demanders[static_cast<std::size_t>(sd)];
  MoveTerms t;
  t.valuation = valuation(inst, sd, to) - valuation(inst, sd, from);
  const double omega1 = inst.economy.omega1, hard = inst.economy.omega2 * inst.economy.c_hard;
  if (from != kLocal) {
    const Provider& p = inst.providers[static_cast<std::size_t>(from)];
    const double g = inst.link(sd, from)->gamma;
    const double y_rest = load_with(inst, pi, sd, from) - g;
    t.leave_congestion = congestion_step(y_rest, g, p.compute_hz);
    t.leave_cost = omega1 * p.power_w * d.cycles / p.compute_hz + (count_without(pi, sd, from) == 0 ? hard : 0.0);
    t.leave_self = g * g / (2.0 * p.compute_hz);
    t.tariff += payment(inst, sd);
  }
  if (to != kLocal) {
    const Provider& p = inst.providers[static_cast<std::size_t>(to)];
    const double g = inst.link(sd, to)->gamma;
    const double y_rest = load_with(inst, pi, sd, to) - g;
    t.join_congestion = congestion_step(y_rest, g, p.compute_hz);
    t.join_cost = omega1 * p.power_w * d.cycles / p.compute_hz + (count_without(pi, sd, to) == 0 ? hard : 0.0);
    t.join_self = g * g / (2.0 * p.compute_hz);
    t.tariff -= payment(inst, sd);
  }
  return t;
}

}  // namespace

double potential_delta(const OnlineInstance& inst, const Profile& pi, int sd, int to) {
  if (pi[static_cast<std::size_t>(sd)] == to) return 0.0;
  const MoveTerms t = move_terms(inst, pi, sd, to);
  return t.valuation - t.join_congestion + t.leave_congestion - t.join_cost + t.leave_cost;
}

double exact_potential_delta(const OnlineInstance& inst, const Profile& pi, int sd, int to) {
  if (pi[static_cast<std::size_t>(sd)] == to) return 0.0;
  const MoveTerms t = move_terms(inst, pi, sd, to);
  return t.valuation - (t.join_congestion + t.join_self) + (t.leave_congestion + t.leave_self) + t.tariff;
}

std::vector<int> feasible_actions(const OnlineInstance& inst, int sd, const Profile& pi) {
  std::vector<int> out{kLocal};
  for (const Link& l : inst.demanders[static_cast<std::size_t>(sd)].links)
    if (count_without(pi, sd, l.provider) + 1 <= inst.providers[static_cast<std::size_t>(l.provider)].capacity)
      out.push_back(l.provider);
  std::sort(out.begin(), out.end());
  return out;
}

Profile random_profile(const OnlineInstance& inst, Rng& rng) {
  Profile pi(inst.demanders.size(), kLocal);
  std::vector<int> order(inst.demanders.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (int j : order) {
    const auto acts = feasible_actions(inst, j, pi);
    pi[static_cast<std::size_t>(j)] =
        acts[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(acts.size()) - 1))];
  }
  return pi;
}

Profile random_assignment(const OnlineInstance& inst, Rng& rng) {
  Profile pi(inst.demanders.size(), kLocal);
  std::vector<int> order(inst.demanders.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (int j : order) {
    const Demander& d = inst.demanders[static_cast<std::size_t>(j)];
    std::vector<int> ok;
    for (int a : feasible_actions(inst, j, pi)) {
      if (a == kLocal) continue;
      if (d.kind == UserKind::Machine && edge_latency(inst, j, a, load_with(inst, pi, j, a)).total > d.deadline_s)
        continue;
      ok.push_back(a);
    }
    if (!ok.empty())
      pi[static_cast<std::size_t>(j)] = ok[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(ok.size()) - 1))];
  }
  return pi;
}

void BrdParams::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("brd: epsilon must be positive");
  if (t_max < 1) throw ConfigError("brd: t_max must be at least 1");
}

BrdResult pg_brd(const OnlineInstance& inst, const BrdParams& p, std::uint64_t seed) {
  Rng init = Rng(seed).split("brd-init");
  return pg_brd_from(inst, random_profile(inst, init), p, seed);
}

BrdResult pg_brd_from(const OnlineInstance& inst, const Profile& start, const BrdParams& p, std::uint64_t seed) {
  p.validate();
  inst.validate();
  require(profile_feasible(inst, start), "pg_brd: infeasible start profile");
  BrdResult res;
  res.profile = start;
  res.phi0 = potential(inst, start);
  double phi = res.phi0;
  const std::size_t n = inst.demanders.size();
  std::vector<bool> dirty(n, true);
  std::vector<std::vector<int>> watchers(inst.providers.size());
  for (std::size_t j = 0; j < n; ++j)
    for (const Link& l : inst.demanders[j].links) watchers[static_cast<std::size_t>(l.provider)].push_back(static_cast<int>(j));
  const Rng order_root = Rng(seed).split("brd-order");
  Profile& pi = res.profile;
  for (int round = 1; round <= p.t_max; ++round) {
    res.rounds = round;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = order_root.split(static_cast<std::uint64_t>(round));
    rng.shuffle(order);
    bool switched = false;
    for (int j : order) {
      if (p.skip_unchanged && !dirty[static_cast<std::size_t>(j)]) continue;
      dirty[static_cast<std::size_t>(j)] = false;
      ++res.evaluations;
      const int cur = pi[static_cast<std::size_t>(j)];
      const double u_cur = unified_utility(inst, j, cur, pi);
      int best = cur;
      double u_best = u_cur;
      const Demander& d = inst.demanders[static_cast<std::size_t>(j)];
      for (int a : feasible_actions(inst, j, pi)) {
        if (a == cur) continue;
        const double u = unified_utility(inst, j, a, pi);
        if (a != kLocal && d.kind == UserKind::Machine &&
            edge_latency(inst, j, a, load_with(inst, pi, j, a)).total > d.deadline_s)
          ++res.out_of_regime;
        if (u > u_best) {
          best = a;
          u_best = u;
        }
      }
      const double gain = u_best - u_cur;
      if (best == cur || !(gain > p.epsilon)) continue;
      TraceRow row;
      row.round = round;
      row.mover = d.id;
      row.from = cur == kLocal ? kLocal : inst.providers[static_cast<std::size_t>(cur)].id;
      row.to = best == kLocal ? kLocal : inst.providers[static_cast<std::size_t>(best)].id;
      row.delta_u = gain;
      row.delta_phi = potential_delta(inst, pi, j, best);
      row.delta_exact = exact_potential_delta(inst, pi, j, best);
      phi += row.delta_phi;
      row.phi = phi;
      res.phi_strictly_increasing = res.phi_strictly_increasing && row.delta_phi > 0.0;
      res.exact_strictly_increasing = res.exact_strictly_increasing && row.delta_exact > 0.0;
      pi[static_cast<std::size_t>(j)] = best;
      res.trace.push_back(row);
      switched = true;
      res.feasible_throughout = res.feasible_throughout && profile_feasible(inst, pi);
      // A departure only improves the origin for demanders elsewhere; an arrival only
      // worsens the destination for demanders already there.
      if (cur != kLocal)
        for (int w : watchers[static_cast<std::size_t>(cur)])
          if (w != j && pi[static_cast<std::size_t>(w)] != cur) dirty[static_cast<std::size_t>(w)] = true;
      if (best != kLocal)
        for (int w : watchers[static_cast<std::size_t>(best)])
          if (w != j && pi[static_cast<std::size_t>(w)] == best) dirty[static_cast<std::size_t>(w)] = true;
    }
    if (!switched) {
      res.converged = true;
      break;
    }
  }
  return res;
}

NeCheck verify_ne(const OnlineInstance& inst, const Profile& pi, double epsilon) {
  require(profile_feasible(inst, pi), "verify_ne: infeasible profile");
  NeCheck c;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    const int sd = static_cast<int>(j);
    const double u = unified_utility(inst, sd, pi[j], pi);
    for (int a : feasible_actions(inst, sd, pi)) {
      if (a == pi[j]) continue;
      const double gain = unified_utility(inst, sd, a, pi) - u;
      if (gain > epsilon && gain > c.gain) {
        c.ok = false;
        c.sd = sd;
        c.to = a;
        c.gain = gain;
      }
    }
  }
  return c;
}

OracleResult oracle_enumerate(const OnlineInstance& inst, long limit) {
  const std::size_t n = inst.demanders.size();
  std::vector<std::vector<int>> choices(n);
  double space = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    choices[j].push_back(kLocal);
    for (const Link& l : inst.demanders[j].links) choices[j].push_back(l.provider);
    space *= static_cast<double>(choices[j].size());
  }
  require(space <= static_cast<double>(limit), "oracle_enumerate: state space too large");
  OracleResult out;
  bool have = false;
  std::vector<std::size_t> idx(n, 0);
  Profile pi(n, kLocal);
  for (;;) {
    for (std::size_t j = 0; j < n; ++j) pi[j] = choices[j][idx[j]];
    if (profile_feasible(inst, pi)) {
      ++out.profiles;
      const double phi = potential(inst, pi);
      if (!have || phi > out.max_phi) {
        out.max_phi = phi;
        out.argmax = pi;
        have = true;
      }
      if (verify_ne(inst, pi, 0.0).ok) out.equilibria.push_back(pi);
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] == choices[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

OrdinalReport check_ordinal(long samples, std::uint64_t seed, const RandomInstanceSpec& spec,
                            const EconomyConfig& economy) {
  EconomyConfig eco = economy;
  eco.tariff = 0.0;
  OrdinalReport rep;
  Rng root = Rng(seed).split("ordinal");
  long attempts = 0;
  const long max_attempts = samples * 200 + 1000;
  while (rep.samples < samples && attempts < max_attempts) {
    Rng rng = root.split(static_cast<std::uint64_t>(attempts++));
    const OnlineInstance inst = random_instance(rng, spec, eco);
    if (inst.demanders.empty()) continue;
    const Profile pi = random_profile(inst, rng);
    const int sd = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(inst.demanders.size()) - 1));
    const auto acts = feasible_actions(inst, sd, pi);
    const int to = acts[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(acts.size()) - 1))];
    const int from = pi[static_cast<std::size_t>(sd)];
    if (to == from) continue;
    if (to != kLocal) {
      const double g = inst.link(sd, to)->gamma;
      const double y = load_with(inst, pi, sd, to) - g;
      const double f = inst.providers[static_cast<std::size_t>(to)].compute_hz;
      const double integral = congestion_step(y, g, f);
      ++rep.sandwich_checks;
      if (!(g * y / f <= integral && integral <= g * (y + g) / f)) ++rep.sandwich_violations;
    }
    const double du = unified_utility(inst, sd, to, pi) - unified_utility(inst, sd, from, pi);
    if (du == 0.0) {
      ++rep.ties_skipped;
      continue;
    }
    if (du < 0.0) continue;
    ++rep.samples;
    const double dphi = potential_delta(inst, pi, sd, to);
    if (exact_potential_delta(inst, pi, sd, to) <= 0.0) ++rep.exact_violations;
    if (dphi <= 0.0) {
      ++rep.violations;
      rep.worst_delta_phi = std::min(rep.worst_delta_phi, dphi);
      if (rep.counterexample.empty()) {
        std::ostringstream os;
        os.precision(10);
        os << "demander " << sd << (inst.demanders[static_cast<std::size_t>(sd)].kind == UserKind::Machine ? " (MU)" : " (HU)")
           << " moves " << (from == kLocal ? std::string("local") : "SP " + std::to_string(from)) << " -> "
           << (to == kLocal ? std::string("local") : "SP " + std::to_string(to)) << ": dU = " << du
           << ", dPhi = " << dphi << " (destination headcount before move "
           << (to == kLocal ? 0 : count_without(pi, sd, to)) << ")";
        rep.counterexample = os.str();
      }
    }
  }
  return rep;
}

std::string trace_csv(const OnlineInstance& inst, const BrdResult& r) {
  (void)inst;
  std::ostringstream os;
  os.precision(17);
  os << "round,mover,action,delta_u,phi\n";
  for (const auto& row : r.trace)
    os << row.round << ',' << row.mover << ',' << row.to << ',' << row.delta_u << ',' << row.phi << '\n';
  return os.str();
}

void to_json(nlohmann::json& j, const OnlineInstance& inst) {
  j = nlohmann::json::object();
  auto& ps = j["providers"] = nlohmann::json::array();
  for (const auto& p : inst.providers)
    ps.push_back({{"id", p.id},
                  {"kind", p.kind == ProviderKind::Uav ? "uav" : "es"},
                  {"compute_hz", p.compute_hz},
                  {"capacity", p.capacity},
                  {"power_w", p.power_w},
                  {"host_es", p.host_es}});
  auto& ds = j["demanders"] = nlohmann::json::array();
  for (const auto& d : inst.demanders) {
    nlohmann::json links = nlohmann::json::array();
    for (const auto& l : d.links)
      links.push_back({{"provider", l.provider}, {"gamma", l.gamma}, {"t_tx", l.t_tx}, {"e_tx", l.e_tx}});
    ds.push_back({{"id", d.id},
                  {"kind", d.kind == UserKind::Machine ? "mu" : "hu"},
                  {"cycles", d.cycles},
                  {"bits", d.bits},
                  {"deadline_s", d.deadline_s},
                  {"reward", d.reward},
                  {"links", links}});
  }
}

}  // namespace edgemkt

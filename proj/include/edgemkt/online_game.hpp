#pragma once
/**
 * Online task-assignment game. Service demanders choose local execution or
 * one covered service provider; providers split compute by weighted
 * processor sharing, so the delay function at provider i is tau_i(y) = y/f_i
 * for effective load y. Demanders weigh congestion by kappa * theta with
 * theta = r / gamma; weights are set to gamma = sqrt(kappa * r), which makes
 * the penalty of demander j at load y equal to gamma * y / f.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "edgemkt/rng.hpp"
#include "edgemkt/scenario.hpp"

namespace edgemkt {

enum class ProviderKind { EdgeServer, Uav };

struct Provider {
  int id = 0;
  ProviderKind kind = ProviderKind::EdgeServer;
  double compute_hz = 1.0;  ///< f^On
  int capacity = 1;         ///< subcarriers G
  double power_w = 0.0;     ///< computation power entering the cost
  GeoPoint loc;
  int host_es = -1;         ///< ES id a UAV is stationed at
};

/** A demander's reachable provider with its precomputed uplink figures. */
struct Link {
  int provider = 0;   ///< index into OnlineInstance::providers
  double gamma = 1.0;
  double t_tx = 0.0;  ///< seconds
  double e_tx = 0.0;  ///< joules
};

struct Demander {
  int id = 0;
  UserKind kind = UserKind::Human;
  double cycles = 0.0;
  double bits = 0.0;
  double local_hz = 1.0;
  double local_power_w = 0.0;
  double tx_power_w = 0.0;
  double deadline_s = 1.0;  ///< machine users
  double reward = 0.0;      ///< machine users
  std::vector<Link> links;

  double local_time() const { return cycles / local_hz; }
  double local_energy() const { return cycles * local_power_w / local_hz; }
};

struct OnlineInstance {
  std::vector<Provider> providers;
  std::vector<Demander> demanders;
  EconomyConfig economy;

  double kappa(int sd) const;
  /** Link of demander sd to provider sp, or nullptr when not covered. */
  const Link* link(int sd, int sp) const;
  void validate() const;
};

/** Weight rule shared by every instance builder. */
double congestion_weight(double kappa, double cycles);

/** Contracted UAV service points stationed at an ES. */
struct UavDeployment {
  int es_id = -1;
  int count = 0;
  AgentPair ap;
};

/** ES providers for every ES plus the deployed UAVs; links follow each demander's ES coverage. */
OnlineInstance build_online_instance(const Scenario& s, const std::vector<UavDeployment>& uavs);

struct RandomInstanceSpec {
  int min_sd = 2, max_sd = 6;
  int min_sp = 1, max_sp = 3;
  double coverage_prob = 0.7;
  Range es_compute{1e11, 3e12};
  Range uav_compute{1e10, 3e10};
  IntRange capacity{1, 4};
  Range power{5.0, 15.0};
  Range hu_cycles{6e9, 3.3e10};
  Range mu_cycles{6e10, 3.3e11};
  Range local_hz{1e9, 2e9};
  Range local_power{0.5, 1.0};
  Range t_tx{0.02, 1.5};
  Range tx_power{0.2, 0.4};
  Range deadline{3.0, 8.0};
  Range reward{20.0, 60.0};
  double machine_fraction = 0.5;
  double uav_fraction = 0.4;
};

OnlineInstance random_instance(Rng& rng, const RandomInstanceSpec& spec, const EconomyConfig& economy = {});

constexpr int kLocal = -1;
/** Per demander: kLocal or a provider index. */
using Profile = std::vector<int>;

struct Loads {
  std::vector<double> y;       ///< effective congestion load
  std::vector<double> cycles;  ///< assigned workload
  std::vector<int> count;      ///< headcount
};

bool profile_feasible(const OnlineInstance& inst, const Profile& pi);
Loads loads(const OnlineInstance& inst, const Profile& pi);

struct EdgeLatency {
  double t_comp = 0.0;
  double t_tx = 0.0;
  double total = 0.0;
};

/** y must include the demander's own weight. */
EdgeLatency edge_latency(const OnlineInstance& inst, int sd, int sp, double y);

/** Congestion-independent valuation S_j(i); 0 for local execution. */
double valuation(const OnlineInstance& inst, int sd, int sp);

/** Utility of demander sd taking action while everyone else follows pi. */
double unified_utility(const OnlineInstance& inst, int sd, int action, const Profile& pi);

/** Utility with the clipped soft-deadline value for machine users. */
double realized_utility(const OnlineInstance& inst, int sd, int action, const Profile& pi);

double sp_cost(const OnlineInstance& inst, int sp, double cycles);
double realized_welfare(const OnlineInstance& inst, const Profile& pi);

/** Sum of valuations minus integrated congestion minus provider costs. */
double potential(const OnlineInstance& inst, const Profile& pi);
/** The same quantity from the assignment matrix X and weight matrix Gamma. */
double potential_matrix(const OnlineInstance& inst, const Profile& pi);
/**
 * Weighted congestion potential whose change equals the mover's utility
 * change exactly: valuations minus sum_i (y_i^2 + sum_{j at i} gamma_ji^2) / (2 f_i)
 * minus tariffs; provider costs are not felt by demanders and are left out.
 */
double exact_potential(const OnlineInstance& inst, const Profile& pi);

/** Change of potential() when sd moves from its action in pi to `to`. */
double potential_delta(const OnlineInstance& inst, const Profile& pi, int sd, int to);
double exact_potential_delta(const OnlineInstance& inst, const Profile& pi, int sd, int to);

/** kLocal plus every covered provider with a free subcarrier when sd is removed. */
std::vector<int> feasible_actions(const OnlineInstance& inst, int sd, const Profile& pi);

/** Random feasible profile: demanders in random order pick uniformly among their feasible actions. */
Profile random_profile(const OnlineInstance& inst, Rng& rng);

/**
 * Random provider assignment: demanders in random order pick uniformly among
 * feasible providers that also meet a machine user's deadline at the
 * resulting load; local when none qualifies.
 */
Profile random_assignment(const OnlineInstance& inst, Rng& rng);

struct BrdParams {
  double epsilon = 1e-6;
  int t_max = 200;
  /**
   * Re-evaluate a demander only after an event that can raise its best
   * deviation gain: a departure from another covered provider or an arrival
   * at its own provider.
   */
  bool skip_unchanged = true;

  void validate() const;
};

struct TraceRow {
  int round = 0;
  int mover = 0;     ///< demander id
  int from = kLocal;
  int to = kLocal;   ///< provider id or kLocal
  double delta_u = 0.0;
  double delta_phi = 0.0;
  double delta_exact = 0.0;
  double phi = 0.0;
};

struct BrdResult {
  Profile profile;
  int rounds = 0;
  bool converged = false;
  long evaluations = 0;  ///< best-response evaluations performed
  double phi0 = 0.0;     ///< potential of the initial profile
  std::vector<TraceRow> trace;  ///< one row per accepted switch
  bool phi_strictly_increasing = true;
  bool exact_strictly_increasing = true;
  bool feasible_throughout = true;
  long out_of_regime = 0;  ///< machine-user evaluations whose edge latency exceeded the deadline
};

BrdResult pg_brd(const OnlineInstance& inst, const BrdParams& p, std::uint64_t seed);

/** Runs best-response dynamics from a given feasible profile. */
BrdResult pg_brd_from(const OnlineInstance& inst, const Profile& start, const BrdParams& p, std::uint64_t seed);

struct NeCheck {
  bool ok = true;
  int sd = -1;       ///< index of a demander with a profitable deviation
  int to = kLocal;
  double gain = 0.0;
};

NeCheck verify_ne(const OnlineInstance& inst, const Profile& pi, double epsilon);

struct OracleResult {
  Profile argmax;
  double max_phi = 0.0;
  std::vector<Profile> equilibria;  ///< exact pure equilibria (epsilon = 0)
  long profiles = 0;
};

OracleResult oracle_enumerate(const OnlineInstance& inst, long limit = 1000000);

struct OrdinalReport {
  long samples = 0;              ///< strictly improving deviations examined
  long violations = 0;           ///< of those, the ones with delta_phi <= 0
  long ties_skipped = 0;
  long sandwich_checks = 0;
  long sandwich_violations = 0;
  long exact_violations = 0;     ///< improving deviations with exact-potential change <= 0
  double worst_delta_phi = 0.0;
  std::string counterexample;    ///< first violating triple, human readable
};

/** Samples random (instance, profile, demander, deviation) triples until `samples` strict improvements are seen. */
OrdinalReport check_ordinal(long samples, std::uint64_t seed, const RandomInstanceSpec& spec = {},
                            const EconomyConfig& economy = {});

std::string trace_csv(const OnlineInstance& inst, const BrdResult& r);
void to_json(nlohmann::json& j, const OnlineInstance& inst);

}  // namespace edgemkt

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/samba.hpp"

namespace banditlab {

struct AnalysisConstants {
  double delta = 0.0;   // smallest positive gap
  double r_star = 0.0;
  double alpha = 0.0;
  double alpha_bound = 0.0;  // Delta / (r* - Delta); +inf when r* == Delta
  double epsilon = 0.0;
  double xi = 0.0;
  double zeta = 0.0;
  double large_corruption_threshold = 0.0;  // Delta / 4
  bool theory_valid = false;                // alpha < alpha_bound
};

/// Epsilon takes half the available slack,
///   eps  = ((r* / ((r* - Delta)(1 + alpha))) - 1) / 2,
///   xi   = alpha r* / (1 + alpha) - alpha (r* - Delta)(1 + eps),
///   zeta = xi / (alpha (1 + eps + 1/(1 + alpha))).
/// When r* == Delta the ratio is unbounded and eps is set to 1.
AnalysisConstants analysis_constants(const BanditInstance& instance, double alpha);

/// Update rule under test. `Tampered` feeds the inverted reward to the
/// regular update; it exists so the verification suite has a known-bad fixture.
enum class UpdateRule { Samba, Tampered };

void apply_update(UpdateRule rule, SambaState& state, Arm pulled, int reward);

/// Where the conditioning states come from.
struct StatePrep {
  enum class Kind { Trajectory, Fixed };
  Kind kind = Kind::Trajectory;
  std::vector<double> fixed;            // Fixed: the state itself
  Round max_length = 5000;              // Trajectory: length ~ Uniform{0..max_length}
  std::size_t transitions_per_state = 100;
  std::size_t max_rejections = 100000;  // consecutive non-qualifying draws before PrepFailure
};

struct CheckOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  UpdateRule update_rule = UpdateRule::Samba;
  double ci_sigmas = 3.0;
};

struct DriftReport {
  std::string name;
  double mean = 0.0;
  double ci = 0.0;  // half-width, ci_sigmas * sd(state means) / sqrt(states)
  std::size_t samples = 0;
  std::size_t states = 0;
  double bound = 0.0;
  bool pass = false;
  double exact_mean = 0.0;          // average of the per-state exact drift
  double worst_state_excess = 0.0;  // max over states of exact drift - bound
};

/// One-step drift of 1/p_{a*} from states where a* is not the leader. The
/// corruption lowers a* by c and raises the leader by c (clamped to [0,1]),
/// the worst case for this quantity. Bound: -xi + alpha c (1 + eps + 1/(1+alpha)).
DriftReport check_drift_nonleader(const BanditInstance& instance, double alpha, const StatePrep& prep,
                                  double c, std::size_t samples, const CheckOptions& options = {});

/// One-step drift of q = 1 - p_{a*}, divided by q^2, from states with
/// p_{a*} >= 1/2. The corruption lowers a* by c and raises every other arm by
/// c. Bound: alpha (2c - Delta) / K.
DriftReport check_drift_leader(const BanditInstance& instance, double alpha, const StatePrep& prep,
                               double c, std::size_t samples, const CheckOptions& options = {});

/// Exact one-step expected change of 1/p_{a*} (non-leader) or (q' - q)/q^2
/// (leader) for a given state and corrupted means, by enumerating all 2K
/// (arm, reward) outcomes of `rule`.
double exact_inverse_drift(const SambaState& state, Arm optimal, std::span<const double> means,
                           UpdateRule rule = UpdateRule::Samba);
double exact_leader_drift(const SambaState& state, Arm optimal, std::span<const double> means,
                          UpdateRule rule = UpdateRule::Samba);

struct Injection {
  Round offset = 0;  // rounds after t0
  double cost = 0.0;
};

struct RecoveryOptions {
  Round burn_in = 2000;
  Round max_burn_in = 1000000;
  Round max_recovery = 1000000;
};

struct RecoveryReport {
  double mean = 0.0;
  double ci = 0.0;
  double sd = 0.0;
  double bound = 0.0;  // 4 * sum(c) / Delta
  std::size_t reps = 0;
  std::size_t truncated = 0;
  double max_length = 0.0;
  bool pass = false;
};

/// Runs clean SAMBA until the first round t0 >= burn_in with p_{a*} >= 1/2,
/// injects the listed corruptions, and measures the total recovery length:
/// the size of the union of windows (t_i, t_i'] where t_i' is the first round
/// after t_i with q(t) <= q(t_i). Throws BurnInFailure if some replication
/// never reaches p_{a*} >= 1/2.
RecoveryReport check_recovery_time(const BanditInstance& instance, double alpha,
                                   std::span<const Injection> injections, std::size_t reps,
                                   const CheckOptions& options = {}, const RecoveryOptions& recovery = {});

struct DecayPoint {
  Round s = 0;
  double mean = 0.0;
  double ci = 0.0;
  double bound = 0.0;  // 2K / (4K + alpha Delta s)
  std::size_t reps = 0;  // replications whose chain reached s
  bool pass = false;
};

struct DecayReport {
  std::vector<DecayPoint> points;
  bool pass = false;
};

/// Clean runs of length T; the embedded chain keeps the rounds whose state has
/// q_{a*} <= 1/2 and relabels them s = 0, 1, 2, ...
DecayReport check_qhat_decay(const BanditInstance& instance, double alpha, Round horizon,
                             std::size_t reps, std::span<const Round> grid,
                             const CheckOptions& options = {});

/// Iterates a_{t+1} = a_t - gamma a_t^2 for `steps` steps.
double decay_recurrence(double a0, double gamma, Round steps);

/// Expected pseudo-regret of SAMBA over T rounds from the uniform start, by
/// enumerating the outcome tree. K <= 3 and T <= 10, otherwise InstanceTooLarge.
double exact_regret_oracle(const BanditInstance& instance, double alpha, Round horizon);

struct RegretFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = 0.0;  // root mean squared residual
};

/// Least squares of regret against ln t. At least five points spanning a
/// decade of t, otherwise DegenerateFit.
RegretFit fit_log_regret(std::span<const Round> t, std::span<const double> regret);
/// Same with (ln t)^2 as the regressor.
RegretFit fit_log2_regret(std::span<const Round> t, std::span<const double> regret);

// --- suite -------------------------------------------------------------------

struct SuiteOptions {
  bool fast = false;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  UpdateRule update_rule = UpdateRule::Samba;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

/// Drift, recovery, decay, oracle and log-fit checks on one instance.
std::vector<CheckResult> run_verify_suite(const BanditInstance& instance, double alpha,
                                          const SuiteOptions& options);

}  // namespace banditlab

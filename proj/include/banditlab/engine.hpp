#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "banditlab/adversary.hpp"
#include "banditlab/core.hpp"
#include "banditlab/policy.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

enum class AlgorithmKind { Samba, FastSlowAae, Barbar, CBarbar, TsallisInf };

std::string_view to_string(AlgorithmKind kind);
std::optional<AlgorithmKind> parse_algorithm_kind(std::string_view name);

inline constexpr double kDefaultSambaAlpha = 0.05;
inline constexpr double kDefaultBarbarLambda = 4.0;
inline constexpr double kDefaultCBarbarLambda = 2.0;

struct AlgorithmSpec {
  std::string name;  // display name, unique within a config
  AlgorithmKind kind = AlgorithmKind::Samba;
  double alpha = kDefaultSambaAlpha;
  std::optional<double> delta;             // Fast-Slow AAE; defaults to 1/T
  std::optional<double> known_corruption;  // Fast-Slow AAE; defaults to the plan budget
  std::optional<double> lambda_scale;      // BARBAR / CBARBAR
  double eta_scale = 1.0;                  // Tsallis-INF
};

/// Builds a fresh policy for one episode. `budget` is the corruption level of
/// the episode's plan and is only read by Fast-Slow AAE.
PolicyHandle make_policy(const AlgorithmSpec& spec, std::size_t arms, Round horizon, double budget);

struct InstanceSpec {
  std::vector<double> means;      // explicit instance, or
  std::size_t random_arms = 0;    // K arms with Uniform[0,1) means drawn per replication
};

BanditInstance realize_instance(const InstanceSpec& spec, std::uint64_t episode_seed);

struct CheckpointGrid {
  enum class Spacing { Linear, Log };
  Spacing spacing = Spacing::Linear;
  std::size_t count = 100;
  Round first = 1000;  // Log spacing only
};

/// Checkpoint rounds in (0, T], strictly increasing, always ending at T.
std::vector<Round> checkpoint_rounds(const CheckpointGrid& grid, Round horizon);

struct EpisodeOptions {
  std::vector<Round> checkpoints;
  std::optional<double> per_step_cost;
  bool record_rounds = true;
};

/// Round-by-round driver. Each round: corrupt means, let the policy select,
/// draw the reward from the corrupted mean, feed it back, record.
///
/// Random streams are split from the episode seed: 0 for the corruption
/// schedule, 1 for the policy, 2 for rewards.
class Episode {
 public:
  Episode(Policy& policy, const BanditInstance& instance, const CorruptionPlan& plan, Round horizon,
          std::uint64_t seed, EpisodeOptions options = {});

  bool done() const noexcept { return t_ >= horizon_; }
  Round round() const noexcept { return t_; }
  double regret() const noexcept { return regret_; }
  const CorruptionLedger& ledger() const noexcept { return ledger_; }

  void step();
  void run() {
    while (!done()) step();
  }
  Trace finish() &&;

 private:
  Policy& policy_;
  const BanditInstance& instance_;
  Round horizon_;
  Rng schedule_rng_;
  Rng policy_rng_;
  Rng reward_rng_;
  CorruptionLedger ledger_;
  EpisodeOptions options_;
  std::size_t next_checkpoint_ = 0;
  Round t_ = 0;
  double regret_ = 0.0;
  Trace trace_;
};

Trace run_episode(Policy& policy, const BanditInstance& instance, const CorruptionPlan& plan,
                  Round horizon, std::uint64_t seed, EpisodeOptions options = {});

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<CorruptionPlan> plans;  // one environment cell per plan
  std::optional<double> per_step_cost;
  Round horizon = 100000;
  std::size_t replications = 100;
  std::uint64_t master_seed = 0;
  CheckpointGrid checkpoints;
  std::size_t threads = 1;
};

/// Throws InvalidConfig on empty lists, duplicate names, T < 1 or R < 1.
void validate(const ExperimentConfig& config);

struct CellStats {
  std::string algorithm;
  CorruptionScheme scheme = CorruptionScheme::None;
  double corruption_level = 0.0;
  std::size_t arms = 0;
  double mean_regret = 0.0;
  double sd_regret = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<Round> checkpoint_t;
  std::vector<double> curve_mean;
  std::vector<double> curve_sd;
  double min_spent = 0.0;
  double max_spent = 0.0;
  double per_step_cost = 0.0;  // largest per-step cost seen across replications
  std::uint64_t clamp_events = 0;
};

struct AggregateStats {
  std::vector<CellStats> cells;  // plan-major, algorithm-minor
};

/// Runs R replications of every (algorithm, plan) cell. Replication i of plan
/// j uses seed split_seed(master, j * R + i) for every algorithm, so all
/// algorithms face the same instances, schedules and reward streams.
/// Replications run on `threads` workers and are reduced in index order, so
/// the result does not depend on the thread count.
AggregateStats run_batch(const ExperimentConfig& config);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

struct BenchRow {
  std::string algorithm;
  double mean_seconds = 0.0;
  double sd_seconds = 0.0;
  double early_step_ns = 0.0;  // median over runs, rounds [0, 1000)
  double late_step_ns = 0.0;   // median over runs, rounds [0.9 T, T)
  double step_ratio = 0.0;     // late / early
};

struct BenchOptions {
  std::size_t runs = 5;
  Round early_window = 1000;
};

/// Full-episode wall time per algorithm on a clean run (one warm-up run
/// excluded), plus the per-step time of early against late rounds.
std::vector<BenchRow> bench_runtime(const ExperimentConfig& config, const BenchOptions& options = {});

double sample_mean(std::span<const double> xs);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> xs);

}  // namespace banditlab

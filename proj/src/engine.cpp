#include "banditlab/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "banditlab/baselines.hpp"
#include "banditlab/error.hpp"

namespace banditlab {

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Samba: return "samba";
    case AlgorithmKind::FastSlowAae: return "fast_slow_aae";
    case AlgorithmKind::Barbar: return "barbar";
    case AlgorithmKind::CBarbar: return "cbarbar";
    case AlgorithmKind::TsallisInf: return "tsallis_inf";
  }
  return "unknown";
}

std::optional<AlgorithmKind> parse_algorithm_kind(std::string_view name) {
  for (auto k : {AlgorithmKind::Samba, AlgorithmKind::FastSlowAae, AlgorithmKind::Barbar,
                 AlgorithmKind::CBarbar, AlgorithmKind::TsallisInf}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

PolicyHandle make_policy(const AlgorithmSpec& spec, std::size_t arms, Round horizon, double budget) {
  switch (spec.kind) {
    case AlgorithmKind::Samba:
      return samba_policy(arms, spec.alpha);
    case AlgorithmKind::FastSlowAae:
      return fs_aae_policy(arms, spec.delta.value_or(1.0 / static_cast<double>(std::max<Round>(horizon, 2))),
                           spec.known_corruption.value_or(budget), horizon);
    case AlgorithmKind::Barbar:
      return barbar_policy(arms, spec.lambda_scale.value_or(kDefaultBarbarLambda));
    case AlgorithmKind::CBarbar:
      return cbarbar_policy(arms, spec.lambda_scale.value_or(kDefaultCBarbarLambda));
    case AlgorithmKind::TsallisInf:
      return tsallis_policy(arms, spec.eta_scale);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown algorithm kind");
}

BanditInstance realize_instance(const InstanceSpec& spec, std::uint64_t episode_seed) {
  if (!spec.means.empty()) return make_instance(spec.means);
  if (spec.random_arms < 2) {
    throw Error(ErrorCode::InvalidConfig, "instance needs explicit means or at least two random arms");
  }
  Rng rng(split_seed(episode_seed, 3));
  for (;;) {
    std::vector<double> means(spec.random_arms);
    for (auto& m : means) m = rng.uniform();
    try {
      return make_instance(std::move(means));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TiedOptimum) throw;
    }
  }
}

std::vector<Round> checkpoint_rounds(const CheckpointGrid& grid, Round horizon) {
  if (horizon == 0) return {};
  std::vector<Round> out;
  const std::size_t count = std::max<std::size_t>(grid.count, 1);
  if (grid.spacing == CheckpointGrid::Spacing::Linear) {
    for (std::size_t i = 1; i <= count; ++i) {
      out.push_back(std::max<Round>(1, horizon * i / count));
    }
  } else {
    const double lo = std::log(static_cast<double>(std::clamp<Round>(grid.first, 1, horizon)));
    const double hi = std::log(static_cast<double>(horizon));
    for (std::size_t i = 0; i < count; ++i) {
      const double f = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      out.push_back(static_cast<Round>(std::llround(std::exp(lo + f * (hi - lo)))));
    }
  }
  out.push_back(horizon);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](Round t) { return t == 0 || t > horizon; });
  return out;
}

// --- Episode ---------------------------------------------------------------

Episode::Episode(Policy& policy, const BanditInstance& instance, const CorruptionPlan& plan,
                 Round horizon, std::uint64_t seed, EpisodeOptions options)
    : policy_(policy),
      instance_(instance),
      horizon_(horizon),
      schedule_rng_(split_seed(seed, 0)),
      policy_rng_(split_seed(seed, 1)),
      reward_rng_(split_seed(seed, 2)),
      ledger_(plan, instance, schedule_rng_, options.per_step_cost),
      options_(std::move(options)) {
  if (policy.arms() != instance.arms()) {
    throw Error(ErrorCode::InvalidConfig, "policy and instance disagree on the arm count");
  }
  trace_.instance_id = instance.id();
  if (options_.record_rounds) trace_.records.reserve(horizon);
  trace_.regret_checkpoints.reserve(options_.checkpoints.size());
}

void Episode::step() {
  const auto corruption = apply_corruption(instance_, ledger_, t_);
  const Arm arm = policy_.select(policy_rng_);
  const int reward = draw_reward(corruption.means[arm], reward_rng_);
  policy_.update(arm, reward);

  regret_ += instance_.gaps[arm];
  if (options_.record_rounds) {
    trace_.records.push_back(RoundRecord{t_, static_cast<std::uint32_t>(arm),
                                         static_cast<std::uint8_t>(reward), corruption.cost > 0.0,
                                         corruption.cost});
  }
  ++t_;
  while (next_checkpoint_ < options_.checkpoints.size() &&
         options_.checkpoints[next_checkpoint_] <= t_) {
    if (options_.checkpoints[next_checkpoint_] == t_) {
      trace_.regret_checkpoints.push_back({t_, regret_});
    }
    ++next_checkpoint_;
  }
}

Trace Episode::finish() && {
  trace_.corruption_spent = ledger_.spent();
  return std::move(trace_);
}

Trace run_episode(Policy& policy, const BanditInstance& instance, const CorruptionPlan& plan,
                  Round horizon, std::uint64_t seed, EpisodeOptions options) {
  Episode episode(policy, instance, plan, horizon, seed, std::move(options));
  episode.run();
  return std::move(episode).finish();
}

// --- batch -------------------------------------------------------------------

void validate(const ExperimentConfig& config) {
  if (config.horizon < 1) throw Error(ErrorCode::InvalidConfig, "horizon must be at least 1");
  if (config.replications < 1) throw Error(ErrorCode::InvalidConfig, "replications must be at least 1");
  if (config.algorithms.empty()) throw Error(ErrorCode::InvalidConfig, "no algorithms configured");
  if (config.plans.empty()) throw Error(ErrorCode::InvalidConfig, "no corruption plans configured");
  std::set<std::string> names;
  for (const auto& a : config.algorithms) {
    if (!names.insert(a.name).second) {
      throw Error(ErrorCode::InvalidConfig, "duplicate algorithm name '" + a.name + "'");
    }
  }
  if (config.instance.means.empty() && config.instance.random_arms < 2) {
    throw Error(ErrorCode::InvalidConfig, "instance needs explicit means or at least two random arms");
  }
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

struct EpisodeResult {
  double regret = 0.0;
  double spent = 0.0;
  double per_step_cost = 0.0;
  std::uint64_t clamp_events = 0;
  std::vector<double> curve;
};

}  // namespace

AggregateStats run_batch(const ExperimentConfig& config) {
  validate(config);
  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_plan = config.plans.size();
  const std::size_t R = config.replications;
  const auto checkpoints = checkpoint_rounds(config.checkpoints, config.horizon);

  std::vector<EpisodeResult> results(n_plan * R * n_alg);
  std::vector<std::size_t> arms(n_plan * R, 0);

  parallel_for(n_plan * R, config.threads, [&](std::size_t task) {
    const std::size_t plan_index = task / R;
    const std::uint64_t seed = split_seed(config.master_seed, task);
    const BanditInstance instance = realize_instance(config.instance, seed);
    arms[task] = instance.arms();
    CorruptionPlan plan = config.plans[plan_index];
    plan.horizon = config.horizon;
    for (std::size_t a = 0; a < n_alg; ++a) {
      auto policy = make_policy(config.algorithms[a], instance.arms(), config.horizon, plan.budget);
      EpisodeOptions options;
      options.checkpoints = checkpoints;
      options.per_step_cost = config.per_step_cost;
      options.record_rounds = false;
      Episode episode(*policy, instance, plan, config.horizon, seed, std::move(options));
      episode.run();
      EpisodeResult& r = results[task * n_alg + a];
      r.regret = episode.regret();
      r.spent = episode.ledger().spent();
      r.per_step_cost = episode.ledger().per_step_cost();
      if (const auto* samba = dynamic_cast<const SambaPolicy*>(policy.get())) {
        r.clamp_events = samba->state().clamp_events;
      }
      const Trace trace = std::move(episode).finish();
      r.curve.reserve(trace.regret_checkpoints.size());
      for (const auto& c : trace.regret_checkpoints) r.curve.push_back(c.regret);
    }
  });

  AggregateStats stats;
  for (std::size_t j = 0; j < n_plan; ++j) {
    for (std::size_t a = 0; a < n_alg; ++a) {
      CellStats cell;
      cell.algorithm = config.algorithms[a].name;
      cell.scheme = config.plans[j].scheme;
      cell.corruption_level = config.plans[j].budget;
      cell.arms = arms[j * R];
      cell.replications = R;
      cell.seed = config.master_seed;
      cell.checkpoint_t = checkpoints;

      std::vector<double> regrets(R);
      std::vector<double> column(R);
      cell.min_spent = std::numeric_limits<double>::infinity();
      cell.max_spent = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < R; ++i) {
        const auto& r = results[(j * R + i) * n_alg + a];
        regrets[i] = r.regret;
        cell.min_spent = std::min(cell.min_spent, r.spent);
        cell.max_spent = std::max(cell.max_spent, r.spent);
        cell.per_step_cost = std::max(cell.per_step_cost, r.per_step_cost);
        cell.clamp_events += r.clamp_events;
      }
      cell.mean_regret = sample_mean(regrets);
      cell.sd_regret = sample_sd(regrets);
      for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        for (std::size_t i = 0; i < R; ++i) column[i] = results[(j * R + i) * n_alg + a].curve[c];
        cell.curve_mean.push_back(sample_mean(column));
        cell.curve_sd.push_back(sample_sd(column));
      }
      stats.cells.push_back(std::move(cell));
    }
  }
  return stats;
}

// --- bench -------------------------------------------------------------------

namespace {

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

std::vector<BenchRow> bench_runtime(const ExperimentConfig& config, const BenchOptions& options) {
  validate(config);
  using clock = std::chrono::steady_clock;
  const Round T = config.horizon;
  const Round early_end = std::min(options.early_window, T);
  const Round late_start = T - T / 10;
  const BanditInstance instance = realize_instance(config.instance, split_seed(config.master_seed, 0));
  CorruptionPlan clean;
  clean.horizon = T;

  std::vector<BenchRow> rows;
  for (const auto& spec : config.algorithms) {
    std::vector<double> seconds;
    std::vector<double> early_ns;
    std::vector<double> late_ns;
    for (std::size_t run = 0; run <= options.runs; ++run) {
      const std::uint64_t seed = split_seed(config.master_seed, run);
      const auto start = clock::now();
      auto policy = make_policy(spec, instance.arms(), T, 0.0);
      Episode episode(*policy, instance, clean, T, seed);
      const auto loop_start = clock::now();
      while (episode.round() < early_end) episode.step();
      const auto early_done = clock::now();
      while (episode.round() < late_start) episode.step();
      const auto late_begin = clock::now();
      episode.run();
      const auto stop = clock::now();
      if (run == 0) continue;  // warm-up
      seconds.push_back(std::chrono::duration<double>(stop - start).count());
      if (early_end > 0) {
        early_ns.push_back(std::chrono::duration<double, std::nano>(early_done - loop_start).count() /
                           static_cast<double>(early_end));
      }
      if (T > late_start) {
        late_ns.push_back(std::chrono::duration<double, std::nano>(stop - late_begin).count() /
                          static_cast<double>(T - late_start));
      }
    }
    BenchRow row;
    row.algorithm = spec.name;
    row.mean_seconds = sample_mean(seconds);
    row.sd_seconds = sample_sd(seconds);
    row.early_step_ns = median(early_ns);
    row.late_step_ns = median(late_ns);
    row.step_ratio = row.early_step_ns > 0.0 ? row.late_step_ns / row.early_step_ns : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace banditlab

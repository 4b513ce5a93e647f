// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "banditlab/cli.hpp"
#include "banditlab/engine.hpp"
#include "banditlab/samba.hpp"
#include "banditlab/verify.hpp"

using namespace banditlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t worker_count() { return std::max<std::size_t>(1, std::thread::hardware_concurrency()); }

BanditInstance nine_arm_instance() {
  std::vector<double> m;
  for (int i = 1; i <= 9; ++i) m.push_back(i / 10.0);
  return make_instance(m);
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

AlgorithmSpec algorithm(AlgorithmKind kind) {
  AlgorithmSpec s;
  s.kind = kind;
  s.name = std::string(to_string(kind));
  return s;
}

const std::vector<CorruptionScheme> kPaperSchemes{CorruptionScheme::ConsecutiveStart, CorruptionScheme::EvenStepsStart,
                                                  CorruptionScheme::MiddleBlock, CorruptionScheme::RandomEarly};

Outcome simplex_fuzz() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240101);
  std::uint64_t steps = 0, clamps = 0;
  double worst_sum = 0.0, min_p = 1.0;
  while (steps < 1000000) {
    const std::size_t k = 2 + rng.below(63);
    double alpha = 0.0;
    while (alpha <= 0.0) alpha = rng.uniform();
    std::vector<double> means(k);
    for (auto& m : means) m = rng.uniform();
    auto state = samba_init(k, alpha);
    for (int i = 0; i < 1000 && steps < 1000000; ++i, ++steps) {
      const Arm a = samba_select(state, rng);
      samba_update(state, a, draw_reward(means[a], rng));
      double sum = 0.0;
      for (double p : state.p) {
        sum += p;
        min_p = std::min(min_p, p);
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    clamps += state.clamp_events;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst_sum <= 1e-9 && min_p > 0.0 && clamps == 0 && secs < 10.0,
          fmt("steps=%llu max|sum-1|=%.3g min_p=%.3g clamps=%llu time=%.2fs (limit 10s)",
              static_cast<unsigned long long>(steps), worst_sum, min_p, static_cast<unsigned long long>(clamps), secs)};
}

Outcome budget_safety() {
  const auto inst = nine_arm_instance();
  const Round horizon = 100000;
  const std::size_t reps = 10;
  std::size_t traces = 0, violations = 0;
  double worst_over = -1e300, worst_under = -1e300;
  for (auto strategy : {CorruptionStrategy::SuppressOptimal, CorruptionStrategy::SwapExtremes}) {
    for (auto scheme : kPaperSchemes) {
      for (double c : {0.0, 1000.0, 2000.0, 3000.0, 4000.0, 5000.0}) {
        CorruptionPlan plan;
        plan.scheme = scheme;
        plan.budget = c;
        plan.strategy = strategy;
        plan.horizon = horizon;
        const double cost = max_strategy_cost(inst, strategy);
        for (std::size_t r = 0; r < reps; ++r) {
          auto policy = samba_policy(inst.arms(), kDefaultSambaAlpha);
          const auto trace = run_episode(*policy, inst, plan, horizon, split_seed(77, traces));
          double spent = 0.0;
          for (const auto& rec : trace.records) spent += rec.corruption_cost;
          ++traces;
          worst_over = std::max(worst_over, spent - c);
          if (spent > c + 1e-9) ++violations;
          if (c >= 1.0) {
            worst_under = std::max(worst_under, (c - cost) - spent);
            if (spent < c - cost) ++violations;
          }
        }
      }
    }
  }
  return {violations == 0, fmt("traces=%zu violations=%zu max(spent-C)=%.3g max((C-cost)-spent)=%.3g", traces,
                               violations, worst_over, worst_under)};
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const auto inst = make_instance({0.9, 0.5});
  const double alpha = 0.1;
  const Round horizon = 8;
  const double exact = exact_regret_oracle(inst, alpha, horizon);
  const std::size_t episodes = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < episodes; ++i) {
    auto policy = samba_policy(2, alpha);
    EpisodeOptions options;
    options.record_rounds = false;
    Episode episode(*policy, inst, CorruptionPlan{}, horizon, split_seed(3, i), options);
    episode.run();
    sum += episode.regret();
    sum_sq += episode.regret() * episode.regret();
  }
  const double n = static_cast<double>(episodes);
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)));
  const double ci = 3.0 * sd / std::sqrt(n);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::abs(mean - exact) <= ci && secs < 60.0,
          fmt("exact=%.6f mc=%.6f |diff|=%.2e ci=%.2e episodes=%zu time=%.1fs (limit 60s)", exact, mean,
              std::abs(mean - exact), ci, episodes, secs)};
}

Outcome drift_suite() {
  const auto start = std::chrono::steady_clock::now();
  const auto inst = nine_arm_instance();
  const double alpha = kDefaultSambaAlpha;
  CheckOptions options;
  options.seed = 11;
  options.threads = worker_count();
  StatePrep nonleader_prep;
  StatePrep leader_prep;
  leader_prep.max_length = 20000;
  const double c8 = inst.min_gap / 8.0;
  std::vector<DriftReport> reports{
      check_drift_nonleader(inst, alpha, nonleader_prep, 0.0, 1000000, options),
      check_drift_nonleader(inst, alpha, nonleader_prep, c8, 1000000, options),
      check_drift_leader(inst, alpha, leader_prep, 0.0, 1000000, options),
      check_drift_leader(inst, alpha, leader_prep, c8, 1000000, options),
  };
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = secs < 300.0;
  std::string detail;
  const char* labels[] = {"nonleader c=0", "nonleader c=D/8", "leader c=0", "leader c=D/8"};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    pass = pass && reports[i].pass && reports[i].samples >= 1000000;
    detail += fmt("[%s: mean=%.5g ci=%.2g bound=%.5g %s] ", labels[i], reports[i].mean, reports[i].ci,
                  reports[i].bound, reports[i].pass ? "ok" : "over");
  }
  detail += fmt("time=%.1fs (limit 300s)", secs);
  return {pass, detail};
}

Outcome recovery_bound() {
  const auto start = std::chrono::steady_clock::now();
  CheckOptions options;
  options.seed = 13;
  options.threads = worker_count();
  const Injection injection[] = {{0, 0.9}};
  const auto report = check_recovery_time(nine_arm_instance(), kDefaultSambaAlpha, injection, 10000, options);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {report.pass && report.reps >= 10000 && secs < 300.0,
          fmt("mean=%.3f ci=%.3f bound=%.1f reps=%zu truncated=%zu max=%.0f time=%.1fs (limit 300s)", report.mean,
              report.ci, report.bound, report.reps, report.truncated, report.max_length, secs)};
}

Outcome decay_bound() {
  const auto start = std::chrono::steady_clock::now();
  CheckOptions options;
  options.seed = 17;
  options.threads = worker_count();
  const Round grid[] = {100, 1000, 10000};
  const auto report = check_qhat_decay(nine_arm_instance(), kDefaultSambaAlpha, 30000, 200, grid, options);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string detail;
  for (const auto& p : report.points) {
    detail += fmt("[s=%llu mean=%.4f ci=%.4f bound=%.4f reps=%zu] ", static_cast<unsigned long long>(p.s), p.mean,
                  p.ci, p.bound, p.reps);
  }
  detail += fmt("time=%.1fs (limit 300s)", secs);
  return {report.pass && secs < 300.0, detail};
}

Outcome logarithmic_regret() {
  ExperimentConfig config;
  config.instance.means = nine_arm_instance().means;
  config.algorithms = {algorithm(AlgorithmKind::Samba)};
  config.plans = {CorruptionPlan{}};
  config.horizon = 100000;
  config.replications = 100;
  config.master_seed = 19;
  config.threads = worker_count();
  config.checkpoints.spacing = CheckpointGrid::Spacing::Log;
  config.checkpoints.count = 21;
  config.checkpoints.first = 1000;
  const auto stats = run_batch(config);
  const auto& cell = stats.cells.front();
  const auto lin = fit_log_regret(cell.checkpoint_t, cell.curve_mean);
  const auto sq = fit_log2_regret(cell.checkpoint_t, cell.curve_mean);
  const double cap = static_cast<double>(nine_arm_instance().arms()) / (kDefaultSambaAlpha * nine_arm_instance().min_gap);
  return {lin.slope > 0.0 && lin.slope <= cap && lin.rms < sq.rms && cell.clamp_events == 0,
          fmt("slope=%.1f cap=%.0f rms(ln)=%.2f rms(ln^2)=%.2f final_regret=%.1f clamps=%llu", lin.slope, cap, lin.rms,
              sq.rms, cell.mean_regret, static_cast<unsigned long long>(cell.clamp_events))};
}

Outcome comparative_ordering() {
  const std::size_t ks[] = {6, 10, 20};
  const double reference[] = {629.9, 1054.8, 2947.4};
  std::size_t wins = 0;
  bool in_band = true;
  std::string detail;
  for (std::size_t i = 0; i < 3; ++i) {
    ExperimentConfig config;
    config.instance.random_arms = ks[i];
    for (auto kind : {AlgorithmKind::Samba, AlgorithmKind::FastSlowAae, AlgorithmKind::Barbar, AlgorithmKind::CBarbar,
                      AlgorithmKind::TsallisInf}) {
      config.algorithms.push_back(algorithm(kind));
    }
    CorruptionPlan plan;
    plan.scheme = CorruptionScheme::MiddleBlock;
    plan.budget = 3000;
    config.plans = {plan};
    config.horizon = 100000;
    config.replications = 100;
    config.master_seed = split_seed(23, ks[i]);
    config.threads = worker_count();
    config.checkpoints.count = 1;
    const auto stats = run_batch(config);
    const double samba = stats.cells.front().mean_regret;
    double best_other = 1e300;
    std::string best_name;
    detail += fmt("[K=%zu", ks[i]);
    for (const auto& cell : stats.cells) {
      detail += fmt(" %s=%.1f", cell.algorithm.c_str(), cell.mean_regret);
      if (cell.algorithm != "samba" && cell.mean_regret < best_other) {
        best_other = cell.mean_regret;
        best_name = cell.algorithm;
      }
    }
    detail += "] ";
    if (samba < best_other) ++wins;
    in_band = in_band && samba >= reference[i] / 3.0 && samba <= reference[i] * 3.0;
  }
  detail += fmt("samba_lowest_in=%zu/3 (need 2) samba_within_x3_of_reference=%s", wins, in_band ? "yes" : "no");
  return {wins >= 2 && in_band, detail};
}

Outcome combinatorial_cost() {
  ExperimentConfig config;
  config.instance.means = nine_arm_instance().means;
  config.algorithms = {algorithm(AlgorithmKind::Samba)};
  config.plans = {CorruptionPlan{}};
  config.horizon = 100000;
  config.master_seed = 29;
  BenchOptions options;
  options.runs = 5;
  const auto rows = bench_runtime(config, options);
  const auto& row = rows.front();
  const double ratio = row.step_ratio;
  return {ratio <= 2.0 && ratio >= 0.5 && row.mean_seconds < 5.0,
          fmt("early=%.1fns/step late=%.1fns/step ratio=%.3f run=%.4fs (limit 5s)", row.early_step_ns,
              row.late_step_ns, ratio, row.mean_seconds)};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "banditlab_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const nlohmann::json doc = {
      {"schema_version", 1},
      {"horizon", 20000},
      {"replications", 20},
      {"seed", 31},
      {"corruption", {{"levels", {0, 1000}}}},
      {"checkpoints", {{"count", 10}}},
  };
  std::ofstream(dir / "config.json") << doc.dump(2);
  std::vector<std::string> files;
  int failures = 0;
  const std::pair<const char*, const char*> runs[] = {{"a", "1"}, {"b", "1"}, {"c", "4"}, {"d", "3"}};
  for (const auto& [name, threads] : runs) {
    std::ostringstream out, err;
    const int code = cli::run_cli({"banditlab", "run", "--config", (dir / "config.json").string(), "--out",
                                   (dir / name).string(), "--threads", threads},
                                  out, err);
    if (code != cli::kExitOk) ++failures;
    files.push_back(slurp(dir / name / "results.csv"));
  }
  const bool identical = std::all_of(files.begin(), files.end(), [&](const auto& f) { return f == files.front(); });
  return {failures == 0 && identical && !files.front().empty(),
          fmt("runs=4 (threads 1,1,4,3) exit_failures=%d byte_identical=%s bytes=%zu", failures,
              identical ? "yes" : "no", files.front().size())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  std::vector<int> allow_fail;
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_option("--allow-fail", allow_fail, "criteria whose failure is a documented deviation")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"simplex fuzz", simplex_fuzz},
      {"budget safety", budget_safety},
      {"oracle equivalence", oracle_equivalence},
      {"drift suite", drift_suite},
      {"recovery bound", recovery_bound},
      {"decay bound", decay_bound},
      {"logarithmic regret", logarithmic_regret},
      {"comparative ordering", comparative_ordering},
      {"combinatorial cost", combinatorial_cost},
      {"reproducibility", reproducibility},
  };
  const std::set<int> selected(only.begin(), only.end());
  const std::set<int> allowed(allow_fail.begin(), allow_fail.end());

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string tag = outcome.pass ? "PASS" : "FAIL";
    if (!outcome.pass && allowed.count(id)) tag += " (known deviation)";
    std::cout << "criterion " << id << " " << tag << " " << criteria[i].first << ": " << outcome.detail
              << fmt(" [%.1fs]", secs) << std::endl;
    if (!outcome.pass && !allowed.count(id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}

#include "banditlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "banditlab/engine.hpp"
#include "banditlab/error.hpp"
#include "banditlab/policy.hpp"

namespace banditlab {

AnalysisConstants analysis_constants(const BanditInstance& instance, double alpha) {
  AnalysisConstants k;
  k.delta = instance.min_gap;
  k.r_star = instance.best_mean;
  k.alpha = alpha;
  k.large_corruption_threshold = k.delta / 4.0;
  const double second = k.r_star - k.delta;
  if (second > 0.0) {
    k.alpha_bound = k.delta / second;
    k.epsilon = 0.5 * (k.r_star / (second * (1.0 + alpha)) - 1.0);
  } else {
    k.alpha_bound = std::numeric_limits<double>::infinity();
    k.epsilon = 1.0;
  }
  k.xi = alpha * k.r_star / (1.0 + alpha) - alpha * second * (1.0 + k.epsilon);
  k.zeta = k.xi / (alpha * (1.0 + k.epsilon + 1.0 / (1.0 + alpha)));
  k.theory_valid = alpha < k.alpha_bound;
  return k;
}

void apply_update(UpdateRule rule, SambaState& state, Arm pulled, int reward) {
  samba_update(state, pulled, rule == UpdateRule::Tampered ? 1 - reward : reward);
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::vector<double> nonleader_means(const BanditInstance& instance, Arm leader, double c) {
  std::vector<double> m = instance.means;
  m[instance.optimal_arm] = clamp01(m[instance.optimal_arm] - c);
  if (leader != instance.optimal_arm) m[leader] = clamp01(m[leader] + c);
  return m;
}

std::vector<double> leader_means(const BanditInstance& instance, double c) {
  std::vector<double> m = instance.means;
  for (Arm a = 0; a < m.size(); ++a) {
    m[a] = a == instance.optimal_arm ? clamp01(m[a] - c) : clamp01(m[a] + c);
  }
  return m;
}

template <class Predicate>
SambaState prepare_state(const StatePrep& prep, const BanditInstance& instance, double alpha, Rng& rng,
                         Predicate qualifies) {
  if (prep.kind == StatePrep::Kind::Fixed) {
    SambaState s = samba_from_distribution(prep.fixed, alpha);
    if (s.arms() != instance.arms()) {
      throw Error(ErrorCode::PrepFailure, "fixed state has the wrong number of arms");
    }
    if (!qualifies(s)) throw Error(ErrorCode::PrepFailure, "fixed state does not qualify");
    return s;
  }
  for (std::size_t attempt = 0; attempt < prep.max_rejections; ++attempt) {
    SambaState s = samba_init(instance.arms(), alpha);
    const Round length = rng.below(prep.max_length + 1);
    for (Round t = 0; t < length; ++t) {
      const Arm a = samba_select(s, rng);
      samba_update(s, a, draw_reward(instance.means[a], rng));
    }
    if (qualifies(s)) return s;
  }
  throw Error(ErrorCode::PrepFailure, "no qualifying state after the rejection cap");
}

template <class Measure>
double exact_drift(const SambaState& state, std::span<const double> means, UpdateRule rule, Measure measure) {
  double total = 0.0;
  SambaState next = state;
  for (Arm a = 0; a < state.arms(); ++a) {
    if (state.p[a] <= 0.0) continue;
    for (int r = 0; r <= 1; ++r) {
      const double prob = state.p[a] * (r ? means[a] : 1.0 - means[a]);
      if (prob <= 0.0) continue;
      next.p = state.p;
      next.leader = state.leader;
      apply_update(rule, next, a, r);
      total += prob * measure(next);
    }
  }
  return total;
}

struct Cluster {
  double mc_mean = 0.0;
  double exact = 0.0;
};

enum class DriftKind { NonLeader, Leader };

DriftReport run_drift(DriftKind kind, const BanditInstance& instance, double alpha, const StatePrep& prep,
                      double c, std::size_t samples, const CheckOptions& options) {
  const auto k = analysis_constants(instance, alpha);
  const Arm opt = instance.optimal_arm;
  const double K = static_cast<double>(instance.arms());

  DriftReport report;
  if (kind == DriftKind::NonLeader) {
    report.name = "drift_nonleader";
    report.bound = -k.xi + alpha * c * (1.0 + k.epsilon + 1.0 / (1.0 + alpha));
  } else {
    report.name = "drift_leader";
    report.bound = alpha * (2.0 * c - k.delta) / K;
  }

  const std::size_t per_state = std::max<std::size_t>(prep.transitions_per_state, 1);
  const std::size_t clusters = std::max<std::size_t>((samples + per_state - 1) / per_state, 2);

  auto qualifies = [&](const SambaState& s) {
    if (kind == DriftKind::NonLeader) return s.leader != opt && s.p[opt] > 0.0;
    return s.leader == opt && s.p[opt] >= 0.5 && s.p[opt] < 1.0;
  };
  auto measure_from = [&](const SambaState& s) {
    if (kind == DriftKind::NonLeader) {
      const double x0 = 1.0 / s.p[opt];
      return std::function<double(const SambaState&)>(
          [x0, opt](const SambaState& n) { return 1.0 / n.p[opt] - x0; });
    }
    const double q0 = 1.0 - s.p[opt];
    return std::function<double(const SambaState&)>(
        [q0, opt](const SambaState& n) { return ((1.0 - n.p[opt]) - q0) / (q0 * q0); });
  };

  std::vector<Cluster> results(clusters);
  parallel_for(clusters, options.threads, [&](std::size_t i) {
    Rng rng(split_seed(options.seed, i));
    const SambaState state = prepare_state(prep, instance, alpha, rng, qualifies);
    const auto means = kind == DriftKind::NonLeader ? nonleader_means(instance, state.leader, c)
                                                    : leader_means(instance, c);
    const auto measure = measure_from(state);
    SambaState next = state;
    double sum = 0.0;
    for (std::size_t j = 0; j < per_state; ++j) {
      next.p = state.p;
      next.leader = state.leader;
      const Arm a = samba_select(next, rng);
      apply_update(options.update_rule, next, a, draw_reward(means[a], rng));
      sum += measure(next);
    }
    results[i].mc_mean = sum / static_cast<double>(per_state);
    results[i].exact = exact_drift(state, means, options.update_rule, measure);
  });

  std::vector<double> means(clusters);
  double worst = -std::numeric_limits<double>::infinity();
  double exact_sum = 0.0;
  for (std::size_t i = 0; i < clusters; ++i) {
    means[i] = results[i].mc_mean;
    exact_sum += results[i].exact;
    worst = std::max(worst, results[i].exact - report.bound);
  }
  report.mean = sample_mean(means);
  report.ci = options.ci_sigmas * sample_sd(means) / std::sqrt(static_cast<double>(clusters));
  report.samples = clusters * per_state;
  report.states = clusters;
  report.exact_mean = exact_sum / static_cast<double>(clusters);
  report.worst_state_excess = worst;
  report.pass = report.mean + report.ci <= report.bound;
  return report;
}

}  // namespace

DriftReport check_drift_nonleader(const BanditInstance& instance, double alpha, const StatePrep& prep,
                                  double c, std::size_t samples, const CheckOptions& options) {
  return run_drift(DriftKind::NonLeader, instance, alpha, prep, c, samples, options);
}

DriftReport check_drift_leader(const BanditInstance& instance, double alpha, const StatePrep& prep,
                               double c, std::size_t samples, const CheckOptions& options) {
  return run_drift(DriftKind::Leader, instance, alpha, prep, c, samples, options);
}

double exact_inverse_drift(const SambaState& state, Arm optimal, std::span<const double> means,
                           UpdateRule rule) {
  const double x0 = 1.0 / state.p[optimal];
  return exact_drift(state, means, rule, [&](const SambaState& n) { return 1.0 / n.p[optimal] - x0; });
}

double exact_leader_drift(const SambaState& state, Arm optimal, std::span<const double> means,
                          UpdateRule rule) {
  const double q0 = 1.0 - state.p[optimal];
  return exact_drift(state, means, rule,
                     [&](const SambaState& n) { return ((1.0 - n.p[optimal]) - q0) / (q0 * q0); });
}

// --- recovery ----------------------------------------------------------------

namespace {

struct RecoveryOutcome {
  double length = 0.0;
  bool truncated = false;
};

RecoveryOutcome one_recovery(const BanditInstance& instance, double alpha,
                             std::span<const Injection> injections, std::uint64_t seed,
                             const RecoveryOptions& options) {
  const Arm opt = instance.optimal_arm;
  Rng policy_rng(split_seed(seed, 1));
  Rng reward_rng(split_seed(seed, 2));
  SambaState state = samba_init(instance.arms(), alpha);

  auto step = [&](std::span<const double> means) {
    const Arm a = samba_select(state, policy_rng);
    samba_update(state, a, draw_reward(means[a], reward_rng));
  };

  Round t = 0;
  while (!(t >= options.burn_in && state.p[opt] >= 0.5)) {
    if (t >= options.max_burn_in) {
      throw Error(ErrorCode::BurnInFailure, "p* never reached 1/2 during burn-in");
    }
    step(instance.means);
    ++t;
  }
  const Round t0 = t;

  struct Window {
    Round start = 0;
    Round end = 0;
    double q = 0.0;
    bool open = false;
  };
  std::vector<Window> windows(injections.size());
  Round last_injection = t0;
  for (const auto& inj : injections) last_injection = std::max(last_injection, t0 + inj.offset);

  RecoveryOutcome outcome;
  std::size_t open = 0;
  for (;;) {
    const double q = 1.0 - state.p[opt];
    double cost = -1.0;
    for (std::size_t i = 0; i < injections.size(); ++i) {
      if (t0 + injections[i].offset == t) {
        windows[i] = {t, 0, q, true};
        ++open;
        cost = std::max(cost, injections[i].cost);
      }
    }
    if (cost >= 0.0) {
      step(leader_means(instance, cost));
    } else {
      step(instance.means);
    }
    ++t;
    const double q_next = 1.0 - state.p[opt];
    for (auto& w : windows) {
      if (w.open && q_next <= w.q) {
        w.open = false;
        w.end = t;
        --open;
      }
    }
    if (open == 0 && t > last_injection) break;
    if (t > last_injection + options.max_recovery) {
      for (auto& w : windows) {
        if (w.open) {
          w.open = false;
          w.end = t;
        }
      }
      outcome.truncated = true;
      break;
    }
  }

  // Union of the half-open windows (start, end].
  std::sort(windows.begin(), windows.end(), [](const Window& a, const Window& b) { return a.start < b.start; });
  Round covered = 0;
  Round reach = 0;
  bool any = false;
  for (const auto& w : windows) {
    const Round lo = any ? std::max(w.start, reach) : w.start;
    if (w.end > lo) covered += w.end - lo;
    reach = any ? std::max(reach, w.end) : w.end;
    any = true;
  }
  outcome.length = static_cast<double>(covered);
  return outcome;
}

}  // namespace

RecoveryReport check_recovery_time(const BanditInstance& instance, double alpha,
                                   std::span<const Injection> injections, std::size_t reps,
                                   const CheckOptions& options, const RecoveryOptions& recovery) {
  if (reps < 2) throw Error(ErrorCode::InvalidConfig, "recovery check needs at least two replications");
  std::vector<RecoveryOutcome> outcomes(reps);
  parallel_for(reps, options.threads, [&](std::size_t i) {
    outcomes[i] = one_recovery(instance, alpha, injections, split_seed(options.seed, i), recovery);
  });

  RecoveryReport report;
  std::vector<double> lengths(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    lengths[i] = outcomes[i].length;
    report.truncated += outcomes[i].truncated ? 1 : 0;
    report.max_length = std::max(report.max_length, lengths[i]);
  }
  double total_cost = 0.0;
  for (const auto& inj : injections) total_cost += inj.cost;
  report.reps = reps;
  report.mean = sample_mean(lengths);
  report.sd = sample_sd(lengths);
  report.ci = options.ci_sigmas * report.sd / std::sqrt(static_cast<double>(reps));
  report.bound = 4.0 * total_cost / instance.min_gap;
  report.pass = report.mean <= report.bound + report.ci;
  return report;
}

// --- decay -------------------------------------------------------------------

DecayReport check_qhat_decay(const BanditInstance& instance, double alpha, Round horizon,
                             std::size_t reps, std::span<const Round> grid, const CheckOptions& options) {
  std::vector<Round> points(grid.begin(), grid.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values(reps * points.size(), nan);
  const Arm opt = instance.optimal_arm;

  parallel_for(reps, options.threads, [&](std::size_t i) {
    const std::uint64_t seed = split_seed(options.seed, i);
    Rng policy_rng(split_seed(seed, 1));
    Rng reward_rng(split_seed(seed, 2));
    SambaState state = samba_init(instance.arms(), alpha);
    Round s = 0;
    std::size_t next = 0;
    for (Round t = 0; t < horizon && next < points.size(); ++t) {
      const double q = 1.0 - state.p[opt];
      if (q <= 0.5) {
        while (next < points.size() && points[next] == s) {
          values[i * points.size() + next] = q;
          ++next;
        }
        ++s;
      }
      const Arm a = samba_select(state, policy_rng);
      samba_update(state, a, draw_reward(instance.means[a], reward_rng));
    }
  });

  DecayReport report;
  report.pass = true;
  const double K = static_cast<double>(instance.arms());
  for (std::size_t g = 0; g < points.size(); ++g) {
    std::vector<double> column;
    for (std::size_t i = 0; i < reps; ++i) {
      const double v = values[i * points.size() + g];
      if (!std::isnan(v)) column.push_back(v);
    }
    DecayPoint p;
    p.s = points[g];
    p.reps = column.size();
    p.bound = 2.0 * K / (4.0 * K + alpha * instance.min_gap * static_cast<double>(p.s));
    p.mean = sample_mean(column);
    p.ci = column.empty() ? 0.0
                          : options.ci_sigmas * sample_sd(column) / std::sqrt(static_cast<double>(column.size()));
    p.pass = !column.empty() && p.mean <= p.bound + p.ci;
    report.pass = report.pass && p.pass;
    report.points.push_back(p);
  }
  return report;
}

double decay_recurrence(double a0, double gamma, Round steps) {
  double a = a0;
  for (Round t = 0; t < steps; ++t) a -= gamma * a * a;
  return a;
}

// --- exact oracle --------------------------------------------------------------

namespace {

struct OracleWalk {
  const BanditInstance& instance;
  double alpha;
  Round horizon;
  double regret = 0.0;
  double leaf_mass = 0.0;

  // Additive form of the update, kept separate from samba_update on purpose:
  // a rewarded leader takes alpha p_b^2 / p_l from every other arm b, a
  // rewarded non-leader gains alpha p_a, and the leader absorbs the rest.
  static std::vector<double> advance(const std::vector<double>& p, Arm pulled, double alpha) {
    Arm l = 0;
    for (Arm a = 1; a < p.size(); ++a) {
      if (p[a] > p[l]) l = a;
    }
    std::vector<double> n = p;
    if (pulled == l) {
      for (Arm b = 0; b < p.size(); ++b) {
        if (b != l) n[b] = p[b] - alpha * p[b] * p[b] / p[l];
      }
    } else {
      n[pulled] = p[pulled] + alpha * p[pulled];
    }
    double others = 0.0;
    for (Arm b = 0; b < p.size(); ++b) {
      if (b != l) others += n[b];
    }
    n[l] = 1.0 - others;
    return n;
  }

  void walk(const std::vector<double>& p, Round depth, double weight) {
    if (depth == horizon) {
      leaf_mass += weight;
      return;
    }
    double expected_gap = 0.0;
    double change = 0.0;
    for (Arm a = 0; a < p.size(); ++a) {
      expected_gap += p[a] * instance.gaps[a];
      change += p[a] * instance.means[a];
    }
    regret += weight * expected_gap;
    walk(p, depth + 1, weight * (1.0 - change));
    for (Arm a = 0; a < p.size(); ++a) {
      const double w = weight * p[a] * instance.means[a];
      if (w > 0.0) walk(advance(p, a, alpha), depth + 1, w);
    }
  }
};

}  // namespace

double exact_regret_oracle(const BanditInstance& instance, double alpha, Round horizon) {
  if (instance.arms() > 3 || horizon > 10) {
    throw Error(ErrorCode::InstanceTooLarge, "the exact oracle supports K <= 3 and T <= 10");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0,1)");
  OracleWalk w{instance, alpha, horizon};
  const std::vector<double> start(instance.arms(), 1.0 / static_cast<double>(instance.arms()));
  w.walk(start, 0, 1.0);
  if (std::abs(w.leaf_mass - 1.0) > 1e-12) {
    throw std::logic_error("outcome tree probabilities do not sum to one");
  }
  return w.regret;
}

// --- fits --------------------------------------------------------------------

namespace {

RegretFit least_squares(std::span<const Round> t, std::span<const double> y, bool squared) {
  if (t.size() != y.size()) throw Error(ErrorCode::DegenerateFit, "length mismatch");
  if (t.size() < 5) throw Error(ErrorCode::DegenerateFit, "need at least five checkpoints");
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  if (*lo == 0) throw Error(ErrorCode::DegenerateFit, "checkpoint at t = 0");
  if (static_cast<double>(*hi) < 10.0 * static_cast<double>(*lo)) {
    throw Error(ErrorCode::DegenerateFit, "checkpoints span less than one decade");
  }
  const double n = static_cast<double>(t.size());
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double l = std::log(static_cast<double>(t[i]));
    x[i] = squared ? l * l : l;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  RegretFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

}  // namespace

RegretFit fit_log_regret(std::span<const Round> t, std::span<const double> regret) {
  return least_squares(t, regret, false);
}

RegretFit fit_log2_regret(std::span<const Round> t, std::span<const double> regret) {
  return least_squares(t, regret, true);
}

// --- suite -------------------------------------------------------------------

namespace {

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

CheckResult drift_result(const DriftReport& r, double c) {
  CheckResult out;
  out.name = format("%s(c=%g)", r.name.c_str(), c);
  out.pass = r.pass;
  out.measured = r.mean + r.ci;
  out.bound = r.bound;
  out.detail = format("mean %.4g ci %.2g over %zu samples from %zu states; exact mean %.4g, worst state excess %.3g",
                      r.mean, r.ci, r.samples, r.states, r.exact_mean, r.worst_state_excess);
  return out;
}

template <class Fn>
CheckResult guarded(const std::string& name, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    CheckResult out;
    out.name = name;
    out.detail = e.what();
    return out;
  }
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const BanditInstance& instance, double alpha,
                                          const SuiteOptions& options) {
  const auto k = analysis_constants(instance, alpha);
  const std::size_t drift_samples = options.fast ? 100000 : 1000000;
  const std::size_t recovery_reps = options.fast ? 2000 : 10000;
  const std::size_t decay_reps = options.fast ? 50 : 200;
  const std::size_t oracle_reps = options.fast ? 100000 : 1000000;
  const std::size_t fit_reps = options.fast ? 20 : 100;

  CheckOptions check;
  check.threads = options.threads;
  check.update_rule = options.update_rule;

  std::vector<CheckResult> results;

  {
    CheckResult r;
    r.name = "analysis_constants";
    r.pass = k.theory_valid && k.epsilon > 0.0 && k.xi > 0.0 && k.zeta > 0.0;
    r.measured = alpha;
    r.bound = k.alpha_bound;
    r.detail = format("eps %.6g xi %.6g zeta %.6g", k.epsilon, k.xi, k.zeta);
    results.push_back(r);
  }

  StatePrep nonleader_prep;
  StatePrep leader_prep;
  leader_prep.max_length = 20000;
  std::uint64_t stream = 0;
  for (double c : {0.0, k.delta / 8.0}) {
    check.seed = split_seed(options.seed, stream++);
    results.push_back(guarded("drift_nonleader", [&] {
      return drift_result(check_drift_nonleader(instance, alpha, nonleader_prep, c, drift_samples, check), c);
    }));
  }
  for (double c : {0.0, k.delta / 8.0}) {
    check.seed = split_seed(options.seed, stream++);
    results.push_back(guarded("drift_leader", [&] {
      return drift_result(check_drift_leader(instance, alpha, leader_prep, c, drift_samples, check), c);
    }));
  }
  check.update_rule = UpdateRule::Samba;

  {
    check.seed = split_seed(options.seed, stream++);
    const double c0 = 0.9;
    results.push_back(guarded("recovery_time", [&] {
      const Injection inj{0, c0};
      const auto rep = check_recovery_time(instance, alpha, std::span(&inj, 1), recovery_reps, check);
      CheckResult r;
      r.name = format("recovery_time(c0=%g)", c0);
      r.pass = rep.pass;
      r.measured = rep.mean;
      r.bound = rep.bound + rep.ci;
      r.detail = format("mean %.4g sd %.4g over %zu reps, bound %.4g + ci %.3g, %zu truncated", rep.mean, rep.sd,
                        rep.reps, rep.bound, rep.ci, rep.truncated);
      return r;
    }));
  }

  {
    check.seed = split_seed(options.seed, stream++);
    const Round grid[] = {100, 1000, 10000};
    const auto rep = check_qhat_decay(instance, alpha, 30000, decay_reps, grid, check);
    for (const auto& p : rep.points) {
      CheckResult r;
      r.name = format("qhat_decay(s=%llu)", static_cast<unsigned long long>(p.s));
      r.pass = p.pass;
      r.measured = p.mean;
      r.bound = p.bound + p.ci;
      r.detail = format("mean %.4g ci %.2g over %zu chains, bound %.4g", p.mean, p.ci, p.reps, p.bound);
      results.push_back(r);
    }
  }

  {
    const double a0 = 0.5, gamma = 0.1;
    const Round steps = 1000;
    const double a = decay_recurrence(a0, gamma, steps);
    const double bound = a0 / (1.0 + gamma * static_cast<double>(steps) * a0);
    results.push_back({"decay_recurrence", a <= bound, a, bound, format("a_T after %llu steps",
                                                                         static_cast<unsigned long long>(steps))});
  }

  {
    const auto small = make_instance({0.9, 0.5});
    const double small_alpha = 0.1;
    const Round T = 8;
    const double exact = exact_regret_oracle(small, small_alpha, T);
    const std::size_t blocks = 1000;
    const std::size_t per_block = oracle_reps / blocks;
    std::vector<double> sums(blocks), squares(blocks);
    const std::uint64_t seed = split_seed(options.seed, stream++);
    parallel_for(blocks, options.threads, [&](std::size_t b) {
      EpisodeOptions eo;
      eo.record_rounds = false;
      for (std::size_t j = 0; j < per_block; ++j) {
        SambaPolicy policy(2, small_alpha);
        Episode ep(policy, small, CorruptionPlan{}, T, split_seed(seed, b * per_block + j), eo);
        ep.run();
        sums[b] += ep.regret();
        squares[b] += ep.regret() * ep.regret();
      }
    });
    double sum = 0.0, sq = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      sum += sums[b];
      sq += squares[b];
    }
    const double n = static_cast<double>(blocks * per_block);
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1.0)));
    const double ci = 3.0 * sd / std::sqrt(n);
    results.push_back({"oracle_vs_monte_carlo", std::abs(mean - exact) <= ci, std::abs(mean - exact), ci,
                       format("K=2 T=8: exact %.6f, simulated %.6f over %.0f episodes", exact, mean, n)});
  }

  results.push_back(guarded("log_regret_fit", [&] {
    ExperimentConfig cfg;
    cfg.instance.means = instance.means;
    AlgorithmSpec samba;
    samba.name = "samba";
    samba.alpha = alpha;
    cfg.algorithms = {samba};
    cfg.plans = {CorruptionPlan{}};
    cfg.horizon = 100000;
    cfg.replications = fit_reps;
    cfg.master_seed = split_seed(options.seed, stream++);
    cfg.checkpoints.spacing = CheckpointGrid::Spacing::Log;
    cfg.checkpoints.count = 21;
    cfg.checkpoints.first = 1000;
    cfg.threads = options.threads;
    const auto stats = run_batch(cfg);
    const auto& cell = stats.cells.front();
    const auto ln = fit_log_regret(cell.checkpoint_t, cell.curve_mean);
    const auto ln2 = fit_log2_regret(cell.checkpoint_t, cell.curve_mean);
    const double slope_bound = static_cast<double>(instance.arms()) / (alpha * instance.min_gap);
    CheckResult r;
    r.name = "log_regret_fit";
    r.pass = ln.slope > 0.0 && ln.slope <= slope_bound && ln.rms < ln2.rms;
    r.measured = ln.slope;
    r.bound = slope_bound;
    r.detail = format("slope %.4g, ln-fit rms %.4g vs ln^2-fit rms %.4g", ln.slope, ln.rms, ln2.rms);
    return r;
  }));

  return results;
}

}  // namespace banditlab

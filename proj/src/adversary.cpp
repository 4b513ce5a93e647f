#include "banditlab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "banditlab/error.hpp"

namespace banditlab {

std::string_view to_string(CorruptionScheme scheme) {
  switch (scheme) {
    case CorruptionScheme::None: return "none";
    case CorruptionScheme::ConsecutiveStart: return "consecutive_start";
    case CorruptionScheme::EvenStepsStart: return "even_steps_start";
    case CorruptionScheme::MiddleBlock: return "middle_block";
    case CorruptionScheme::RandomEarly: return "random_early";
    case CorruptionScheme::CustomSteps: return "custom_steps";
  }
  return "unknown";
}

std::string_view to_string(CorruptionStrategy strategy) {
  switch (strategy) {
    case CorruptionStrategy::SuppressOptimal: return "suppress_optimal";
    case CorruptionStrategy::SwapExtremes: return "swap_extremes";
  }
  return "unknown";
}

std::optional<CorruptionScheme> parse_scheme(std::string_view name) {
  for (auto s : {CorruptionScheme::None, CorruptionScheme::ConsecutiveStart,
                 CorruptionScheme::EvenStepsStart, CorruptionScheme::MiddleBlock,
                 CorruptionScheme::RandomEarly, CorruptionScheme::CustomSteps}) {
    if (to_string(s) == name) return s;
  }
  // Numbered aliases for the four experimental schemes.
  if (name == "1") return CorruptionScheme::ConsecutiveStart;
  if (name == "2") return CorruptionScheme::EvenStepsStart;
  if (name == "3") return CorruptionScheme::MiddleBlock;
  if (name == "4") return CorruptionScheme::RandomEarly;
  return std::nullopt;
}

std::optional<CorruptionStrategy> parse_strategy(std::string_view name) {
  if (name == "suppress_optimal") return CorruptionStrategy::SuppressOptimal;
  if (name == "swap_extremes") return CorruptionStrategy::SwapExtremes;
  return std::nullopt;
}

namespace {

Arm worst_arm(const BanditInstance& instance) {
  return static_cast<Arm>(std::min_element(instance.means.begin(), instance.means.end()) -
                          instance.means.begin());
}

}  // namespace

double max_strategy_cost(const BanditInstance& instance, CorruptionStrategy strategy) {
  double cost = instance.best_mean;
  if (strategy == CorruptionStrategy::SwapExtremes) {
    cost = std::max(cost, 1.0 - instance.means[worst_arm(instance)]);
  }
  return std::min(cost, 1.0);
}

std::size_t corrupted_round_count(double budget, double per_step_cost) {
  if (budget <= 0.0) return 0;
  // The slack keeps exact multiples (900 / 0.9) from growing a dust round.
  return static_cast<std::size_t>(std::ceil(budget / per_step_cost - 1e-9));
}

std::vector<Round> build_schedule(const CorruptionPlan& plan, double per_step_cost, Rng& rng) {
  if (!(plan.budget >= 0.0) || !std::isfinite(plan.budget)) {
    throw Error(ErrorCode::InvalidPlan, "budget must be finite and non-negative");
  }
  if (!(per_step_cost > 0.0 && per_step_cost <= 1.0)) {
    throw Error(ErrorCode::InvalidPlan, "per-step cost must lie in (0,1]");
  }
  if (plan.scheme == CorruptionScheme::None) return {};

  const std::size_t n = corrupted_round_count(plan.budget, per_step_cost);
  if (n == 0) return {};

  const Round T = plan.horizon;
  auto capacity_check = [&](Round slots) {
    if (n > slots) {
      throw Error(ErrorCode::BudgetExceedsHorizonCapacity,
                  std::to_string(n) + " corrupted rounds needed but scheme " +
                      std::string(to_string(plan.scheme)) + " has " + std::to_string(slots) +
                      " slots");
    }
  };

  std::vector<Round> rounds;
  rounds.reserve(n);
  switch (plan.scheme) {
    case CorruptionScheme::ConsecutiveStart:
      capacity_check(T);
      for (Round i = 0; i < n; ++i) rounds.push_back(i);
      break;
    case CorruptionScheme::EvenStepsStart:
      capacity_check((T + 1) / 2);
      for (Round i = 0; i < n; ++i) rounds.push_back(2 * i);
      break;
    case CorruptionScheme::MiddleBlock: {
      const Round start = T / 4;
      capacity_check(T - start);
      for (Round i = 0; i < n; ++i) rounds.push_back(start + i);
      break;
    }
    case CorruptionScheme::RandomEarly: {
      const Round window = T / 10;
      capacity_check(window);
      // Partial Fisher-Yates over the window.
      std::vector<Round> pool(window);
      std::iota(pool.begin(), pool.end(), Round{0});
      for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + rng.below(window - i);
        std::swap(pool[i], pool[j]);
      }
      rounds.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
      std::sort(rounds.begin(), rounds.end());
      break;
    }
    case CorruptionScheme::CustomSteps: {
      std::vector<Round> steps = plan.custom_steps;
      std::sort(steps.begin(), steps.end());
      steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
      if (!steps.empty() && steps.back() >= T) {
        throw Error(ErrorCode::InvalidPlan, "custom step beyond the horizon");
      }
      capacity_check(steps.size());
      rounds.assign(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(n));
      break;
    }
    case CorruptionScheme::None:
      break;
  }
  return rounds;
}

CorruptionLedger::CorruptionLedger(const CorruptionPlan& plan, const BanditInstance& instance,
                                   Rng& rng, std::optional<double> per_step_cost)
    : budget_(plan.budget), strategy_(plan.strategy), buffer_(instance.means) {
  const double feasible = max_strategy_cost(instance, plan.strategy);
  double cost = per_step_cost.value_or(feasible);
  if (per_step_cost && !(*per_step_cost > 0.0 && *per_step_cost <= 1.0)) {
    throw Error(ErrorCode::InvalidPlan, "per-step cost must lie in (0,1]");
  }
  cost = std::min(cost, feasible);
  per_step_cost_ = cost;
  if (cost > 0.0) {
    schedule_ = build_schedule(plan, cost, rng);
  } else if (!(plan.budget >= 0.0)) {
    throw Error(ErrorCode::InvalidPlan, "budget must be non-negative");
  }
}

bool CorruptionLedger::scheduled(Round t) const {
  return std::binary_search(schedule_.begin(), schedule_.end(), t);
}

CorruptionStep apply_corruption(const BanditInstance& instance, CorruptionLedger& ledger, Round t) {
  const double remaining = ledger.remaining();
  if (remaining <= 0.0 || !ledger.scheduled(t)) {
    return {instance.means, 0.0};
  }
  const double amount = std::min(ledger.per_step_cost_, remaining);

  auto& means = ledger.buffer_;
  std::copy(instance.means.begin(), instance.means.end(), means.begin());
  const Arm best = instance.optimal_arm;
  means[best] = std::max(0.0, instance.means[best] - amount);
  if (ledger.strategy_ == CorruptionStrategy::SwapExtremes) {
    const Arm worst = worst_arm(instance);
    if (worst != best) means[worst] = std::min(1.0, instance.means[worst] + amount);
  }

  double cost = 0.0;
  for (std::size_t a = 0; a < means.size(); ++a) {
    cost = std::max(cost, std::abs(instance.means[a] - means[a]));
  }
  ledger.spent_ += cost;
  return {means, cost};
}

}  // namespace banditlab

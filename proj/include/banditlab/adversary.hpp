#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

/// Where the corruption budget is placed on the time axis.
enum class CorruptionScheme {
  None,
  ConsecutiveStart,  // rounds 0, 1, 2, ...
  EvenStepsStart,    // rounds 0, 2, 4, ...
  MiddleBlock,       // rounds T/4, T/4 + 1, ...
  RandomEarly,       // distinct uniform rounds in [0, T/10)
  CustomSteps,       // explicit round list
};

/// What a corrupted round does to the means.
enum class CorruptionStrategy {
  SuppressOptimal,  // lower the optimal arm's mean
  SwapExtremes,     // additionally raise the worst arm by the same amount
};

std::string_view to_string(CorruptionScheme scheme);
std::string_view to_string(CorruptionStrategy strategy);
std::optional<CorruptionScheme> parse_scheme(std::string_view name);
std::optional<CorruptionStrategy> parse_strategy(std::string_view name);

struct CorruptionPlan {
  CorruptionScheme scheme = CorruptionScheme::None;
  double budget = 0.0;
  CorruptionStrategy strategy = CorruptionStrategy::SuppressOptimal;
  Round horizon = 0;
  std::vector<Round> custom_steps;  // only read by CustomSteps
};

/// Largest per-round cost the strategy can actually spend on this instance.
double max_strategy_cost(const BanditInstance& instance, CorruptionStrategy strategy);

/// Number of corrupted rounds for a budget: ceil(budget / per_step_cost).
std::size_t corrupted_round_count(double budget, double per_step_cost);

/// Places ceil(C / per_step_cost) rounds according to the scheme. Sorted,
/// distinct. Only RandomEarly consumes randomness.
std::vector<Round> build_schedule(const CorruptionPlan& plan, double per_step_cost, Rng& rng);

struct CorruptionStep {
  std::span<const double> means;  // valid until the next apply_corruption call
  double cost = 0.0;
};

/// Running account of one episode's corruption.
class CorruptionLedger {
 public:
  /// `per_step_cost` defaults to the strategy's full cost on this instance and
  /// is capped at it.
  CorruptionLedger(const CorruptionPlan& plan, const BanditInstance& instance, Rng& rng,
                   std::optional<double> per_step_cost = std::nullopt);

  double budget() const noexcept { return budget_; }
  double spent() const noexcept { return spent_; }
  double remaining() const noexcept { return budget_ - spent_; }
  double per_step_cost() const noexcept { return per_step_cost_; }
  CorruptionStrategy strategy() const noexcept { return strategy_; }
  const std::vector<Round>& schedule() const noexcept { return schedule_; }
  bool scheduled(Round t) const;

 private:
  friend CorruptionStep apply_corruption(const BanditInstance&, CorruptionLedger&, Round);

  double budget_ = 0.0;
  double spent_ = 0.0;
  double per_step_cost_ = 0.0;
  CorruptionStrategy strategy_ = CorruptionStrategy::SuppressOptimal;
  std::vector<Round> schedule_;
  std::vector<double> buffer_;
};

/// Corrupted means and cost for round t, booked against the ledger. Has no
/// access to the arm the player will pull. Unscheduled rounds and an
/// exhausted budget return the true means at zero cost.
CorruptionStep apply_corruption(const BanditInstance& instance, CorruptionLedger& ledger, Round t);

}  // namespace banditlab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "banditlab/policy.hpp"

namespace banditlab {

// ---------------------------------------------------------------------------
// Fast-Slow Active Arm Elimination Race (known corruption level).
//
// Two elimination layers share the arms. Each round the slow layer is played
// with probability 1/C (C >= 1), the fast layer otherwise; a layer plays its
// active arms round-robin and eliminates an arm once its upper confidence
// bound drops below the best lower bound. The slow layer's interval carries an
// extra (ln(1/delta) + 3)/n term for the corruption it may have absorbed, and
// its eliminations are forced onto the fast layer.
// ---------------------------------------------------------------------------
class FastSlowAae final : public Policy {
 public:
  enum class Layer { Fast, Slow };

  FastSlowAae(std::size_t arms, double delta, double known_corruption, Round horizon);

  std::string_view kind() const noexcept override { return "fast_slow_aae"; }
  std::size_t arms() const noexcept override { return arms_; }
  CostClass cost_class() const noexcept override { return CostClass::Combinatorial; }

  Arm select(Rng& rng) override;
  void update(Arm arm, int reward) override;

  bool active(Layer layer, Arm arm) const { return layer_state(layer).active[arm]; }
  std::size_t active_count(Layer layer) const { return layer_state(layer).active_count; }
  double slow_probability() const noexcept { return slow_probability_; }
  double confidence_width(Layer layer, std::uint64_t pulls) const;

 private:
  struct LayerState {
    std::vector<bool> active;
    std::vector<std::uint64_t> pulls;
    std::vector<double> reward_sum;
    std::size_t active_count = 0;

    void reset(const std::vector<bool>& mask);
  };

  const LayerState& layer_state(Layer layer) const { return layer == Layer::Fast ? fast_ : slow_; }
  LayerState& layer_state(Layer layer) { return layer == Layer::Fast ? fast_ : slow_; }
  void eliminate(Layer layer);

  std::size_t arms_;
  double log_term_;
  double slow_bias_;
  double slow_probability_;
  LayerState fast_;
  LayerState slow_;
  Layer pending_ = Layer::Fast;
};

PolicyHandle fs_aae_policy(std::size_t arms, double delta, double known_corruption, Round horizon);

// ---------------------------------------------------------------------------
// Phase-based elimination (BARBAR and the CBARBAR variant).
//
// Phase m pulls arm a exactly n_a(m) = ceil(lambda / gap_a^2) times in a
// shuffled order, where gap_a is the estimate from phase m-1 floored at
// 2^-(m-1). CBARBAR runs fixed phases of ceil(lambda * K * 4^(m-1)) rounds and
// hands the surplus to the previous phase's empirical best arm; it estimates
// gaps against the plain empirical maximum instead of BARBAR's
// r_a - gap_a/16 correction.
// ---------------------------------------------------------------------------
class PhasedElimination final : public Policy {
 public:
  enum class Variant { Barbar, CBarbar };

  PhasedElimination(std::size_t arms, double lambda_scale, Variant variant);

  std::string_view kind() const noexcept override {
    return variant_ == Variant::Barbar ? "barbar" : "cbarbar";
  }
  std::size_t arms() const noexcept override { return arms_; }
  CostClass cost_class() const noexcept override { return CostClass::Combinatorial; }

  Arm select(Rng& rng) override;
  void update(Arm arm, int reward) override;

  /// ceil(lambda / gap^2).
  static std::uint64_t phase_budget(double lambda_scale, double gap);

  /// 1-based index of the current phase; 0 before the first select.
  std::size_t phase() const noexcept { return phase_; }
  const std::vector<std::uint64_t>& budgets() const noexcept { return budgets_; }
  const std::vector<double>& gap_estimates() const noexcept { return gaps_; }
  std::uint64_t phase_length() const noexcept { return schedule_.size(); }
  std::uint64_t phase_position() const noexcept { return cursor_; }

 private:
  void close_phase();
  void open_phase(Rng& rng);

  std::size_t arms_;
  double lambda_;
  Variant variant_;
  std::size_t phase_ = 0;
  std::vector<double> gaps_;
  std::vector<std::uint64_t> budgets_;
  std::vector<std::uint64_t> pulls_;
  std::vector<double> rewards_;
  std::vector<Arm> schedule_;
  std::size_t cursor_ = 0;
  Arm empirical_best_ = 0;
};

PolicyHandle barbar_policy(std::size_t arms, double lambda_scale);
PolicyHandle cbarbar_policy(std::size_t arms, double lambda_scale);

/// The lambda of the original BARBAR analysis, 1024 ln(8K/delta log2 T).
/// Far too large to see more than one phase at T = 1e5; kept for reference
/// and for the "theory" config value.
double barbar_theoretical_lambda(std::size_t arms, double delta, Round horizon);

// ---------------------------------------------------------------------------
// Tsallis-INF (1/2-Tsallis entropy, online mirror descent).
// ---------------------------------------------------------------------------

inline constexpr int kTsallisMaxIterations = 200;

/// Weights w_a = 4 / (eta (L_a - x))^2 with the scalar x < min L chosen so the
/// weights sum to one (within 1e-10 before the final renormalisation).
/// Safeguarded Newton on a bracket, at most kTsallisMaxIterations steps.
void tsallis_solve_normalization(std::span<const double> losses, double eta, std::span<double> weights);
std::vector<double> tsallis_solve_normalization(std::span<const double> losses, double eta);

class TsallisInf final : public Policy {
 public:
  TsallisInf(std::size_t arms, double eta_scale);

  std::string_view kind() const noexcept override { return "tsallis_inf"; }
  std::size_t arms() const noexcept override { return losses_.size(); }
  CostClass cost_class() const noexcept override { return CostClass::IterativeSolver; }

  Arm select(Rng& rng) override;
  void update(Arm arm, int reward) override;

  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& loss_estimates() const noexcept { return losses_; }
  double learning_rate() const noexcept;

 private:
  double eta_scale_;
  std::uint64_t round_ = 1;
  std::vector<double> losses_;
  std::vector<double> weights_;
};

PolicyHandle tsallis_policy(std::size_t arms, double eta_scale = 1.0);

}  // namespace banditlab

#include "banditlab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "banditlab/error.hpp"

namespace banditlab {

// --- Fast-Slow AAE Race -----------------------------------------------------

void FastSlowAae::LayerState::reset(const std::vector<bool>& mask) {
  active = mask;
  pulls.assign(mask.size(), 0);
  reward_sum.assign(mask.size(), 0.0);
  active_count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

FastSlowAae::FastSlowAae(std::size_t arms, double delta, double known_corruption, Round horizon)
    : arms_(arms) {
  if (arms < 2) throw Error(ErrorCode::KTooSmall, "need at least two arms");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "delta must lie in (0,1)");
  }
  if (!(known_corruption >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "known corruption must be non-negative");
  }
  const double T = static_cast<double>(std::max<Round>(horizon, 1));
  log_term_ = std::log(4.0 * static_cast<double>(arms) * T / delta);
  slow_bias_ = std::log(1.0 / delta) + 3.0;
  slow_probability_ = known_corruption >= 1.0 ? 1.0 / known_corruption : 0.0;
  const std::vector<bool> all(arms, true);
  fast_.reset(all);
  slow_.reset(all);
}

double FastSlowAae::confidence_width(Layer layer, std::uint64_t pulls) const {
  if (pulls == 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(pulls);
  double width = std::sqrt(log_term_ / (2.0 * n));
  if (layer == Layer::Slow) width += slow_bias_ / n;
  return width;
}

Arm FastSlowAae::select(Rng& rng) {
  pending_ = (slow_probability_ > 0.0 && rng.uniform() < slow_probability_) ? Layer::Slow : Layer::Fast;
  const LayerState& s = layer_state(pending_);
  Arm pick = arms_;
  for (Arm a = 0; a < arms_; ++a) {
    if (s.active[a] && (pick == arms_ || s.pulls[a] < s.pulls[pick])) pick = a;
  }
  return pick;
}

void FastSlowAae::update(Arm arm, int reward) {
  if (arm >= arms_) throw Error(ErrorCode::InvalidArm, "arm out of range");
  LayerState& s = layer_state(pending_);
  s.pulls[arm] += 1;
  s.reward_sum[arm] += reward;
  eliminate(pending_);
}

void FastSlowAae::eliminate(Layer layer) {
  LayerState& s = layer_state(layer);
  double best_lower = -std::numeric_limits<double>::infinity();
  for (Arm a = 0; a < arms_; ++a) {
    if (!s.active[a] || s.pulls[a] == 0) continue;
    const double mean = s.reward_sum[a] / static_cast<double>(s.pulls[a]);
    best_lower = std::max(best_lower, mean - confidence_width(layer, s.pulls[a]));
  }
  for (Arm a = 0; a < arms_; ++a) {
    if (!s.active[a] || s.pulls[a] == 0 || s.active_count == 1) continue;
    const double mean = s.reward_sum[a] / static_cast<double>(s.pulls[a]);
    if (mean + confidence_width(layer, s.pulls[a]) < best_lower) {
      s.active[a] = false;
      --s.active_count;
    }
  }
  if (layer == Layer::Slow) {
    for (Arm a = 0; a < arms_; ++a) {
      if (fast_.active[a] && !slow_.active[a]) {
        fast_.active[a] = false;
        --fast_.active_count;
      }
    }
    // The fast layer was fooled into dropping every arm the slow layer
    // trusts: restart it from the slow layer's set.
    if (fast_.active_count == 0) fast_.reset(slow_.active);
  }
}

PolicyHandle fs_aae_policy(std::size_t arms, double delta, double known_corruption, Round horizon) {
  return std::make_unique<FastSlowAae>(arms, delta, known_corruption, horizon);
}

// --- BARBAR / CBARBAR -------------------------------------------------------

PhasedElimination::PhasedElimination(std::size_t arms, double lambda_scale, Variant variant)
    : arms_(arms), lambda_(lambda_scale), variant_(variant) {
  if (arms < 2) throw Error(ErrorCode::KTooSmall, "need at least two arms");
  if (!(lambda_scale > 0.0) || !std::isfinite(lambda_scale)) {
    throw Error(ErrorCode::InvalidConfig, "lambda_scale must be positive");
  }
  gaps_.assign(arms, 1.0);
  budgets_.assign(arms, 0);
  pulls_.assign(arms, 0);
  rewards_.assign(arms, 0.0);
}

std::uint64_t PhasedElimination::phase_budget(double lambda_scale, double gap) {
  return static_cast<std::uint64_t>(std::ceil(lambda_scale / (gap * gap)));
}

Arm PhasedElimination::select(Rng& rng) {
  if (cursor_ == schedule_.size()) {
    if (phase_ > 0) close_phase();
    open_phase(rng);
  }
  return schedule_[cursor_];
}

void PhasedElimination::update(Arm arm, int reward) {
  if (arm >= arms_) throw Error(ErrorCode::InvalidArm, "arm out of range");
  pulls_[arm] += 1;
  rewards_[arm] += reward;
  ++cursor_;
}

void PhasedElimination::close_phase() {
  // Gap estimates for the next phase, floored at 2^-m.
  const double floor = std::ldexp(1.0, -static_cast<int>(phase_));
  std::vector<double> mean(arms_, 0.0);
  for (Arm a = 0; a < arms_; ++a) {
    mean[a] = pulls_[a] > 0 ? rewards_[a] / static_cast<double>(pulls_[a]) : 0.0;
  }
  double reference = -std::numeric_limits<double>::infinity();
  empirical_best_ = 0;
  for (Arm a = 0; a < arms_; ++a) {
    const double candidate = variant_ == Variant::Barbar ? mean[a] - gaps_[a] / 16.0 : mean[a];
    reference = std::max(reference, candidate);
    if (mean[a] > mean[empirical_best_]) empirical_best_ = a;
  }
  for (Arm a = 0; a < arms_; ++a) {
    gaps_[a] = std::clamp(reference - mean[a], floor, 1.0);
  }
}

void PhasedElimination::open_phase(Rng& rng) {
  ++phase_;
  std::uint64_t total = 0;
  for (Arm a = 0; a < arms_; ++a) {
    budgets_[a] = phase_budget(lambda_, gaps_[a]);
    total += budgets_[a];
  }
  if (variant_ == Variant::CBarbar) {
    const double scale = std::ldexp(1.0, 2 * static_cast<int>(phase_ - 1));
    const auto length = static_cast<std::uint64_t>(
        std::ceil(lambda_ * static_cast<double>(arms_) * scale));
    const std::uint64_t others = total - budgets_[empirical_best_];
    budgets_[empirical_best_] = std::max(budgets_[empirical_best_], length > others ? length - others : 0);
    total = others + budgets_[empirical_best_];
  }

  schedule_.clear();
  schedule_.reserve(total);
  for (Arm a = 0; a < arms_; ++a) schedule_.insert(schedule_.end(), budgets_[a], a);
  for (std::size_t i = schedule_.size(); i > 1; --i) {
    std::swap(schedule_[i - 1], schedule_[rng.below(i)]);
  }
  cursor_ = 0;
  std::fill(pulls_.begin(), pulls_.end(), 0);
  std::fill(rewards_.begin(), rewards_.end(), 0.0);
}

PolicyHandle barbar_policy(std::size_t arms, double lambda_scale) {
  return std::make_unique<PhasedElimination>(arms, lambda_scale, PhasedElimination::Variant::Barbar);
}

PolicyHandle cbarbar_policy(std::size_t arms, double lambda_scale) {
  return std::make_unique<PhasedElimination>(arms, lambda_scale, PhasedElimination::Variant::CBarbar);
}

double barbar_theoretical_lambda(std::size_t arms, double delta, Round horizon) {
  const double log_t = std::log2(static_cast<double>(std::max<Round>(horizon, 2)));
  return 1024.0 * std::log(8.0 * static_cast<double>(arms) / delta * log_t);
}

// --- Tsallis-INF -------------------------------------------------------------

void tsallis_solve_normalization(std::span<const double> losses, double eta, std::span<double> weights) {
  const std::size_t k = losses.size();
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::InvalidConfig, "eta must be positive");
  }
  if (k == 0 || weights.size() != k) {
    throw Error(ErrorCode::InvalidConfig, "loss and weight vectors must be non-empty and equal length");
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (double l : losses) {
    if (!std::isfinite(l)) throw Error(ErrorCode::InvalidConfig, "loss estimates must be finite");
    lowest = std::min(lowest, l);
  }
  if (k == 1) {
    weights[0] = 1.0;
    return;
  }

  // g(x) = sum_a 4 / (eta (L_a - x))^2 - 1 is convex and increasing on
  // x < min L. At hi the smallest-loss term alone is 1, at lo every term is
  // at most 1/K, so [lo, hi] brackets the root.
  double hi = lowest - 2.0 / eta;
  double lo = lowest - 2.0 * std::sqrt(static_cast<double>(k)) / eta;
  double x = hi;
  for (int iter = 0; iter < kTsallisMaxIterations; ++iter) {
    double g = -1.0;
    double slope = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      const double inv = 1.0 / (eta * (losses[a] - x));
      const double w = 4.0 * inv * inv;
      g += w;
      slope += 2.0 * w / (losses[a] - x);
    }
    if (std::abs(g) <= 1e-13) {
      double sum = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        const double inv = 1.0 / (eta * (losses[a] - x));
        weights[a] = 4.0 * inv * inv;
        sum += weights[a];
      }
      for (auto& w : weights) w /= sum;
      return;
    }
    if (g > 0.0) hi = x; else lo = x;
    double next = x - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) {
      // Bracket collapsed to adjacent doubles; accept x only if close enough.
      if (std::abs(g) <= 1e-10) {
        double sum = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
          const double inv = 1.0 / (eta * (losses[a] - x));
          weights[a] = 4.0 * inv * inv;
          sum += weights[a];
        }
        for (auto& w : weights) w /= sum;
        return;
      }
      break;
    }
    x = next;
  }
  throw Error(ErrorCode::NoConvergence, "normalisation did not converge for eta " + std::to_string(eta));
}

std::vector<double> tsallis_solve_normalization(std::span<const double> losses, double eta) {
  std::vector<double> w(losses.size());
  tsallis_solve_normalization(losses, eta, w);
  return w;
}

TsallisInf::TsallisInf(std::size_t arms, double eta_scale)
    : eta_scale_(eta_scale), losses_(arms, 0.0), weights_(arms, 1.0 / static_cast<double>(arms)) {
  if (arms < 2) throw Error(ErrorCode::KTooSmall, "need at least two arms");
  if (!(eta_scale > 0.0)) throw Error(ErrorCode::InvalidConfig, "eta_scale must be positive");
}

double TsallisInf::learning_rate() const noexcept {
  return eta_scale_ / std::sqrt(static_cast<double>(round_));
}

Arm TsallisInf::select(Rng& rng) {
  tsallis_solve_normalization(losses_, learning_rate(), weights_);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (Arm a = 0; a < weights_.size(); ++a) {
    cumulative += weights_[a];
    if (u < cumulative) return a;
  }
  return weights_.size() - 1;
}

void TsallisInf::update(Arm arm, int reward) {
  if (arm >= losses_.size()) throw Error(ErrorCode::InvalidArm, "arm out of range");
  losses_[arm] += (1.0 - reward) / weights_[arm];
  ++round_;
}

PolicyHandle tsallis_policy(std::size_t arms, double eta_scale) {
  return std::make_unique<TsallisInf>(arms, eta_scale);
}

}  // namespace banditlab

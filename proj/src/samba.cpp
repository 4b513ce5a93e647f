#include "banditlab/samba.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "banditlab/error.hpp"

namespace banditlab {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0,1), got " + std::to_string(alpha));
  }
}

}  // namespace

SambaState samba_init(std::size_t arms, double alpha) {
  if (arms < 2) throw Error(ErrorCode::KTooSmall, "need at least two arms");
  check_alpha(alpha);
  SambaState s;
  s.p.assign(arms, 1.0 / static_cast<double>(arms));
  s.alpha = alpha;
  s.leader = 0;
  return s;
}

SambaState samba_from_distribution(std::vector<double> p, double alpha) {
  if (p.size() < 2) throw Error(ErrorCode::KTooSmall, "need at least two arms");
  check_alpha(alpha);
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidConfig, "probabilities must be finite and non-negative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "probabilities must sum to 1");
  }
  SambaState s;
  s.p = std::move(p);
  s.alpha = alpha;
  s.leader = samba_leader(s);
  return s;
}

Arm samba_leader(const SambaState& state) noexcept {
  Arm best = 0;
  for (Arm a = 1; a < state.p.size(); ++a) {
    if (state.p[a] > state.p[best]) best = a;
  }
  return best;
}

Arm samba_select(const SambaState& state, Rng& rng) noexcept {
  const double u = rng.uniform();
  double cumulative = 0.0;
  Arm last_positive = state.leader;
  for (Arm a = 0; a < state.p.size(); ++a) {
    if (state.p[a] <= 0.0) continue;
    cumulative += state.p[a];
    last_positive = a;
    if (u < cumulative) return a;
  }
  // Rounding left the cumulative sum a hair below u.
  return last_positive;
}

void samba_update(SambaState& state, Arm pulled, int reward) {
  const std::size_t k = state.p.size();
  if (pulled >= k) {
    throw Error(ErrorCode::InvalidArm, "arm " + std::to_string(pulled) + " out of range");
  }
  if (reward != 0 && reward != 1) {
    throw Error(ErrorCode::InvalidReward, "reward must be 0 or 1");
  }
  if (reward == 0) return;

  auto& p = state.p;
  const Arm leader = state.leader;
  const double alpha = state.alpha;

  if (pulled == leader) {
    const double scale = alpha / p[leader];
    for (Arm a = 0; a < k; ++a) {
      // p_a - alpha p_a^2 / p_l written as a product so positivity survives
      // rounding: the factor is at least 1 - alpha.
      if (a != leader) p[a] *= 1.0 - scale * p[a];
    }
  } else {
    p[pulled] *= 1.0 + alpha;
  }

  double others = 0.0;
  for (Arm a = 0; a < k; ++a) {
    if (a != leader) others += p[a];
  }
  p[leader] = 1.0 - others;

  bool clamped = false;
  for (Arm a = 0; a < k; ++a) {
    if (a != leader && !(p[a] > 0.0)) {
      p[a] = kSambaClampFloor;
      clamped = true;
    }
  }
  if (clamped || !(p[leader] > 0.0)) {
    ++state.clamp_events;
    others = 0.0;
    for (Arm a = 0; a < k; ++a) {
      if (a != leader) others += p[a];
    }
    if (others >= 1.0) {
      // Rescale the non-leaders so the leader keeps the floor mass.
      const double target = 1.0 - kSambaClampFloor;
      for (Arm a = 0; a < k; ++a) {
        if (a != leader) p[a] *= target / others;
      }
      others = target;
    }
    p[leader] = 1.0 - others;
  }

  state.leader = samba_leader(state);
}

}  // namespace banditlab

#pragma once

#include <cstdint>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

/// Probability floor used when floating-point drift would push an arm to a
/// non-positive probability. Standard runs never hit it.
inline constexpr double kSambaClampFloor = 1e-12;

/// Sampling distribution of the stochastic-approximation policy.
///
/// `leader` is cached eagerly after every update and always equals
/// argmax p with lowest-index tie-break.
struct SambaState {
  std::vector<double> p;
  double alpha = 0.0;
  Arm leader = 0;
  std::uint64_t clamp_events = 0;

  std::size_t arms() const noexcept { return p.size(); }
};

/// Uniform start. Requires K >= 2 and alpha in (0,1).
SambaState samba_init(std::size_t arms, double alpha);

/// Builds a state from an explicit distribution (tests, verification fixtures).
/// Entries must be non-negative and sum to 1 within 1e-9; zero entries are
/// allowed so that clipped states can be represented.
SambaState samba_from_distribution(std::vector<double> p, double alpha);

/// argmax_a p_a, lowest index on ties. O(K).
Arm samba_leader(const SambaState& state) noexcept;

/// Draws arm a with probability p_a by a linear scan of cumulative sums.
Arm samba_select(const SambaState& state, Rng& rng) noexcept;

/// One step of the update. If the leader was pulled every other arm shrinks
/// by alpha * p_a^2 * reward / p_leader; otherwise the pulled arm grows by the
/// factor (1 + alpha * reward). The leader then takes the remaining mass.
void samba_update(SambaState& state, Arm pulled, int reward);

}  // namespace banditlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

using Arm = std::size_t;
using Round = std::uint64_t;

inline constexpr std::size_t kMaxArms = 10000;

/// True arm means together with the derived quantities every other module
/// needs: the optimal arm, per-arm gaps and the smallest positive gap.
struct BanditInstance {
  std::vector<double> means;
  Arm optimal_arm = 0;
  double best_mean = 0.0;
  std::vector<double> gaps;
  double min_gap = 0.0;  // 0 only for degenerate all-tied instances
  bool degenerate = false;

  std::size_t arms() const noexcept { return means.size(); }
  std::string id() const;
};

/// Validates and derives an instance. Ties at the maximum are rejected
/// unless `allow_degenerate` is set, in which case the lowest tied index is
/// reported as optimal and tied arms have zero gap.
BanditInstance make_instance(std::vector<double> means, bool allow_degenerate = false);

/// Bernoulli draw: 1 with probability `mean`.
inline int draw_reward(double mean, Rng& rng) noexcept { return rng.bernoulli(mean) ? 1 : 0; }

struct RoundRecord {
  Round t = 0;
  std::uint32_t arm = 0;
  std::uint8_t reward = 0;
  bool corrupted = false;
  double corruption_cost = 0.0;
};

struct Checkpoint {
  Round t = 0;  // number of completed rounds
  double regret = 0.0;
};

struct Trace {
  std::string instance_id;
  std::vector<RoundRecord> records;
  std::vector<Checkpoint> regret_checkpoints;
  double corruption_spent = 0.0;  // as booked by the adversary's ledger
};

/// Sum of true gaps of the pulled arms. Corruption fields are ignored.
double pseudo_regret(std::span<const RoundRecord> records, const BanditInstance& instance);
double pseudo_regret(const Trace& trace, const BanditInstance& instance);

}  // namespace banditlab

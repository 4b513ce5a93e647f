#include "banditlab/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "banditlab/error.hpp"

namespace banditlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MeanOutOfRange: return "MeanOutOfRange";
    case ErrorCode::TiedOptimum: return "TiedOptimum";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::ArmIndexOutOfRange: return "ArmIndexOutOfRange";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::KTooSmall: return "KTooSmall";
    case ErrorCode::InvalidArm: return "InvalidArm";
    case ErrorCode::InvalidReward: return "InvalidReward";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::BudgetExceedsHorizonCapacity: return "BudgetExceedsHorizonCapacity";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::PrepFailure: return "PrepFailure";
    case ErrorCode::BurnInFailure: return "BurnInFailure";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
  }
  return "Unknown";
}

BanditInstance make_instance(std::vector<double> means, bool allow_degenerate) {
  if (means.size() < 2 || means.size() > kMaxArms) {
    throw Error(ErrorCode::InvalidInstance,
                "arm count must be in [2, " + std::to_string(kMaxArms) + "], got " +
                    std::to_string(means.size()));
  }
  for (std::size_t a = 0; a < means.size(); ++a) {
    if (!(means[a] >= 0.0 && means[a] <= 1.0)) {
      throw Error(ErrorCode::MeanOutOfRange,
                  "mean of arm " + std::to_string(a) + " is outside [0,1]");
    }
  }

  BanditInstance inst;
  inst.means = std::move(means);
  const auto best = std::max_element(inst.means.begin(), inst.means.end());
  inst.optimal_arm = static_cast<Arm>(best - inst.means.begin());
  inst.best_mean = *best;

  const auto ties = std::count(inst.means.begin(), inst.means.end(), inst.best_mean);
  if (ties > 1) {
    if (!allow_degenerate) {
      throw Error(ErrorCode::TiedOptimum, "more than one arm attains the maximal mean");
    }
    inst.degenerate = true;
  }

  inst.gaps.resize(inst.means.size());
  inst.min_gap = 0.0;
  for (std::size_t a = 0; a < inst.means.size(); ++a) {
    inst.gaps[a] = inst.best_mean - inst.means[a];
    if (inst.gaps[a] > 0.0 && (inst.min_gap == 0.0 || inst.gaps[a] < inst.min_gap)) {
      inst.min_gap = inst.gaps[a];
    }
  }
  return inst;
}

std::string BanditInstance::id() const {
  // FNV-1a over the bit patterns of the means.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double m : means) {
    auto bits = std::bit_cast<std::uint64_t>(m);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "K%zu-%016llx", means.size(),
                static_cast<unsigned long long>(h));
  return buf;
}

double pseudo_regret(std::span<const RoundRecord> records, const BanditInstance& instance) {
  double total = 0.0;
  for (const auto& r : records) {
    if (r.arm >= instance.arms()) {
      throw Error(ErrorCode::ArmIndexOutOfRange,
                  "round " + std::to_string(r.t) + " pulled arm " + std::to_string(r.arm));
    }
    total += instance.gaps[r.arm];
  }
  return total;
}

double pseudo_regret(const Trace& trace, const BanditInstance& instance) {
  return pseudo_regret(std::span<const RoundRecord>(trace.records), instance);
}

}  // namespace banditlab

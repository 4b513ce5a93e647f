#pragma once

#include <memory>
#include <string_view>

#include "banditlab/core.hpp"
#include "banditlab/rng.hpp"
#include "banditlab/samba.hpp"

namespace banditlab {

/// Per-round work class. Combinatorial policies do O(K) arithmetic per round
/// regardless of the horizon; iterative-solver policies run a numeric solve.
enum class CostClass { Combinatorial, IterativeSolver };

/// Uniform interface the simulator drives: select, observe, repeat. In
/// simulator use `update` always receives the arm returned by the preceding
/// `select`.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view kind() const noexcept = 0;
  virtual std::size_t arms() const noexcept = 0;
  virtual CostClass cost_class() const noexcept = 0;

  virtual Arm select(Rng& rng) = 0;
  virtual void update(Arm arm, int reward) = 0;
};

using PolicyHandle = std::unique_ptr<Policy>;

class SambaPolicy final : public Policy {
 public:
  SambaPolicy(std::size_t arms, double alpha) : state_(samba_init(arms, alpha)) {}

  std::string_view kind() const noexcept override { return "samba"; }
  std::size_t arms() const noexcept override { return state_.arms(); }
  CostClass cost_class() const noexcept override { return CostClass::Combinatorial; }

  Arm select(Rng& rng) override { return samba_select(state_, rng); }
  void update(Arm arm, int reward) override { samba_update(state_, arm, reward); }

  const SambaState& state() const noexcept { return state_; }

 private:
  SambaState state_;
};

inline PolicyHandle samba_policy(std::size_t arms, double alpha) {
  return std::make_unique<SambaPolicy>(arms, alpha);
}

}  // namespace banditlab

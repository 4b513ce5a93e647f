#include <doctest.h>

#include <cmath>
#include <unordered_set>

#include "banditlab/core.hpp"
#include "banditlab/error.hpp"
#include "banditlab/rng.hpp"

using namespace banditlab;

namespace {

std::vector<double> nine_arm_means() {
  std::vector<double> m;
  for (int i = 1; i <= 9; ++i) m.push_back(i / 10.0);
  return m;
}

ErrorCode code_of(auto fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidConfig;
}

std::vector<RoundRecord> pulls(std::initializer_list<std::uint32_t> arms) {
  std::vector<RoundRecord> out;
  Round t = 0;
  for (auto a : arms) out.push_back({t++, a, 0, false, 0.0});
  return out;
}

}  // namespace

TEST_CASE("nine-arm instance has its optimum at index 8 and gap 0.1") {
  const auto inst = make_instance(nine_arm_means());
  CHECK(inst.optimal_arm == 8);
  CHECK(inst.best_mean == doctest::Approx(0.9));
  CHECK(inst.min_gap == doctest::Approx(0.1));
  CHECK(inst.gaps[8] == 0.0);
  for (Arm a = 0; a < 9; ++a) CHECK(inst.gaps[a] == doctest::Approx(0.9 - inst.means[a]));
}

TEST_CASE("two-arm instance") {
  const auto inst = make_instance({0.9, 0.5});
  CHECK(inst.optimal_arm == 0);
  CHECK(inst.min_gap == doctest::Approx(0.4));
}

TEST_CASE("instance validation") {
  CHECK(code_of([] { make_instance({0.2, 1.2}); }) == ErrorCode::MeanOutOfRange);
  CHECK(code_of([] { make_instance({-0.1, 0.5}); }) == ErrorCode::MeanOutOfRange);
  CHECK(code_of([] { make_instance({0.5, std::nan("")}); }) == ErrorCode::MeanOutOfRange);
  CHECK(code_of([] { make_instance({0.5, 0.5}); }) == ErrorCode::TiedOptimum);
  CHECK(code_of([] { make_instance({0.5}); }) == ErrorCode::InvalidInstance);

  const auto flat = make_instance({0.5, 0.5}, true);
  CHECK(flat.degenerate);
  CHECK(flat.gaps[0] == 0.0);
  CHECK(flat.gaps[1] == 0.0);
}

TEST_CASE("instance id depends on the means only") {
  CHECK(make_instance(nine_arm_means()).id() == make_instance(nine_arm_means()).id());
  CHECK(make_instance({0.9, 0.5}).id() != make_instance({0.9, 0.4}).id());
  CHECK(make_instance({0.9, 0.5}).id().rfind("K2-", 0) == 0);
}

TEST_CASE("draw_reward extremes") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    CHECK(draw_reward(0.0, rng) == 0);
    CHECK(draw_reward(1.0, rng) == 1);
  }
}

TEST_CASE("draw_reward frequency lies in the binomial 3-sigma band") {
  Rng rng(2);
  const int n = 1000000;
  for (double mean : {0.9, 0.5, 0.1}) {
    long hits = 0;
    for (int i = 0; i < n; ++i) hits += draw_reward(mean, rng);
    const double sigma = std::sqrt(mean * (1 - mean) / n);
    CHECK(std::abs(static_cast<double>(hits) / n - mean) <= 3 * sigma);
  }
}

TEST_CASE("pseudo_regret examples") {
  const auto inst = make_instance({0.9, 0.5});
  CHECK(pseudo_regret(pulls({0, 0, 0}), inst) == 0.0);
  CHECK(pseudo_regret(pulls({1, 1, 1, 1, 1}), inst) == doctest::Approx(2.0));
  CHECK(code_of([&] { pseudo_regret(pulls({0, 2}), inst); }) == ErrorCode::ArmIndexOutOfRange);

  const auto flat = make_instance({0.3, 0.3, 0.3}, true);
  CHECK(pseudo_regret(pulls({0, 1, 2, 2, 1}), flat) == 0.0);
}

TEST_CASE("pseudo_regret is additive and ignores corruption fields") {
  const auto inst = make_instance(nine_arm_means());
  Rng rng(3);
  std::vector<RoundRecord> a, b;
  for (Round t = 0; t < 500; ++t) a.push_back({t, static_cast<std::uint32_t>(rng.below(9)), 0, false, 0.0});
  for (Round t = 0; t < 300; ++t) b.push_back({t, static_cast<std::uint32_t>(rng.below(9)), 1, false, 0.0});
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  CHECK(pseudo_regret(ab, inst) == doctest::Approx(pseudo_regret(a, inst) + pseudo_regret(b, inst)));

  auto corrupted = a;
  for (auto& r : corrupted) {
    r.corrupted = true;
    r.corruption_cost = 0.9;
    r.reward = 1 - r.reward;
  }
  CHECK(pseudo_regret(corrupted, inst) == pseudo_regret(a, inst));
}

TEST_CASE("generator matches the SplitMix64 reference stream") {
  // First outputs of SplitMix64 seeded with 0.
  Rng rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
}

TEST_CASE("uniform and below stay in range") {
  Rng rng(4);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.below(7) < 7);
  }
  std::vector<long> counts(5, 0);
  const int n = 500000;
  for (int i = 0; i < n; ++i) counts[rng.below(5)]++;
  const double sigma = std::sqrt(0.2 * 0.8 / n);
  for (long c : counts) CHECK(std::abs(static_cast<double>(c) / n - 0.2) <= 4 * sigma);
}

TEST_CASE("split_seed is deterministic and collision free on a million indices") {
  CHECK(split_seed(0, 0) != split_seed(0, 1));
  CHECK(split_seed(42, 7) == split_seed(42, 7));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2000000);
  for (std::uint64_t i = 0; i < 1000000; ++i) seen.insert(split_seed(12345, i));
  CHECK(seen.size() == 1000000);
}

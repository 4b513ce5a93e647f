#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "banditlab/error.hpp"
#include "banditlab/samba.hpp"

using namespace banditlab;

namespace {

ErrorCode code_of(auto fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidConfig;
}

// Reference update in the additive form: a rewarded leader takes
// alpha p_b^2 / p_l from every b, a rewarded non-leader gains alpha p_a.
std::vector<double> reference_update(const std::vector<double>& p, std::size_t pulled, int reward, double alpha) {
  if (reward == 0) return p;
  std::size_t l = 0;
  for (std::size_t a = 1; a < p.size(); ++a) {
    if (p[a] > p[l]) l = a;
  }
  std::vector<double> n = p;
  if (pulled == l) {
    for (std::size_t b = 0; b < p.size(); ++b) {
      if (b != l) n[b] = p[b] - alpha * p[b] * p[b] / p[l];
    }
  } else {
    n[pulled] = p[pulled] + alpha * p[pulled];
  }
  double rest = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    if (b != l) rest += n[b];
  }
  n[l] = 1.0 - rest;
  return n;
}

}  // namespace

TEST_CASE("uniform start") {
  const auto s = samba_init(9, 0.05);
  for (double v : s.p) CHECK(v == doctest::Approx(1.0 / 9));
  CHECK(s.leader == 0);
  const auto two = samba_init(2, 0.5);
  CHECK(two.p[0] == 0.5);
  CHECK(two.p[1] == 0.5);
  CHECK(two.leader == 0);
}

TEST_CASE("init validation") {
  CHECK(code_of([] { samba_init(2, 1.0); }) == ErrorCode::AlphaOutOfRange);
  CHECK(code_of([] { samba_init(2, 0.0); }) == ErrorCode::AlphaOutOfRange);
  CHECK(code_of([] { samba_init(1, 0.5); }) == ErrorCode::KTooSmall);
}

TEST_CASE("leader uses the lowest index on ties") {
  CHECK(samba_leader(samba_from_distribution({0.5, 0.5}, 0.1)) == 0);
  CHECK(samba_leader(samba_from_distribution({0.3, 0.4, 0.3}, 0.1)) == 1);
  CHECK(samba_leader(samba_init(9, 0.1)) == 0);
}

TEST_CASE("select on a clipped state") {
  auto s = samba_from_distribution({1.0, 0.0, 0.0, 0.0}, 0.1);
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) CHECK(samba_select(s, rng) == 0);
}

TEST_CASE("select frequencies match p within 3 sigma") {
  const int n = 1000000;
  for (const auto& p : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, 0.3, 0.5}}) {
    const auto s = samba_from_distribution(p, 0.1);
    Rng rng(6);
    std::vector<long> counts(p.size(), 0);
    for (int i = 0; i < n; ++i) counts[samba_select(s, rng)]++;
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double sigma = std::sqrt(p[a] * (1 - p[a]) / n);
      CHECK(std::abs(static_cast<double>(counts[a]) / n - p[a]) <= 3 * sigma);
    }
  }
}

TEST_CASE("rewarded leader shrinks the other arms quadratically") {
  auto s = samba_from_distribution({0.6, 0.4}, 0.05);
  samba_update(s, 0, 1);
  CHECK(s.p[1] == doctest::Approx(0.4 - 0.05 * 0.16 / 0.6).epsilon(1e-12));
  CHECK(s.p[0] == doctest::Approx(0.6133333333333333).epsilon(1e-12));
  CHECK(s.p[1] == doctest::Approx(0.3866666666666667).epsilon(1e-12));
  CHECK(s.leader == 0);
}

TEST_CASE("rewarded non-leader grows by 1 + alpha") {
  auto s = samba_from_distribution({0.5, 0.3, 0.2}, 0.1);
  samba_update(s, 2, 1);
  CHECK(s.p[0] == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(s.p[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(s.p[2] == doctest::Approx(0.22).epsilon(1e-12));
}

TEST_CASE("reward 0 is a fixed point") {
  auto s = samba_from_distribution({0.1, 0.7, 0.2}, 0.3);
  const auto before = s.p;
  for (Arm a = 0; a < 3; ++a) samba_update(s, a, 0);
  CHECK(s.p == before);
}

TEST_CASE("update validation") {
  auto s = samba_init(3, 0.1);
  CHECK(code_of([&] { samba_update(s, 3, 1); }) == ErrorCode::InvalidArm);
  CHECK(code_of([&] { samba_update(s, 0, 2); }) == ErrorCode::InvalidReward);
  CHECK(code_of([&] { samba_update(s, 0, -1); }) == ErrorCode::InvalidReward);
}

TEST_CASE("leader step strictly moves mass to the leader") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng.below(8);
    std::vector<double> p(k);
    for (auto& v : p) v = 0.05 + rng.uniform();
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= sum;
    auto s = samba_from_distribution(p, 0.01 + 0.98 * rng.uniform());
    const auto before = s.p;
    const Arm l = s.leader;
    samba_update(s, l, 1);
    for (Arm a = 0; a < k; ++a) {
      if (a == l) {
        CHECK(s.p[a] > before[a]);
      } else {
        CHECK(s.p[a] < before[a]);
      }
    }
  }
}

TEST_CASE("update is Markov in the current distribution") {
  Rng rng(8);
  auto s = samba_init(5, 0.2);
  for (int t = 0; t < 300; ++t) samba_update(s, rng.below(5), static_cast<int>(rng.below(2)));
  auto fresh = samba_from_distribution(s.p, 0.2);
  for (int t = 0; t < 200; ++t) {
    const Arm a = rng.below(5);
    const int r = static_cast<int>(rng.below(2));
    samba_update(s, a, r);
    samba_update(fresh, a, r);
    CHECK(s.p == fresh.p);
    CHECK(s.leader == fresh.leader);
  }
}

TEST_CASE("update agrees with the additive reference form") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.below(10);
    const double alpha = 0.01 + 0.9 * rng.uniform();
    auto s = samba_init(k, alpha);
    for (int t = 0; t < 50; ++t) {
      const Arm a = rng.below(k);
      const int r = static_cast<int>(rng.below(2));
      // One step from the same state each time; separate trajectories would
      // drift apart at near-ties where rounding picks a different leader.
      const auto ref = reference_update(s.p, a, r, alpha);
      samba_update(s, a, r);
      for (Arm b = 0; b < k; ++b) CHECK(s.p[b] == doctest::Approx(ref[b]).epsilon(1e-9));
    }
  }
}

TEST_CASE("simplex fuzz keeps the distribution valid") {
  Rng rng(10);
  std::uint64_t clamps = 0;
  for (int episode = 0; episode < 200; ++episode) {
    const std::size_t k = 2 + rng.below(63);
    auto s = samba_init(k, 0.001 + 0.998 * rng.uniform());
    for (int t = 0; t < 500; ++t) {
      samba_update(s, rng.below(k), static_cast<int>(rng.below(2)));
      const double sum = std::accumulate(s.p.begin(), s.p.end(), 0.0);
      REQUIRE(std::abs(sum - 1.0) <= 1e-9);
      REQUIRE(*std::min_element(s.p.begin(), s.p.end()) > 0.0);
      REQUIRE(s.leader == samba_leader(s));
    }
    clamps += s.clamp_events;
  }
  CHECK(clamps == 0);
}

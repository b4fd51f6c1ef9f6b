#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "banditlab/policies.hpp"
#include "banditlab/simulator.hpp"
#include "test_support.hpp"

using namespace banditlab;

namespace {

DeliveredEvent event(Round s, int user, int arm, double loss, double prob) {
  DeliveredEvent e;
  e.origin_round = s;
  e.user = user;
  e.arm = arm;
  e.loss = loss;
  e.origin_prob = prob;
  return e;
}

double simplex_error(std::span<const double> p) {
  long double s = 0.0L;
  for (double x : p) s += x;
  return std::abs(static_cast<double>(s) - 1.0);
}

}  // namespace

TEST_CASE("learning-rate truncation") {
  const long double e = std::numbers::e_v<long double>;
  CHECK(truncate_learning_rate(0.1, 2, 3, 4) == doctest::Approx(static_cast<double>(1.0L / (30.0L * e))));
  CHECK(truncate_learning_rate(0.1, 2, 3, 4) == doctest::Approx(0.0122626480390480774).epsilon(1e-15));
  CHECK(truncate_learning_rate(1e-9, 10, 10, 10) == 1e-9);
  const double cap = 1.0 / (10 * 10 * std::numbers::e * 11);
  CHECK(truncate_learning_rate(cap, 10, 10, 10) == cap);
  CHECK_THROWS_AS(truncate_learning_rate(0.0, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("recommended learning rate") {
  CHECK(recommended_eta(10, 10, 1000, 50000) ==
        doctest::Approx(6.985796097475502e-4).epsilon(1e-14));
  const double bare = std::sqrt(std::log(10.0) / (1000.0 * 100 * 10 * std::numbers::e));
  CHECK(recommended_eta(10, 10, 1000, 0) == doctest::Approx(bare).epsilon(1e-14));
  CHECK(recommended_eta(10, 10, 1000, 50001) < recommended_eta(10, 10, 1000, 50000));
}

TEST_CASE("importance-weighted estimates") {
  const auto e = event(1, 0, 2, 0.5, 0.25);
  CHECK(importance_weighted_estimate(e, 2) == 2.0);
  CHECK(importance_weighted_estimate(e, 1) == 0.0);
  CHECK(importance_weighted_estimate(event(1, 0, 1, 1.0, 1.0), 1) == 1.0);
  CHECK_THROWS_AS(importance_weighted_estimate(event(1, 0, 1, 1.0, 0.0), 1), std::invalid_argument);
}

TEST_CASE("mud observe adds mass to the chosen arm only") {
  MudExp3 mud(4, 2, 0.01, 1.0);
  mud.reset();
  mud.observe(1, {});
  for (double x : mud.cumulative_estimates()) CHECK(x == 0.0);

  const std::vector<DeliveredEvent> events{event(1, 0, 3, 0.2, 0.5), event(1, 1, 3, 0.4, 0.5)};
  mud.observe(2, events);
  CHECK(mud.cumulative_estimates()[3] == doctest::Approx(1.2));
  CHECK(mud.cumulative_estimates()[0] == 0.0);
  CHECK(mud.cumulative_estimates()[1] == 0.0);
  CHECK(mud.cumulative_estimates()[2] == 0.0);

  const auto before = std::vector<double>(mud.cumulative_estimates().begin(), mud.cumulative_estimates().end());
  const std::vector<DeliveredEvent> zeros{event(2, 0, 1, 0.0, 0.3), event(2, 1, 2, 0.0, 0.3)};
  mud.observe(3, zeros);
  CHECK(std::vector<double>(mud.cumulative_estimates().begin(), mud.cumulative_estimates().end()) == before);
}

TEST_CASE("softmax distribution") {
  const std::vector<double> zeros{0, 0, 0};
  for (double p : softmax_distribution(zeros, 0.7)) CHECK(p == doctest::Approx(1.0 / 3.0));

  const std::vector<double> two{0, 100};
  const auto p = softmax_distribution(two, 0.01);
  CHECK(p[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.2689414213699951).epsilon(1e-14));

  const std::vector<double> base{3.0, 1.5, 40.0, 0.0};
  std::vector<double> shifted = base;
  for (double& x : shifted) x += 1234.5;
  const auto a = softmax_distribution(base, 0.05);
  const auto b = softmax_distribution(shifted, 0.05);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

  // Extreme gaps still leave every entry positive.
  const std::vector<double> wide{0.0, 1e6};
  const auto w = softmax_distribution(wide, 1.0);
  CHECK(w[1] > 0.0);
  CHECK(simplex_error(w) < 1e-12);
}

TEST_CASE("categorical sampling") {
  PolicyRng rng(5);
  std::vector<double> point(5, 1e-300);
  point[0] = 1.0 - 4e-300;
  int hits = 0;
  for (int k = 0; k < 100000; ++k) hits += sample_categorical(point, rng) == 0;
  CHECK(hits == 100000);

  const std::vector<double> uniform(10, 0.1);
  std::vector<int> freq(10, 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) ++freq[sample_categorical(uniform, rng)];
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  for (int f : freq) CHECK(std::abs(f - 0.1 * n) <= 5.0 * sigma);

  PolicyRng r1(77), r2(77);
  for (int k = 0; k < 1000; ++k) CHECK(sample_categorical(uniform, r1) == sample_categorical(uniform, r2));
}

TEST_CASE("mud keeps a positive simplex and nondecreasing estimates") {
  MudExp3 mud(6, 3, 0.05, 5.0);
  mud.reset();
  PolicyRng rng(3);
  std::mt19937_64 env(4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> prev(6, 0.0);
  for (Round t = 1; t <= 2000; ++t) {
    const auto sel = mud.select(t, rng);
    std::vector<DeliveredEvent> events;
    for (int j = 0; j < 3; ++j) events.push_back(event(t, j, sel.arm, unif(env), sel.prob));
    mud.observe(t, events);
    CHECK(simplex_error(mud.distribution()) < 1e-12);
    for (int i = 0; i < 6; ++i) {
      REQUIRE(mud.distribution()[i] > 0.0);
      REQUIRE(mud.cumulative_estimates()[i] >= prev[i]);
      prev[i] = mud.cumulative_estimates()[i];
    }
  }
  CHECK(mud.learning_rate() == truncate_learning_rate(0.05, 3, 6, 5.0));
}

TEST_CASE("amud missing counts") {
  AmudExp3 amud(3, 3);
  amud.reset();
  amud.observe(1, {});
  CHECK(amud.snapshot().missing == 3);
  const std::vector<DeliveredEvent> two{event(1, 0, 0, 0.5, 1.0 / 3), event(1, 1, 0, 0.5, 1.0 / 3)};
  amud.observe(2, two);
  CHECK(amud.snapshot().missing == 4);
  CHECK(amud.cumulative_missing() == 7);
  CHECK(amud.received() == 2);
}

TEST_CASE("amud with unit delays: epoch e holds rounds [2^(e-1), 2^e)") {
  const int M = 4;
  AmudExp3 amud(5, M);
  amud.reset();
  PolicyRng rng(1);
  std::vector<DeliveredEvent> pending;
  for (Round t = 1; t <= 1100; ++t) {
    const auto sel = amud.select(t, rng);
    std::vector<DeliveredEvent> now;
    now.swap(pending);
    for (int j = 0; j < M; ++j) pending.push_back(event(t, j, sel.arm, 0.3, sel.prob));
    amud.observe(t, now);
    CHECK(amud.snapshot().missing == M);
    const int expected_epoch = static_cast<int>(std::floor(std::log2(static_cast<double>(t)))) + 1;
    REQUIRE(amud.epoch() == expected_epoch);
    CHECK(amud.learning_rate() == AmudExp3::epoch_rate(5, M, expected_epoch));
  }
  // One advance per round 2^(e-1), never more than one at a time.
  for (const auto& adv : amud.advance_log()) CHECK(adv.round == (Round{1} << (adv.epoch - 1)));
}

TEST_CASE("amud epoch advance zeroes the estimates") {
  AmudExp3 amud(3, 2);
  amud.reset();
  const std::vector<DeliveredEvent> one{event(1, 0, 1, 0.9, 1.0 / 3)};
  amud.observe(1, one);  // V_1 = 1 < 2: still epoch 0
  CHECK(amud.epoch() == 0);
  CHECK(amud.distribution()[1] < amud.distribution()[0]);
  amud.observe(2, {});  // V_2 = 3, cumulative 4: crosses 2 and 4
  CHECK(amud.epoch() == 2);
  CHECK(amud.advance_log().size() == 2);
  for (double p : amud.distribution()) CHECK(p == doctest::Approx(1.0 / 3.0));
  for (double x : amud.cumulative_estimates()) CHECK(x == 0.0);
}

TEST_CASE("amud learning-rate ladder shrinks by sqrt 2 per epoch") {
  for (int e = 0; e < 30; ++e) {
    CHECK(AmudExp3::epoch_rate(10, 10, e) == doctest::Approx(std::sqrt(std::log(10.0) / std::ldexp(1.0, e)) / 10.0));
    CHECK(AmudExp3::epoch_rate(10, 10, e + 1) / AmudExp3::epoch_rate(10, 10, e) ==
          doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-14));
  }
}

TEST_CASE("delayed UCB") {
  DelayedUcb ucb(3);
  ucb.reset();
  PolicyRng rng(0);
  CHECK(ucb.select(1, rng).arm == 0);
  ucb.observe(1, std::vector<DeliveredEvent>{event(1, 0, 0, 0.1, 1.0)});
  CHECK(ucb.select(2, rng).arm == 1);
  const std::vector<DeliveredEvent> arm2{event(1, 0, 2, 0.4, 1.0), event(1, 1, 2, 0.6, 1.0)};
  ucb.observe(2, arm2);
  CHECK(ucb.stats().mean(2) == doctest::Approx(0.5));
  CHECK(ucb.stats().count[2] == 2);
  CHECK(ucb.select(3, rng).arm == 1);

  // n = (100, 100), means (0.2, 0.8), t = 200
  DelayedUcb two(2);
  two.reset();
  std::vector<DeliveredEvent> batch;
  for (int k = 0; k < 100; ++k) {
    batch.push_back(event(1, 0, 0, 0.2, 1.0));
    batch.push_back(event(1, 0, 1, 0.8, 1.0));
  }
  two.observe(1, batch);
  const double r = std::sqrt(2.0 * std::log(200.0) / 100.0);
  REQUIRE(0.2 - r < 0.8 - r);
  CHECK(two.select(200, rng).arm == 0);
}

TEST_CASE("successive elimination: round robin before feedback") {
  SuccessiveElimination se(4);
  se.reset();
  PolicyRng rng(0);
  for (Round t = 1; t <= 12; ++t) CHECK(se.select(t, rng).arm == static_cast<int>((t - 1) % 4));
}

TEST_CASE("successive elimination drops a clearly worse arm at the predicted round") {
  // Deterministic losses 0.1 and 0.9, unit delays, one user. After round t
  // each arm's count is known in closed form, so the first round at which
  // 0.9 - r2 > 0.1 + r1 holds can be computed directly.
  SuccessiveElimination se(2);
  se.reset();
  PolicyRng rng(0);
  std::vector<DeliveredEvent> pending;
  Round eliminated = 0;
  for (Round t = 1; t <= 200 && eliminated == 0; ++t) {
    const auto sel = se.select(t, rng);
    std::vector<DeliveredEvent> now;
    now.swap(pending);
    pending.push_back(event(t, 0, sel.arm, sel.arm == 0 ? 0.1 : 0.9, sel.prob));
    se.observe(t, now);
    if (!se.active()[1]) eliminated = t;
  }
  Round predicted = 0;
  for (Round t = 2; t <= 200 && predicted == 0; ++t) {
    // Deliveries through t cover origins 1..t-1, alternating arms from arm 0.
    const double n0 = std::ceil((t - 1) / 2.0), n1 = std::floor((t - 1) / 2.0);
    if (n1 == 0) continue;
    const double r0 = std::sqrt(2 * std::log(static_cast<double>(t)) / n0);
    const double r1 = std::sqrt(2 * std::log(static_cast<double>(t)) / n1);
    if (0.9 - r1 > 0.1 + r0) predicted = t;
  }
  REQUIRE(predicted > 0);
  CHECK(eliminated == predicted);
  CHECK(se.active_count() == 1);
  for (Round t = 1; t <= 10; ++t) CHECK(se.select(eliminated + t, rng).arm == 0);
}

TEST_CASE("successive elimination leaves identical arms alone") {
  int fired = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SegmentedLossSpec spec;
    spec.num_arms = 5;
    spec.num_users = 1;
    spec.horizon = 2000;
    spec.segment_starts = {1};
    spec.params.assign(5, {0.5, 0.15});
    const LossRealization losses(spec, seed);
    const auto delays = build_delay_schedule(1, 2000, 10, seed + 1000);
    SuccessiveElimination se(5);
    run_episode(se, losses, delays, 2000, seed);
    fired += se.active_count() < 5;
  }
  CHECK(fired == 0);
}

TEST_CASE("oracle picks the smallest expected mean in a single segment") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto spec = build_adversarial_env(8, 1, 100, 1, seed);
    std::vector<double> totals(8, 0.0);
    int by_mean = 0;
    for (int i = 0; i < 8; ++i) {
      for (Round t = 1; t <= 100; ++t) totals[i] += expected_loss(spec, t, i);
      if (testing::simpson_truncated_mean(spec.at(i, 0).mean, spec.at(i, 0).stddev, 0, 1) <
          testing::simpson_truncated_mean(spec.at(by_mean, 0).mean, spec.at(by_mean, 0).stddev, 0, 1)) {
        by_mean = i;
      }
    }
    CHECK(oracle_arm(totals) == by_mean);
  }
  const std::vector<double> tie{2.0, 1.0, 1.0};
  CHECK(oracle_arm(tie) == 1);
  FixedArmPolicy fixed(4, 2);
  PolicyRng rng(0);
  for (Round t = 1; t <= 5; ++t) CHECK(fixed.select(t, rng).arm == 2);
  CHECK_THROWS_AS(FixedArmPolicy(4, 4), std::invalid_argument);
}

TEST_CASE("uniform random policy") {
  UniformRandomPolicy one(1);
  PolicyRng rng(8);
  for (Round t = 1; t <= 100; ++t) CHECK(one.select(t, rng).arm == 0);

  UniformRandomPolicy ten(10);
  std::vector<int> freq(10, 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const auto s = ten.select(1, rng);
    CHECK(s.prob == 0.1);
    ++freq[s.arm];
  }
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  for (int f : freq) CHECK(std::abs(f - 0.1 * n) <= 5.0 * sigma);

  PolicyRng a(3), b(3);
  for (int k = 0; k < 100; ++k) CHECK(ten.select(1, a).arm == ten.select(1, b).arm);
}

TEST_CASE("policies never read feedback before it is delivered") {
  // Perturbing every loss from round k on cannot change any selection up to
  // round k: those losses are delivered at k + 1 at the earliest.
  const int N = 4, M = 2;
  const Round T = 60, k = 30;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> base(static_cast<std::size_t>(T) * N * M);
  for (double& v : base) v = unif(rng);
  std::vector<double> perturbed = base;
  for (std::size_t c = static_cast<std::size_t>(k - 1) * N * M; c < perturbed.size(); ++c) {
    perturbed[c] = 1.0 - perturbed[c];
  }
  const auto la = LossRealization::from_table(N, M, T, base);
  const auto lb = LossRealization::from_table(N, M, T, perturbed);
  const auto delays = build_delay_schedule(M, T, 3, 5);

  std::vector<std::unique_ptr<Policy>> policies;
  policies.push_back(std::make_unique<MudExp3>(N, M, 0.5, 3.0));
  policies.push_back(std::make_unique<AmudExp3>(N, M));
  policies.push_back(std::make_unique<DelayedUcb>(N));
  policies.push_back(std::make_unique<SuccessiveElimination>(N));
  for (auto& p : policies) {
    const auto ta = run_episode(*p, la, delays, T, 9);
    const auto tb = run_episode(*p, lb, delays, T, 9);
    for (Round t = 1; t <= k; ++t) {
      CHECK_MESSAGE(ta.rounds[t - 1].arm == tb.rounds[t - 1].arm, p->name() << " at round " << t);
    }
  }
}

#pragma once

// Oblivious adversary: segmented truncated-Gaussian loss processes and
// bounded delay schedules. Rounds are 1-based; arms and users are 0-based.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "banditlab/random.hpp"

namespace banditlab {

using Round = std::int64_t;

struct ArmSegmentParams {
  double mean = 0.5;
  double stddev = 0.15;
};

inline constexpr double kMeanLo = 0.0;
inline constexpr double kMeanHi = 1.0;
inline constexpr double kStdLo = 0.1;
inline constexpr double kStdHi = 0.2;
inline constexpr double kLossLo = 0.0;
inline constexpr double kLossHi = 1.0;

struct SegmentedLossSpec {
  int num_arms = 0;
  int num_users = 0;
  Round horizon = 0;
  // First round of each segment; segment_starts[0] == 1.
  std::vector<Round> segment_starts;
  // Row-major [segment][arm].
  std::vector<ArmSegmentParams> params;

  int num_segments() const { return static_cast<int>(segment_starts.size()); }
  int segment_of(Round t) const;
  const ArmSegmentParams& at(int arm, int segment) const {
    return params[static_cast<std::size_t>(segment) * num_arms + arm];
  }
  ArmSegmentParams& at(int arm, int segment) {
    return params[static_cast<std::size_t>(segment) * num_arms + arm];
  }
  const ArmSegmentParams& params_at_round(int arm, Round t) const { return at(arm, segment_of(t)); }

  // Throws std::invalid_argument on any broken invariant. Parameter ranges
  // are only enforced when strict_ranges is set (test specs may use
  // degenerate standard deviations).
  void validate(bool strict_ranges = true) const;
};

// Start rounds of a uniform partition of [1, T] into `segments` pieces whose
// lengths differ by at most one.
std::vector<Round> uniform_segment_starts(Round horizon, int segments);

SegmentedLossSpec build_adversarial_env(int num_arms, int num_users, Round horizon, int tran_num,
                                        std::uint64_t seed);

// Gaussian(mean, stddev) conditioned on [lo, hi], drawn by rejection.
template <typename Urbg>
double sample_truncated_gaussian(double mean, double stddev, double lo, double hi, Urbg& rng);

// Analytic mean of Gaussian(mean, stddev) truncated to [lo, hi].
double truncated_gaussian_mean(double mean, double stddev, double lo, double hi);

double expected_loss(const SegmentedLossSpec& spec, Round t, int arm);

// Lazily realized loss table l_i^j(t). Each cell is generated from a
// counter-based stream keyed on (seed, t, i, j), so lookups are pure and
// order-independent. A materialized backing is available for small
// brute-force checks and hand-built instances.
class LossRealization {
 public:
  LossRealization(SegmentedLossSpec spec, std::uint64_t seed);

  // values indexed [((t - 1) * N + arm) * M + user]; every value in [0, 1].
  static LossRealization from_table(int num_arms, int num_users, Round horizon,
                                    std::vector<double> values);

  double loss(Round t, int arm, int user) const;
  // Sum over users of l_arm^j(t).
  double group_loss(Round t, int arm) const;

  LossRealization materialized() const;
  bool is_materialized() const { return !table_.empty(); }

  int num_arms() const { return num_arms_; }
  int num_users() const { return num_users_; }
  Round horizon() const { return horizon_; }
  std::uint64_t seed() const { return seed_; }
  const SegmentedLossSpec& spec() const { return spec_; }

 private:
  LossRealization() = default;
  double generate(Round t, int arm, int user) const;
  void check_indices(Round t, int arm, int user) const;

  SegmentedLossSpec spec_;
  std::uint64_t seed_ = 0;
  int num_arms_ = 0;
  int num_users_ = 0;
  Round horizon_ = 0;
  std::vector<double> table_;
};

enum class DelayKind { kUniform, kConstant, kGeometric, kHorizon, kCustom };

std::string to_string(DelayKind kind);
DelayKind delay_kind_from_string(const std::string& name);

class DelaySchedule {
 public:
  DelaySchedule() = default;
  // table indexed [(t - 1) * M + user]; every entry in [1, d_max].
  DelaySchedule(int num_users, Round horizon, int d_max, std::vector<int> table);

  int delay(Round t, int user) const {
    return table_[static_cast<std::size_t>(t - 1) * num_users_ + user];
  }
  int num_users() const { return num_users_; }
  Round horizon() const { return horizon_; }
  int d_max() const { return d_max_; }
  const std::vector<int>& table() const { return table_; }

  // Sum over every (t, j) of d_t^j.
  double full_sum() const;
  // Sum of d_t^j over pairs delivered by the horizon (t + d_t^j <= T).
  double delivered_sum() const;
  // Number of pairs with t + d_t^j > T.
  std::int64_t undelivered_count() const;

 private:
  int num_users_ = 0;
  Round horizon_ = 0;
  int d_max_ = 1;
  std::vector<int> table_;
};

// Independent uniform integers on [1, d_max].
DelaySchedule build_delay_schedule(int num_users, Round horizon, int d_max, std::uint64_t seed);
DelaySchedule build_constant_delays(int num_users, Round horizon, int delay);
// Geometric on {1, 2, ...} with success probability p, resampled above d_max.
DelaySchedule build_geometric_delays(int num_users, Round horizon, int d_max, double p,
                                     std::uint64_t seed);
// d_t^j = T - t + 1: nothing is ever delivered inside the horizon.
DelaySchedule build_horizon_delays(int num_users, Round horizon);

// ---------------------------------------------------------------------------

namespace detail {
[[noreturn]] void throw_rejection_cap(double mean, double stddev, double lo, double hi);
double normal_cdf(double z);
}  // namespace detail

inline constexpr long kRejectionCap = 10'000'000;

template <typename Urbg>
double sample_truncated_gaussian(double mean, double stddev, double lo, double hi, Urbg& rng) {
  if (!(lo < hi) || !(stddev > 0.0)) {
    throw std::invalid_argument("sample_truncated_gaussian: need lo < hi and stddev > 0");
  }
  const double a = (lo - mean) / stddev;
  const double b = (hi - mean) / stddev;
  // Interval holding the mode and at least one sd wide keeps mass >= 0.34.
  const bool wide = a <= 0.0 && b >= 0.0 && b - a >= 1.0;

  if (wide || detail::normal_cdf(b) - detail::normal_cdf(a) > 0.05) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (long it = 0; it < kRejectionCap; ++it) {
      const double z = normal(rng);
      if (z >= a && z <= b) return std::clamp(mean + stddev * z, lo, hi);
    }
  } else {
    // Uniform proposal on [a, b], accepted with the Gaussian density ratio
    // against the point of [a, b] nearest zero.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double ref = a > 0.0 ? a : (b < 0.0 ? b : 0.0);
    for (long it = 0; it < kRejectionCap; ++it) {
      const double z = a + (b - a) * unif(rng);
      const double u = unif(rng);
      if (u <= std::exp((ref * ref - z * z) / 2.0)) return std::clamp(mean + stddev * z, lo, hi);
    }
  }
  detail::throw_rejection_cap(mean, stddev, lo, hi);
}

}  // namespace banditlab

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "banditlab/environment.hpp"
#include "banditlab/policies.hpp"

namespace banditlab {

// Bucketed delivery queue. Events land in the bucket of round origin + delay;
// those past the horizon are counted as never delivered and dropped.
class FeedbackQueue {
 public:
  FeedbackQueue(Round horizon, int max_delay);

  void push(const DeliveredEvent& event);
  // Moves out the bucket for round t. Rounds must be popped in increasing order.
  std::vector<DeliveredEvent> pop(Round t);

  std::int64_t created() const { return created_; }
  std::int64_t delivered() const { return delivered_; }
  std::int64_t in_flight() const { return in_flight_; }
  std::int64_t omega_count() const { return omega_; }

 private:
  Round horizon_;
  int max_delay_;
  Round last_popped_ = 0;
  std::vector<std::vector<DeliveredEvent>> ring_;
  std::int64_t created_ = 0;
  std::int64_t delivered_ = 0;
  std::int64_t in_flight_ = 0;
  std::int64_t omega_ = 0;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RoundRecord {
  int arm = 0;
  int delivered = 0;
  // M t - (events delivered through t), counted by the simulator.
  std::int64_t v_t = 0;
  int epoch = 0;
  double eta = kNaN;
  std::int64_t policy_missing = -1;
  double round_loss = 0.0;
  double cum_loss = 0.0;
  // Sum of d_s^j over this round's deliveries.
  double delivered_delay = 0.0;
  double cum_regret_hindsight = kNaN;
  double cum_regret_expected = kNaN;
};

struct RunTrace {
  std::string policy;
  int num_arms = 0;
  int num_users = 0;
  Round horizon = 0;
  std::vector<RoundRecord> rounds;  // rounds[t - 1]

  std::int64_t created = 0;
  std::int64_t delivered = 0;
  std::int64_t omega_count = 0;
  double delivered_delay_sum = 0.0;
  double full_delay_sum = 0.0;

  // Filled when EpisodeOptions::record_trajectory is set and the policy is an
  // exponential-weights policy. distributions holds p(1)..p(T+1) row-major,
  // estimates holds the per-round estimate sums for t = 1..T.
  std::vector<double> distributions;
  std::vector<double> estimates;
  // Filled when EpisodeOptions::record_deliveries is set: (origin, user) pairs
  // delivered at each round, in queue order.
  std::vector<std::vector<std::pair<Round, int>>> deliveries;

  bool has_trajectory() const { return !distributions.empty(); }
  std::span<const double> p_at(Round t) const {
    return std::span<const double>(distributions).subspan(static_cast<std::size_t>(t - 1) * num_arms, num_arms);
  }
  std::span<const double> estimates_at(Round t) const {
    return std::span<const double>(estimates).subspan(static_cast<std::size_t>(t - 1) * num_arms, num_arms);
  }
};

struct EpisodeOptions {
  bool record_trajectory = false;
  bool record_deliveries = false;
};

// Per round: draw A_t, realize the M user losses and enqueue them, pop Φ_t
// and hand it to the policy, append the trace row. The policy is reset first.
RunTrace run_episode(Policy& policy, const LossRealization& losses, const DelaySchedule& delays, Round horizon,
                     std::uint64_t policy_seed, const EpisodeOptions& options = {});

// Per-arm reference losses for one environment realization. `realized` holds
// the group losses sum_j l_i^j(t) (T x N, empty when hindsight was skipped);
// `expected` holds M * expected_loss(t, i) (empty without a loss spec).
struct RegretReference {
  int num_arms = 0;
  int num_users = 0;
  Round horizon = 0;
  std::vector<double> realized;
  std::vector<double> expected;
  std::vector<double> realized_totals;
  std::vector<double> expected_totals;
  int best_arm = -1;
  int oracle_arm = -1;

  static RegretReference build(const LossRealization& losses, bool hindsight = true);
  bool has_hindsight() const { return !realized.empty(); }
  bool has_expected() const { return !expected.empty(); }
};

struct RegretReport {
  double player_loss = 0.0;
  double regret_hindsight = kNaN;
  double regret_expected = kNaN;
  int best_arm = -1;
  int oracle_arm = -1;
  std::int64_t omega_count = 0;
  double delivered_delay_sum = 0.0;
  double full_delay_sum = 0.0;
  // Player loss minus each fixed arm's realized total.
  std::vector<double> regret_per_arm;
};

RegretReport compute_regret(const RunTrace& trace, const RegretReference& reference);
RegretReport compute_regret(const RunTrace& trace, const LossRealization& losses);

// Writes cum_regret_hindsight / cum_regret_expected into every trace row,
// against the fixed best-in-hindsight and oracle arms.
void attach_regret_curves(RunTrace& trace, const RegretReference& reference);

struct BandSeries {
  std::vector<double> mean;
  std::vector<double> stddev;  // sample std, n - 1 denominator
  std::vector<double> lower;   // mean - 2 std
  std::vector<double> upper;   // mean + 2 std
};

enum class TraceMetric { kCumLoss, kCumRegretHindsight, kCumRegretExpected };

std::vector<double> extract_metric(const RunTrace& trace, TraceMetric metric);
BandSeries aggregate_series(std::span<const std::vector<double>> series);
BandSeries aggregate_replications(std::span<const RunTrace> traces, TraceMetric metric);

}  // namespace banditlab

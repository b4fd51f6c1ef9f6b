#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "banditlab/environment.hpp"
#include "banditlab/random.hpp"

namespace banditlab {

// One user's loss observation handed to a policy at its delivery round.
struct DeliveredEvent {
  Round origin_round = 0;
  int user = 0;
  int arm = 0;
  double loss = 0.0;
  // Probability the policy assigned to `arm` when it was drawn.
  double origin_prob = 1.0;
  int delay = 1;
};

struct Selection {
  int arm = 0;
  double prob = 1.0;
};

struct PolicySnapshot {
  int epoch = 0;
  double eta = std::numeric_limits<double>::quiet_NaN();
  // Missing-sample count V_t as tracked by the policy, when it tracks one.
  std::int64_t missing = -1;
};

// Selection happens before the round's deliveries are observed, so select(t)
// sees only feedback delivered at rounds <= t - 1.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual int num_arms() const = 0;
  virtual void reset() = 0;
  virtual Selection select(Round t, PolicyRng& rng) = 0;
  virtual void observe(Round t, std::span<const DeliveredEvent> events) = 0;
  virtual PolicySnapshot snapshot() const { return {}; }
};

// --- exponential-weights building blocks ------------------------------------

// min(eta, 1 / (M N e (delta + 1)))
double truncate_learning_rate(double eta, int num_users, int num_arms, double delta);

// sqrt(ln N / (M (T M N e + 4 sum_delays)))
double recommended_eta(int num_arms, int num_users, Round horizon, double sum_delays);

// loss / origin_prob for the chosen arm, zero elsewhere.
double importance_weighted_estimate(const DeliveredEvent& event, int arm);

// Per-arm sum of importance-weighted estimates over one delivery set.
std::vector<double> round_estimates(std::span<const DeliveredEvent> events, int num_arms);

// Softmax of -eta * cum_est_loss, shifted by the max exponent; entries are
// floored at 1e-300 before normalizing so every probability stays positive.
std::vector<double> softmax_distribution(std::span<const double> cum_est_loss, double eta);

// Categorical draw from p.
int sample_categorical(std::span<const double> p, PolicyRng& rng);

// argmin_i totals[i], lowest index on ties (relative 1e-12).
int oracle_arm(std::span<const double> expected_totals);

class ExpWeightsPolicy : public Policy {
 public:
  int num_arms() const override { return num_arms_; }
  Selection select(Round t, PolicyRng& rng) override;

  std::span<const double> distribution() const { return p_; }
  std::span<const double> cumulative_estimates() const { return cum_est_; }
  // Per-arm estimate sum from the most recent observe call.
  std::span<const double> last_round_estimates() const { return last_est_; }
  virtual double learning_rate() const = 0;

 protected:
  ExpWeightsPolicy(int num_arms, int num_users);
  void reset_weights();
  void accumulate(std::span<const DeliveredEvent> events);
  void refresh_distribution();

  int num_arms_;
  int num_users_;
  std::vector<double> cum_est_;
  std::vector<double> p_;
  std::vector<double> last_est_;
};

// Exponential weights over importance-weighted delayed multi-user feedback,
// with a learning rate truncated against the delay bound delta.
class MudExp3 final : public ExpWeightsPolicy {
 public:
  MudExp3(int num_arms, int num_users, double eta, double delta);

  std::string name() const override { return "mud"; }
  void reset() override { reset_weights(); }
  void observe(Round t, std::span<const DeliveredEvent> events) override;
  PolicySnapshot snapshot() const override { return {0, eta_prime_, -1}; }

  double learning_rate() const override { return eta_prime_; }
  double eta_input() const { return eta_input_; }
  double delta() const { return delta_; }

 private:
  double eta_input_;
  double delta_;
  double eta_prime_;
};

// Doubling-trick variant: no horizon or delay knowledge. The epoch index
// advances whenever the cumulative missing-sample count reaches 2^epoch * M;
// each advance zeroes the cumulative estimates, and the rate follows
// (1/M) sqrt(ln N / 2^epoch).
class AmudExp3 final : public ExpWeightsPolicy {
 public:
  struct EpochAdvance {
    Round round;
    int epoch;
  };

  AmudExp3(int num_arms, int num_users);

  std::string name() const override { return "amud"; }
  void reset() override;
  void observe(Round t, std::span<const DeliveredEvent> events) override;
  PolicySnapshot snapshot() const override { return {epoch_, eta_, last_missing_}; }

  double learning_rate() const override { return eta_; }
  int epoch() const { return epoch_; }
  std::int64_t cumulative_missing() const { return cum_missing_; }
  std::int64_t received() const { return received_; }
  // Every epoch increment, including ones skipped inside a single round.
  const std::vector<EpochAdvance>& advance_log() const { return advances_; }

  static double epoch_rate(int num_arms, int num_users, int epoch);

 private:
  int epoch_ = 0;
  double eta_ = 1.0;
  std::int64_t cum_missing_ = 0;
  std::int64_t received_ = 0;
  std::int64_t last_missing_ = 0;
  std::vector<EpochAdvance> advances_;
};

// --- baselines ---------------------------------------------------------------

// Per-arm statistics over delivered user-losses; each user-loss is a sample.
struct ArmStats {
  std::vector<std::int64_t> count;
  std::vector<double> sum;

  explicit ArmStats(int num_arms = 0) : count(num_arms, 0), sum(num_arms, 0.0) {}
  void add(std::span<const DeliveredEvent> events);
  double mean(int arm) const { return sum[arm] / static_cast<double>(count[arm]); }
  // sqrt(2 ln t / n); infinite for unsampled arms.
  double radius(int arm, Round t) const;
};

// Lower-confidence index on delayed losses: argmin mean - sqrt(2 ln t / n).
class DelayedUcb final : public Policy {
 public:
  explicit DelayedUcb(int num_arms);

  std::string name() const override { return "ducb"; }
  int num_arms() const override { return num_arms_; }
  void reset() override { stats_ = ArmStats(num_arms_); }
  Selection select(Round t, PolicyRng& rng) override;
  void observe(Round t, std::span<const DeliveredEvent> events) override { (void)t, stats_.add(events); }
  const ArmStats& stats() const { return stats_; }

 private:
  int num_arms_;
  ArmStats stats_;
};

// Round-robin over an active set; arm i leaves when
// mean_i - r_i > min_k (mean_k + r_k) over active k.
class SuccessiveElimination final : public Policy {
 public:
  explicit SuccessiveElimination(int num_arms);

  std::string name() const override { return "se"; }
  int num_arms() const override { return num_arms_; }
  void reset() override;
  Selection select(Round t, PolicyRng& rng) override;
  void observe(Round t, std::span<const DeliveredEvent> events) override;

  const std::vector<bool>& active() const { return active_; }
  int active_count() const;
  // Round at which each arm was eliminated, 0 while active.
  const std::vector<Round>& eliminated_at() const { return eliminated_at_; }
  const ArmStats& stats() const { return stats_; }

 private:
  int num_arms_;
  ArmStats stats_;
  std::vector<bool> active_;
  std::vector<Round> eliminated_at_;
  int cursor_ = 0;
};

// Plays one fixed arm every round (the oracle baseline when the arm is the
// minimizer of total expected loss).
class FixedArmPolicy final : public Policy {
 public:
  FixedArmPolicy(int num_arms, int arm, std::string label = "oracle");

  std::string name() const override { return label_; }
  int num_arms() const override { return num_arms_; }
  void reset() override {}
  Selection select(Round, PolicyRng&) override { return {arm_, 1.0}; }
  void observe(Round, std::span<const DeliveredEvent>) override {}
  int arm() const { return arm_; }

 private:
  int num_arms_;
  int arm_;
  std::string label_;
};

class UniformRandomPolicy final : public Policy {
 public:
  explicit UniformRandomPolicy(int num_arms);

  std::string name() const override { return "random"; }
  int num_arms() const override { return num_arms_; }
  void reset() override {}
  Selection select(Round t, PolicyRng& rng) override;
  void observe(Round, std::span<const DeliveredEvent>) override {}

 private:
  int num_arms_;
};

}  // namespace banditlab

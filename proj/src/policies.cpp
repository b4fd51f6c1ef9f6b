#include "banditlab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace banditlab {

namespace {

constexpr double kProbFloor = 1e-300;

void require_arms(int num_arms) {
  if (num_arms < 1) throw std::invalid_argument("policy: need at least one arm");
}

}  // namespace

double truncate_learning_rate(double eta, int num_users, int num_arms, double delta) {
  if (!(eta > 0.0) || num_users < 1 || num_arms < 1 || !(delta > 0.0)) {
    throw std::invalid_argument("truncate_learning_rate: inputs must be positive");
  }
  const double cap = 1.0 / (static_cast<double>(num_users) * num_arms * std::numbers::e * (delta + 1.0));
  return std::min(eta, cap);
}

double recommended_eta(int num_arms, int num_users, Round horizon, double sum_delays) {
  if (num_arms < 1 || num_users < 1 || horizon < 1 || sum_delays < 0.0) {
    throw std::invalid_argument("recommended_eta: inputs must be positive");
  }
  const double m = num_users;
  const double denom = m * (static_cast<double>(horizon) * m * num_arms * std::numbers::e + 4.0 * sum_delays);
  return std::sqrt(std::log(static_cast<double>(num_arms)) / denom);
}

double importance_weighted_estimate(const DeliveredEvent& event, int arm) {
  if (!(event.origin_prob > 0.0)) {
    throw std::invalid_argument("importance_weighted_estimate: origin probability must be positive");
  }
  return arm == event.arm ? event.loss / event.origin_prob : 0.0;
}

std::vector<double> round_estimates(std::span<const DeliveredEvent> events, int num_arms) {
  std::vector<double> est(static_cast<std::size_t>(num_arms), 0.0);
  for (const auto& e : events) est[e.arm] += importance_weighted_estimate(e, e.arm);
  return est;
}

std::vector<double> softmax_distribution(std::span<const double> cum_est_loss, double eta) {
  std::vector<double> p(cum_est_loss.size());
  if (p.empty()) return p;
  double top = -std::numeric_limits<double>::infinity();
  for (double l : cum_est_loss) top = std::max(top, -eta * l);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::max(std::exp(-eta * cum_est_loss[i] - top), kProbFloor);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

int sample_categorical(std::span<const double> p, PolicyRng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding left u above the accumulated mass; take the last positive entry.
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

int oracle_arm(std::span<const double> expected_totals) {
  if (expected_totals.empty()) throw std::invalid_argument("oracle_arm: no arms");
  const double lowest = *std::min_element(expected_totals.begin(), expected_totals.end());
  // Totals equal up to summation rounding count as ties.
  const double tol = 1e-12 * std::max(1.0, std::abs(lowest));
  for (std::size_t i = 0;; ++i) {
    if (expected_totals[i] <= lowest + tol) return static_cast<int>(i);
  }
}

// --- exponential weights -----------------------------------------------------

ExpWeightsPolicy::ExpWeightsPolicy(int num_arms, int num_users)
    : num_arms_(num_arms), num_users_(num_users) {
  require_arms(num_arms);
  if (num_users < 1) throw std::invalid_argument("policy: need at least one user");
  reset_weights();
}

void ExpWeightsPolicy::reset_weights() {
  cum_est_.assign(static_cast<std::size_t>(num_arms_), 0.0);
  p_.assign(static_cast<std::size_t>(num_arms_), 1.0 / num_arms_);
  last_est_.assign(static_cast<std::size_t>(num_arms_), 0.0);
}

Selection ExpWeightsPolicy::select(Round, PolicyRng& rng) {
  const int arm = sample_categorical(p_, rng);
  return {arm, p_[arm]};
}

void ExpWeightsPolicy::accumulate(std::span<const DeliveredEvent> events) {
  std::fill(last_est_.begin(), last_est_.end(), 0.0);
  for (const auto& e : events) last_est_[e.arm] += importance_weighted_estimate(e, e.arm);
  for (int i = 0; i < num_arms_; ++i) cum_est_[i] += last_est_[i];
}

void ExpWeightsPolicy::refresh_distribution() { p_ = softmax_distribution(cum_est_, learning_rate()); }

MudExp3::MudExp3(int num_arms, int num_users, double eta, double delta)
    : ExpWeightsPolicy(num_arms, num_users),
      eta_input_(eta),
      delta_(delta),
      eta_prime_(truncate_learning_rate(eta, num_users, num_arms, delta)) {}

void MudExp3::observe(Round, std::span<const DeliveredEvent> events) {
  accumulate(events);
  // No new mass leaves p unchanged; skip the recompute.
  if (!events.empty()) refresh_distribution();
}

AmudExp3::AmudExp3(int num_arms, int num_users) : ExpWeightsPolicy(num_arms, num_users) {}

double AmudExp3::epoch_rate(int num_arms, int num_users, int epoch) {
  return std::sqrt(std::log(static_cast<double>(num_arms)) / std::ldexp(1.0, epoch)) / num_users;
}

void AmudExp3::reset() {
  reset_weights();
  epoch_ = 0;
  eta_ = 1.0;
  cum_missing_ = 0;
  received_ = 0;
  last_missing_ = 0;
  advances_.clear();
}

void AmudExp3::observe(Round t, std::span<const DeliveredEvent> events) {
  received_ += static_cast<std::int64_t>(events.size());
  last_missing_ = static_cast<std::int64_t>(num_users_) * t - received_;
  cum_missing_ += last_missing_;
  // A single round can cross several thresholds; advance through all of them.
  while (epoch_ < 62 && cum_missing_ >= (std::int64_t{1} << epoch_) * num_users_) {
    ++epoch_;
    std::fill(cum_est_.begin(), cum_est_.end(), 0.0);
    advances_.push_back({t, epoch_});
  }
  eta_ = epoch_rate(num_arms_, num_users_, epoch_);
  accumulate(events);
  refresh_distribution();
}

// --- baselines ---------------------------------------------------------------

void ArmStats::add(std::span<const DeliveredEvent> events) {
  for (const auto& e : events) {
    ++count[e.arm];
    sum[e.arm] += e.loss;
  }
}

double ArmStats::radius(int arm, Round t) const {
  if (count[arm] == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(count[arm]));
}

DelayedUcb::DelayedUcb(int num_arms) : num_arms_(num_arms), stats_(num_arms) { require_arms(num_arms); }

Selection DelayedUcb::select(Round t, PolicyRng&) {
  for (int i = 0; i < num_arms_; ++i) {
    if (stats_.count[i] == 0) return {i, 1.0};
  }
  int best = 0;
  double best_index = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_arms_; ++i) {
    const double index = stats_.mean(i) - stats_.radius(i, t);
    if (index < best_index) {
      best_index = index;
      best = i;
    }
  }
  return {best, 1.0};
}

SuccessiveElimination::SuccessiveElimination(int num_arms) : num_arms_(num_arms), stats_(num_arms) {
  require_arms(num_arms);
  reset();
}

void SuccessiveElimination::reset() {
  stats_ = ArmStats(num_arms_);
  active_.assign(static_cast<std::size_t>(num_arms_), true);
  eliminated_at_.assign(static_cast<std::size_t>(num_arms_), 0);
  cursor_ = 0;
}

int SuccessiveElimination::active_count() const {
  return static_cast<int>(std::count(active_.begin(), active_.end(), true));
}

Selection SuccessiveElimination::select(Round, PolicyRng&) {
  for (int step = 0; step < num_arms_; ++step) {
    const int arm = (cursor_ + step) % num_arms_;
    if (active_[arm]) {
      cursor_ = (arm + 1) % num_arms_;
      return {arm, 1.0};
    }
  }
  throw std::logic_error("successive elimination: active set is empty");
}

void SuccessiveElimination::observe(Round t, std::span<const DeliveredEvent> events) {
  stats_.add(events);
  if (events.empty()) return;
  // An unsampled active arm has an infinite upper bound, so nothing can go.
  for (int k = 0; k < num_arms_; ++k) {
    if (active_[k] && stats_.count[k] == 0) return;
  }
  double best_upper = std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_arms_; ++k) {
    if (active_[k]) best_upper = std::min(best_upper, stats_.mean(k) + stats_.radius(k, t));
  }
  for (int i = 0; i < num_arms_; ++i) {
    if (active_[i] && stats_.mean(i) - stats_.radius(i, t) > best_upper) {
      active_[i] = false;
      eliminated_at_[i] = t;
    }
  }
}

FixedArmPolicy::FixedArmPolicy(int num_arms, int arm, std::string label)
    : num_arms_(num_arms), arm_(arm), label_(std::move(label)) {
  require_arms(num_arms);
  if (arm < 0 || arm >= num_arms) throw std::invalid_argument("fixed-arm policy: arm out of range");
}

UniformRandomPolicy::UniformRandomPolicy(int num_arms) : num_arms_(num_arms) { require_arms(num_arms); }

Selection UniformRandomPolicy::select(Round, PolicyRng& rng) {
  std::uniform_int_distribution<int> dist(0, num_arms_ - 1);
  return {dist(rng), 1.0 / num_arms_};
}

}  // namespace banditlab

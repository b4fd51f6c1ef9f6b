#include "banditlab/environment.hpp"

#include <algorithm>
#include <numbers>

namespace banditlab {

namespace detail {

void throw_rejection_cap(double mean, double stddev, double lo, double hi) {
  std::ostringstream msg;
  msg << "truncated Gaussian rejection exceeded " << kRejectionCap << " iterations (mean=" << mean
      << ", stddev=" << stddev << ", range=[" << lo << ", " << hi << "])";
  throw std::runtime_error(msg.str());
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace detail

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

int SegmentedLossSpec::segment_of(Round t) const {
  auto it = std::upper_bound(segment_starts.begin(), segment_starts.end(), t);
  return static_cast<int>(it - segment_starts.begin()) - 1;
}

void SegmentedLossSpec::validate(bool strict_ranges) const {
  if (num_arms < 1 || num_users < 1 || horizon < 1) {
    throw std::invalid_argument("loss spec: dimensions must be positive");
  }
  if (segment_starts.empty() || segment_starts.front() != 1) {
    throw std::invalid_argument("loss spec: first segment must start at round 1");
  }
  for (std::size_t k = 1; k < segment_starts.size(); ++k) {
    if (segment_starts[k] <= segment_starts[k - 1] || segment_starts[k] > horizon) {
      throw std::invalid_argument("loss spec: segment starts must increase strictly within [1, T]");
    }
  }
  if (params.size() != segment_starts.size() * static_cast<std::size_t>(num_arms)) {
    throw std::invalid_argument("loss spec: expected one parameter pair per (arm, segment)");
  }
  for (const auto& p : params) {
    if (!(p.stddev > 0.0)) throw std::invalid_argument("loss spec: stddev must be positive");
    if (strict_ranges && (p.mean < kMeanLo || p.mean > kMeanHi || p.stddev < kStdLo || p.stddev > kStdHi)) {
      throw std::invalid_argument("loss spec: (mean, stddev) outside [0,1] x [0.1,0.2]");
    }
  }
}

std::vector<Round> uniform_segment_starts(Round horizon, int segments) {
  std::vector<Round> starts;
  starts.reserve(static_cast<std::size_t>(segments));
  for (int k = 0; k < segments; ++k) {
    starts.push_back(1 + (static_cast<Round>(k) * horizon) / segments);
  }
  return starts;
}

SegmentedLossSpec build_adversarial_env(int num_arms, int num_users, Round horizon, int tran_num,
                                        std::uint64_t seed) {
  if (num_arms < 2) throw std::invalid_argument("build_adversarial_env: need N >= 2");
  if (num_users < 1) throw std::invalid_argument("build_adversarial_env: need M >= 1");
  if (tran_num < 1) throw std::invalid_argument("build_adversarial_env: need tran_num >= 1");
  if (horizon < tran_num) throw std::invalid_argument("build_adversarial_env: need T >= tran_num");

  SegmentedLossSpec spec;
  spec.num_arms = num_arms;
  spec.num_users = num_users;
  spec.horizon = horizon;
  spec.segment_starts = uniform_segment_starts(horizon, tran_num);
  spec.params.resize(static_cast<std::size_t>(tran_num) * num_arms);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mean_dist(kMeanLo, kMeanHi);
  std::uniform_real_distribution<double> std_dist(kStdLo, kStdHi);
  for (int s = 0; s < tran_num; ++s) {
    for (int i = 0; i < num_arms; ++i) {
      auto& p = spec.at(i, s);
      p.mean = mean_dist(rng);
      p.stddev = std_dist(rng);
    }
  }
  return spec;
}

double truncated_gaussian_mean(double mean, double stddev, double lo, double hi) {
  const double a = (lo - mean) / stddev;
  const double b = (hi - mean) / stddev;
  const double z = detail::normal_cdf(b) - detail::normal_cdf(a);
  if (!(z > 0.0)) {
    // All mass sits past one end at double precision.
    return mean < lo ? lo : hi;
  }
  return mean + stddev * (normal_pdf(a) - normal_pdf(b)) / z;
}

double expected_loss(const SegmentedLossSpec& spec, Round t, int arm) {
  if (t < 1 || t > spec.horizon || arm < 0 || arm >= spec.num_arms) {
    throw std::out_of_range("expected_loss: index out of range");
  }
  const auto& p = spec.params_at_round(arm, t);
  return truncated_gaussian_mean(p.mean, p.stddev, kLossLo, kLossHi);
}

// --- LossRealization --------------------------------------------------------

LossRealization::LossRealization(SegmentedLossSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)),
      seed_(seed),
      num_arms_(spec_.num_arms),
      num_users_(spec_.num_users),
      horizon_(spec_.horizon) {
  spec_.validate(/*strict_ranges=*/false);
}

LossRealization LossRealization::from_table(int num_arms, int num_users, Round horizon,
                                            std::vector<double> values) {
  if (num_arms < 1 || num_users < 1 || horizon < 1) {
    throw std::invalid_argument("loss table: dimensions must be positive");
  }
  if (values.size() != static_cast<std::size_t>(horizon) * num_arms * num_users) {
    throw std::invalid_argument("loss table: size must be T * N * M");
  }
  for (double v : values) {
    if (!(v >= kLossLo && v <= kLossHi)) throw std::invalid_argument("loss table: values must lie in [0, 1]");
  }
  LossRealization r;
  r.num_arms_ = num_arms;
  r.num_users_ = num_users;
  r.horizon_ = horizon;
  r.table_ = std::move(values);
  return r;
}

void LossRealization::check_indices(Round t, int arm, int user) const {
  if (t < 1 || t > horizon_ || arm < 0 || arm >= num_arms_ || user < 0 || user >= num_users_) {
    std::ostringstream msg;
    msg << "realize_loss: index out of range (t=" << t << ", arm=" << arm << ", user=" << user << ")";
    throw std::out_of_range(msg.str());
  }
}

double LossRealization::generate(Round t, int arm, int user) const {
  KeyedRng rng(hash_words({seed_, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(arm),
                           static_cast<std::uint64_t>(user)}));
  const auto& p = spec_.params_at_round(arm, t);
  return sample_truncated_gaussian(p.mean, p.stddev, kLossLo, kLossHi, rng);
}

double LossRealization::loss(Round t, int arm, int user) const {
  check_indices(t, arm, user);
  if (!table_.empty()) {
    return table_[(static_cast<std::size_t>(t - 1) * num_arms_ + arm) * num_users_ + user];
  }
  return generate(t, arm, user);
}

double LossRealization::group_loss(Round t, int arm) const {
  check_indices(t, arm, 0);
  double total = 0.0;
  for (int j = 0; j < num_users_; ++j) {
    total += table_.empty() ? generate(t, arm, j)
                            : table_[(static_cast<std::size_t>(t - 1) * num_arms_ + arm) * num_users_ + j];
  }
  return total;
}

LossRealization LossRealization::materialized() const {
  if (!table_.empty()) return *this;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(horizon_) * num_arms_ * num_users_);
  for (Round t = 1; t <= horizon_; ++t) {
    for (int i = 0; i < num_arms_; ++i) {
      for (int j = 0; j < num_users_; ++j) values.push_back(generate(t, i, j));
    }
  }
  LossRealization r = from_table(num_arms_, num_users_, horizon_, std::move(values));
  r.spec_ = spec_;
  r.seed_ = seed_;
  return r;
}

// --- Delays -----------------------------------------------------------------

std::string to_string(DelayKind kind) {
  switch (kind) {
    case DelayKind::kUniform: return "uniform";
    case DelayKind::kConstant: return "constant";
    case DelayKind::kGeometric: return "geometric";
    case DelayKind::kHorizon: return "horizon";
    case DelayKind::kCustom: return "custom";
  }
  return "unknown";
}

DelayKind delay_kind_from_string(const std::string& name) {
  for (auto kind : {DelayKind::kUniform, DelayKind::kConstant, DelayKind::kGeometric,
                    DelayKind::kHorizon, DelayKind::kCustom}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown delay kind '" + name + "'");
}

DelaySchedule::DelaySchedule(int num_users, Round horizon, int d_max, std::vector<int> table)
    : num_users_(num_users), horizon_(horizon), d_max_(d_max), table_(std::move(table)) {
  if (num_users < 1 || horizon < 1 || d_max < 1) {
    throw std::invalid_argument("delay schedule: dimensions and d_max must be positive");
  }
  if (table_.size() != static_cast<std::size_t>(horizon) * num_users) {
    throw std::invalid_argument("delay schedule: table size must be T * M");
  }
  for (int d : table_) {
    if (d < 1 || d > d_max) {
      std::ostringstream msg;
      msg << "delay schedule: delay " << d << " outside [1, " << d_max << "]";
      throw std::invalid_argument(msg.str());
    }
  }
}

double DelaySchedule::full_sum() const {
  double total = 0.0;
  for (int d : table_) total += d;
  return total;
}

double DelaySchedule::delivered_sum() const {
  double total = 0.0;
  for (Round t = 1; t <= horizon_; ++t) {
    for (int j = 0; j < num_users_; ++j) {
      const int d = delay(t, j);
      if (t + d <= horizon_) total += d;
    }
  }
  return total;
}

std::int64_t DelaySchedule::undelivered_count() const {
  std::int64_t n = 0;
  for (Round t = 1; t <= horizon_; ++t) {
    for (int j = 0; j < num_users_; ++j) n += (t + delay(t, j) > horizon_);
  }
  return n;
}

DelaySchedule build_delay_schedule(int num_users, Round horizon, int d_max, std::uint64_t seed) {
  if (d_max < 1) throw std::invalid_argument("build_delay_schedule: need d_max >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(1, d_max);
  std::vector<int> table(static_cast<std::size_t>(horizon) * num_users);
  for (int& d : table) d = dist(rng);
  return DelaySchedule(num_users, horizon, d_max, std::move(table));
}

DelaySchedule build_constant_delays(int num_users, Round horizon, int delay) {
  return DelaySchedule(num_users, horizon, delay,
                       std::vector<int>(static_cast<std::size_t>(horizon) * num_users, delay));
}

DelaySchedule build_geometric_delays(int num_users, Round horizon, int d_max, double p,
                                     std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric delays: need p in (0, 1]");
  std::mt19937_64 rng(seed);
  std::geometric_distribution<int> dist(p);
  std::vector<int> table(static_cast<std::size_t>(horizon) * num_users);
  for (int& d : table) {
    do {
      d = dist(rng) + 1;
    } while (d > d_max);
  }
  return DelaySchedule(num_users, horizon, d_max, std::move(table));
}

DelaySchedule build_horizon_delays(int num_users, Round horizon) {
  std::vector<int> table(static_cast<std::size_t>(horizon) * num_users);
  for (Round t = 1; t <= horizon; ++t) {
    for (int j = 0; j < num_users; ++j) {
      table[static_cast<std::size_t>(t - 1) * num_users + j] = static_cast<int>(horizon - t + 1);
    }
  }
  return DelaySchedule(num_users, horizon, static_cast<int>(horizon), std::move(table));
}

}  // namespace banditlab

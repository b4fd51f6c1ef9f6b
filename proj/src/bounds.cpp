#include "banditlab/bounds.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace banditlab {

namespace {

constexpr long double kE = std::numbers::e_v<long double>;

}  // namespace

void BoundInputs::validate() const {
  if (num_arms < 1 || num_users < 1 || horizon < 1 || !(eta_prime > 0.0)) {
    throw std::invalid_argument("bound inputs: N, M, T and eta' must be positive");
  }
  if (delivered_delay_sum < 0.0 || full_delay_sum < 0.0 || omega_count < 0) {
    throw std::invalid_argument("bound inputs: delay sums and |Omega| must be nonnegative");
  }
  if (delivered_delay_sum > full_delay_sum) {
    throw std::invalid_argument("bound inputs: delivered delay sum exceeds the full delay sum");
  }
  if (omega_count > static_cast<std::int64_t>(num_users) * horizon) {
    throw std::invalid_argument("bound inputs: |Omega| exceeds M T");
  }
}

double theorem1_bound(const BoundInputs& in) {
  in.validate();
  const long double eta = in.eta_prime;
  const long double n = in.num_arms;
  const long double m = in.num_users;
  const long double t = static_cast<long double>(in.horizon);
  long double total = std::log(n) / eta;
  total += 0.5L * eta * m * m * t * n * kE;
  total += 2.0L * eta * m * static_cast<long double>(in.delivered_delay_sum);
  total += static_cast<long double>(in.omega_count);
  return static_cast<double>(total);
}

double theorem2_bound(int num_arms, int num_users, Round horizon, double full_delay_sum) {
  if (num_arms < 1 || num_users < 1 || horizon < 1 || full_delay_sum < 0.0) {
    throw std::invalid_argument("theorem2_bound: invalid inputs");
  }
  const long double n = num_arms;
  const long double m = num_users;
  const long double log_n = std::log(n);
  const long double delay_term = (11.0L * std::sqrt(m * log_n) + 7.0L * std::sqrt(m)) *
                                 std::sqrt(static_cast<long double>(full_delay_sum));
  const long double horizon_term = 2.5L * m * n * kE * std::sqrt(static_cast<long double>(horizon) * log_n);
  return static_cast<double>(delay_term + horizon_term);
}

// --- epochs -----------------------------------------------------------------

EpochLog build_epoch_log(const std::vector<int>& epoch_of_round, const std::vector<std::int64_t>& v_t,
                         const DelaySchedule& delays) {
  const Round horizon = static_cast<Round>(epoch_of_round.size());
  if (v_t.size() != epoch_of_round.size()) throw std::invalid_argument("epoch log: column lengths differ");
  if (horizon < 1 || horizon > delays.horizon()) throw std::invalid_argument("epoch log: bad horizon");

  EpochLog log;
  log.num_users = delays.num_users();
  log.horizon = horizon;
  int prev = 1;
  for (Round t = 1; t <= horizon; ++t) {
    const int e = epoch_of_round[static_cast<std::size_t>(t - 1)];
    if (e < 1 || e < prev) throw std::invalid_argument("epoch log: epochs must start at 1 and never decrease");
    prev = e;
    while (log.final_epoch() < e) {
      EpochRecord rec;
      rec.epoch = log.final_epoch() + 1;
      log.epochs.push_back(rec);
    }
    auto& rec = log.epochs[static_cast<std::size_t>(e - 1)];
    if (rec.empty()) rec.first = t;
    rec.last = t;
    rec.sum_v += v_t[static_cast<std::size_t>(t - 1)];
  }

  for (Round t = 1; t <= horizon; ++t) {
    auto& rec = log.epochs[static_cast<std::size_t>(epoch_of_round[static_cast<std::size_t>(t - 1)] - 1)];
    for (int j = 0; j < delays.num_users(); ++j) {
      const int d = delays.delay(t, j);
      if (t + d <= rec.last) {
        rec.delivered_delay_sum += d;
      } else {
        ++rec.omega_count;
      }
    }
  }
  return log;
}

EpochLog build_epoch_log(const RunTrace& trace, const DelaySchedule& delays) {
  std::vector<int> epochs;
  std::vector<std::int64_t> v;
  epochs.reserve(trace.rounds.size());
  v.reserve(trace.rounds.size());
  for (const auto& row : trace.rounds) {
    epochs.push_back(row.epoch);
    v.push_back(row.v_t);
  }
  return build_epoch_log(epochs, v, delays);
}

std::vector<int> epochs_from_missing(const std::vector<std::int64_t>& v_t, int num_users) {
  std::vector<int> out;
  out.reserve(v_t.size());
  std::int64_t cum = 0;
  int e = 0;
  for (std::int64_t v : v_t) {
    cum += v;
    while (cum >= (std::int64_t{1} << e) * num_users) ++e;
    out.push_back(e);
  }
  return out;
}

// --- reports ----------------------------------------------------------------

std::string CheckReport::summary(std::size_t max_listed) const {
  std::ostringstream out;
  out << name << ": " << (passed() ? "pass" : "FAIL") << " (" << checked << " checked, " << violations.size()
      << " violations)";
  for (std::size_t k = 0; k < violations.size() && k < max_listed; ++k) {
    const auto& v = violations[k];
    out << "\n  [" << v.epoch;
    if (v.arm >= 0) out << ", arm " << v.arm;
    out << "] " << v.inequality << ": lhs=" << v.lhs << " rhs=" << v.rhs;
  }
  return out.str();
}

CheckReport check_lemma5(const EpochLog& log, int num_users) {
  CheckReport report{"lemma5", 0, {}};
  const double m = num_users;
  for (const auto& rec : log.epochs) {
    if (rec.empty()) continue;
    ++report.checked;
    const double sum_v = static_cast<double>(rec.sum_v);
    if (rec.delivered_delay_sum > sum_v) {
      report.violations.push_back({rec.epoch, -1, "delivered delays <= sum V", rec.delivered_delay_sum, sum_v});
    }
    const double cap = (std::ldexp(1.0, rec.epoch - 1) + 1.0 / rec.epoch) * m;
    if (sum_v > cap) {
      report.violations.push_back({rec.epoch, -1, "sum V <= (2^(e-1) + 1/e) M", sum_v, cap});
    }
  }
  return report;
}

CheckReport check_lemma6(const EpochLog& log, int num_users) {
  CheckReport report{"lemma6", 0, {}};
  for (const auto& rec : log.epochs) {
    if (rec.empty()) continue;
    ++report.checked;
    const double cap = std::pow(2.0, rec.epoch / 2.0) * 2.0 * num_users;
    if (static_cast<double>(rec.omega_count) > cap) {
      report.violations.push_back({rec.epoch, -1, "|Omega_e| <= 2^(e/2) 2M", static_cast<double>(rec.omega_count), cap});
    }
  }
  return report;
}

CheckReport check_lemma7(const EpochLog& log, double full_delay_sum, int num_users, Round horizon) {
  CheckReport report{"lemma7", 2, {}};
  const int final_epoch = log.final_epoch();
  const double lhs1 = std::ldexp(1.0, final_epoch - 1);
  const double rhs1 = full_delay_sum / num_users;
  if (lhs1 > rhs1) report.violations.push_back({final_epoch, -1, "2^(E-1) <= sum d / M", lhs1, rhs1});

  long double lhs2 = 0.0L;
  for (const auto& rec : log.epochs) {
    lhs2 += static_cast<long double>(rec.length()) * std::pow(2.0L, -rec.epoch / 2.0L);
  }
  const double rhs2 = 5.0 * std::sqrt(static_cast<double>(horizon));
  if (static_cast<double>(lhs2) > rhs2) {
    report.violations.push_back({0, -1, "sum |T_e| 2^(-e/2) <= 5 sqrt(T)", static_cast<double>(lhs2), rhs2});
  }
  return report;
}

namespace {

void require_trajectory(const RunTrace& trace) {
  if (!trace.has_trajectory()) throw std::invalid_argument("trajectory check: trace has no recorded distributions");
}

// Rounding allowance for comparisons whose exact slack is second order in η'ℓ.
double rounding_slack(double a, double b, double c) {
  return 8.0 * DBL_EPSILON * (std::abs(a) + std::abs(b) + std::abs(c));
}

double weighted_estimate(std::span<const double> p, std::span<const double> est) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += p[k] * est[k];
  return s;
}

}  // namespace

CheckReport check_probability_sandwich(const RunTrace& trace, double eta_prime) {
  require_trajectory(trace);
  CheckReport report{"probability sandwich", 0, {}};
  for (Round t = 1; t <= trace.horizon; ++t) {
    const auto p = trace.p_at(t);
    const auto next = trace.p_at(t + 1);
    const auto est = trace.estimates_at(t);
    const double mix = weighted_estimate(p, est);
    for (int i = 0; i < trace.num_arms; ++i) {
      ++report.checked;
      const double diff = next[i] - p[i];
      const double lower = -eta_prime * p[i] * est[i];
      const double upper = eta_prime * next[i] * mix;
      const double slack = rounding_slack(p[i], next[i], 0.0);
      if (diff < lower - slack) {
        report.violations.push_back({static_cast<int>(t), i, "lower: -eta' p_i l_i <= dp_i", lower, diff});
      }
      if (diff > upper + slack) {
        report.violations.push_back({static_cast<int>(t), i, "upper: dp_i <= eta' p_i(t+1) sum p l", diff, upper});
      }
    }
  }
  return report;
}

CheckReport check_probability_growth(const RunTrace& trace, double delta) {
  require_trajectory(trace);
  CheckReport report{"probability growth", 0, {}};
  const double factor = 1.0 + 1.0 / delta;
  for (Round t = 1; t <= trace.horizon; ++t) {
    const auto p = trace.p_at(t);
    const auto next = trace.p_at(t + 1);
    for (int i = 0; i < trace.num_arms; ++i) {
      ++report.checked;
      if (next[i] > factor * p[i]) {
        report.violations.push_back({static_cast<int>(t), i, "p_i(t+1) <= (1 + 1/delta) p_i(t)", next[i], factor * p[i]});
      }
    }
  }
  return report;
}

CheckReport check_probability_drift(const RunTrace& trace, double eta_prime) {
  require_trajectory(trace);
  CheckReport report{"probability drift", 0, {}};
  for (Round t = 1; t <= trace.horizon; ++t) {
    const auto p = trace.p_at(t);
    const auto next = trace.p_at(t + 1);
    const auto est = trace.estimates_at(t);
    double moved = 0.0;
    for (int i = 0; i < trace.num_arms; ++i) moved += std::abs(next[i] - p[i]);
    const double cap = 2.0 * eta_prime * weighted_estimate(p, est);
    ++report.checked;
    if (moved > cap + rounding_slack(1.0, 0.0, 0.0) * trace.num_arms) {
      report.violations.push_back({static_cast<int>(t), -1, "sum |dp| <= 2 eta' sum p l", moved, cap});
    }
  }
  return report;
}

BoundMargin empirical_vs_bound(double mean_regret, double bound_value) {
  return {bound_value - mean_regret, mean_regret <= bound_value};
}

}  // namespace banditlab

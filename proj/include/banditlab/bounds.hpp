#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "banditlab/environment.hpp"
#include "banditlab/simulator.hpp"

namespace banditlab {

struct BoundInputs {
  int num_arms = 0;
  int num_users = 0;
  Round horizon = 0;
  double eta_prime = 0.0;
  // sum over t <= T of sum over Φ_t of d_s^j
  double delivered_delay_sum = 0.0;
  std::int64_t omega_count = 0;
  // sum over all (t, j) of d_t^j
  double full_delay_sum = 0.0;

  void validate() const;
};

// ln N / η' + η' M² T N e / 2 + 2 η' M Σ_delivered d + |Ω|
double theorem1_bound(const BoundInputs& in);

// (11 sqrt(M ln N) + 7 sqrt(M)) sqrt(Σ d) + (5/2) M N e sqrt(T ln N)
double theorem2_bound(int num_arms, int num_users, Round horizon, double full_delay_sum);

// One epoch of the doubling schedule. Events are attributed to the epoch
// their origin round belongs to: delivered_delay_sum covers those delivered
// by the epoch's last round, omega_count those still missing then.
struct EpochRecord {
  int epoch = 0;
  Round first = 0;
  Round last = -1;
  std::int64_t sum_v = 0;
  double delivered_delay_sum = 0.0;
  std::int64_t omega_count = 0;

  bool empty() const { return last < first; }
  Round length() const { return empty() ? 0 : last - first + 1; }
};

struct EpochLog {
  int num_users = 0;
  Round horizon = 0;
  // epochs[k] describes epoch k + 1; skipped epochs appear as empty records.
  std::vector<EpochRecord> epochs;

  int final_epoch() const { return static_cast<int>(epochs.size()); }
};

// epoch_of_round[t - 1] >= 1 and nondecreasing; v_t[t - 1] is V_t.
EpochLog build_epoch_log(const std::vector<int>& epoch_of_round, const std::vector<std::int64_t>& v_t,
                         const DelaySchedule& delays);
// Epoch membership read from the policy's per-round epoch column.
EpochLog build_epoch_log(const RunTrace& trace, const DelaySchedule& delays);

// Epoch membership recomputed from the missing counts alone:
// round t is in epoch e when 2^(e-1) M <= sum_{τ<=t} V_τ < 2^e M.
std::vector<int> epochs_from_missing(const std::vector<std::int64_t>& v_t, int num_users);

struct CheckViolation {
  int epoch = 0;  // epoch, or round for trajectory checks; 0 when global
  int arm = -1;
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct CheckReport {
  std::string name;
  std::size_t checked = 0;
  std::vector<CheckViolation> violations;

  bool passed() const { return violations.empty(); }
  std::string summary(std::size_t max_listed = 5) const;
};

// Per nonempty epoch: delivered-within-epoch delay sum <= Σ V_t <= (2^(e-1) + 1/e) M.
CheckReport check_lemma5(const EpochLog& log, int num_users);
// Per nonempty epoch: |Ω_e| <= 2^(e/2) * 2M.
CheckReport check_lemma6(const EpochLog& log, int num_users);
// 2^(E-1) <= Σ d / M and Σ_e |T_e| 2^(-e/2) <= 5 sqrt(T).
CheckReport check_lemma7(const EpochLog& log, double full_delay_sum, int num_users, Round horizon);

// Trajectory checks on a recorded exponential-weights run.
// -η' p_i(t) ℓ_i(t) <= p_i(t+1) - p_i(t) <= η' p_i(t+1) Σ_k p_k(t) ℓ_k(t)
CheckReport check_probability_sandwich(const RunTrace& trace, double eta_prime);
// p_i(t+1) <= (1 + 1/Δ) p_i(t), compared exactly.
CheckReport check_probability_growth(const RunTrace& trace, double delta);
// Σ_i |p_i(t+1) - p_i(t)| <= 2 η' Σ_k p_k(t) ℓ_k(t)
CheckReport check_probability_drift(const RunTrace& trace, double eta_prime);

struct BoundMargin {
  double margin = 0.0;  // bound - mean regret
  bool passed = false;  // mean regret <= bound
};

BoundMargin empirical_vs_bound(double mean_regret, double bound_value);

}  // namespace banditlab

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "banditlab/bounds.hpp"
#include "banditlab/config.hpp"
#include "banditlab/plot.hpp"
#include "banditlab/simulator.hpp"

namespace banditlab {

inline const char* const kTraceColumns =
    "policy,replication,round,arm,delivered_count,v_t,epoch,eta,round_loss,cum_loss,cum_regret_hindsight,"
    "cum_regret_expected";
inline const char* const kSummaryColumns =
    "policy,env_id,T,d_max,tran_num,R,mean_final_loss,std_final_loss,mean_final_regret,theorem_bound,bound_margin";

// Everything a replication's episodes share: the environment draw, its
// realized losses, the delay table, and the regret reference. Built only from
// (config, replication), never from the policy.
struct ReplicationContext {
  int replication = 1;  // 1-based
  SegmentedLossSpec spec;
  std::shared_ptr<const LossRealization> losses;
  DelaySchedule delays;
  RegretReference reference;

  // Digest of the environment stream every policy consumes.
  std::uint64_t fingerprint() const;
};

ReplicationContext make_replication(const ExperimentConfig& config, int replication);

// The learning rate handed to mud before truncation.
double input_eta(const ExperimentConfig& config, const PolicySpec& spec, const ReplicationContext& ctx);

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config, const PolicySpec& spec,
                                    const ReplicationContext& ctx);

std::uint64_t policy_seed(const ExperimentConfig& config, int replication, const PolicySpec& spec);

// Regret bound matching the policy (theorem1_bound for mud, theorem2_bound for amud),
// NaN for the baselines.
double policy_bound(const ExperimentConfig& config, const Policy& policy, const RunTrace& trace,
                    const ReplicationContext& ctx);

struct SummaryRow {
  std::string policy;
  std::string env_id;
  Round horizon = 0;
  int d_max = 0;
  int tran_num = 0;
  int replications = 0;
  double mean_final_loss = 0.0;
  double std_final_loss = 0.0;
  double mean_final_regret = kNaN;  // hindsight when computed, else expected
  double mean_final_regret_hindsight = kNaN;
  double mean_final_regret_expected = kNaN;
  double theorem_bound = kNaN;
  double bound_margin = kNaN;
  double wall_seconds = 0.0;
  std::string config_hash;
};

struct PolicyOutcome {
  std::string label;
  std::vector<Round> rounds;  // sampled rounds (trace_stride grid plus T)
  BandSeries loss;
  BandSeries regret_hindsight;
  BandSeries regret_expected;
  std::vector<double> final_loss;  // per replication
  std::vector<double> final_regret_hindsight;
  std::vector<double> final_regret_expected;
  std::vector<double> bounds;
  std::vector<std::uint64_t> env_fingerprints;
  SummaryRow summary;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<PolicyOutcome> policies;  // config order
  std::string trace_csv;
  std::string summary_csv;
  std::vector<std::string> plots;
  std::vector<std::string> check_failures;  // filled in check mode
};

struct RunOptions {
  bool write_trace = true;
  bool write_plots = true;
  // Runs the lemma and bound checkers on every mud/amud episode.
  bool check = false;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string format_summary_csv(const std::vector<SummaryRow>& rows);

// Long-format trace reader, keyed by policy then replication.
struct TraceTable {
  std::map<std::string, std::map<int, std::vector<std::pair<Round, RoundRecord>>>> series;
};
TraceTable read_trace_csv(const std::string& path);

// Reads trace CSVs, aggregates per policy, writes an SVG of the metric.
void emit_plot(const std::vector<std::string>& trace_csvs, TraceMetric metric, const std::string& out_path,
               const std::string& title = "");

TraceMetric metric_from_string(const std::string& name);
std::string to_string(TraceMetric metric);

struct SuiteOptions {
  std::string output_dir = "suite_out";
  Round horizon = 30000;
  int replications = 20;
  std::uint64_t master_seed = 2024;
  int threads = 0;
  bool quiet = false;
};

struct SuiteResult {
  std::vector<std::string> plots;
  std::string summary_csv;
  std::vector<SummaryRow> rows;
};

// Canned grid: stochastic reference, adversarial default over d_max,
// tran_num sweeps, high-churn environments, and an N/M sweep.
SuiteResult reproduce_paper_suite(const SuiteOptions& options);

}  // namespace banditlab

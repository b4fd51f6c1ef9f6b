#include "banditlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;

namespace banditlab {

namespace {

constexpr std::uint64_t kMaterializeCells = 16'000'000;

std::uint64_t label_key(const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fmt(std::int64_t x) { return std::to_string(x); }

double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("trace csv: bad number '" + s + "'");
  }
  return v;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  long double s = 0.0L;
  for (double x : v) s += static_cast<long double>(x - m) * (x - m);
  return static_cast<double>(std::sqrt(s / static_cast<long double>(v.size() - 1)));
}

std::vector<Round> sample_grid(Round horizon, int stride) {
  std::vector<Round> grid;
  for (Round t = 1; t <= horizon; t += stride) grid.push_back(t);
  if (grid.back() != horizon) grid.push_back(horizon);
  return grid;
}

BandSeries band_of(const std::vector<std::vector<double>>& series) {
  if (series.size() >= 2) return aggregate_series(series);
  BandSeries band;
  band.mean = series.at(0);
  band.stddev.assign(band.mean.size(), 0.0);
  band.lower = band.mean;
  band.upper = band.mean;
  return band;
}

int worker_count(int requested, int tasks) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, std::max(tasks, 1));
}

// Runs fn(0..count-1) on a small pool; the first exception is rethrown.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  const int workers = worker_count(threads, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct EpisodeResult {
  std::vector<RoundRecord> sampled;
  double final_loss = 0.0;
  double final_regret_hindsight = kNaN;
  double final_regret_expected = kNaN;
  double bound = kNaN;
  std::uint64_t fingerprint = 0;
  std::vector<std::string> failures;
};

void run_checks(const ExperimentConfig& config, const Policy& policy, const RunTrace& trace,
                const ReplicationContext& ctx, std::vector<std::string>& failures) {
  auto note = [&](const CheckReport& report) {
    if (!report.passed()) {
      failures.push_back(policy.name() + " r" + std::to_string(ctx.replication) + ": " + report.summary());
    }
  };
  if (const auto* mud = dynamic_cast<const MudExp3*>(&policy)) {
    note(check_probability_sandwich(trace, mud->learning_rate()));
    note(check_probability_drift(trace, mud->learning_rate()));
    if (ctx.delays.d_max() <= mud->delta()) note(check_probability_growth(trace, mud->delta()));
  } else if (dynamic_cast<const AmudExp3*>(&policy) != nullptr) {
    for (Round t = 1; t <= trace.horizon; ++t) {
      const auto& row = trace.rounds[static_cast<std::size_t>(t - 1)];
      if (row.policy_missing != row.v_t) {
        failures.push_back("amud r" + std::to_string(ctx.replication) + ": missing count " +
                           std::to_string(row.policy_missing) + " != V_t " + std::to_string(row.v_t) +
                           " at round " + std::to_string(t));
        break;
      }
    }
    const EpochLog log = build_epoch_log(trace, ctx.delays);
    note(check_lemma5(log, config.num_users));
    note(check_lemma6(log, config.num_users));
    note(check_lemma7(log, ctx.delays.full_sum(), config.num_users, config.horizon));
  }
}

EpisodeResult run_one(const ExperimentConfig& config, const PolicySpec& spec, const ReplicationContext& ctx,
                      const std::vector<Round>& grid, const RunOptions& options) {
  auto policy = make_policy(config, spec, ctx);
  EpisodeOptions episode;
  episode.record_trajectory = options.check && dynamic_cast<MudExp3*>(policy.get()) != nullptr;
  RunTrace trace = run_episode(*policy, *ctx.losses, ctx.delays, config.horizon,
                               policy_seed(config, ctx.replication, spec), episode);
  attach_regret_curves(trace, ctx.reference);

  EpisodeResult out;
  out.sampled.reserve(grid.size());
  for (Round t : grid) out.sampled.push_back(trace.rounds[static_cast<std::size_t>(t - 1)]);
  const auto& last = trace.rounds.back();
  out.final_loss = last.cum_loss;
  out.final_regret_hindsight = last.cum_regret_hindsight;
  out.final_regret_expected = last.cum_regret_expected;
  out.bound = policy_bound(config, *policy, trace, ctx);
  out.fingerprint = ctx.fingerprint();
  if (options.check) run_checks(config, *policy, trace, ctx, out.failures);
  return out;
}

std::string format_trace_rows(const std::string& label, int replication, const std::vector<Round>& grid,
                              const std::vector<RoundRecord>& rows) {
  std::string out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& r = rows[k];
    out += label;
    out += ',' + std::to_string(replication);
    out += ',' + fmt(grid[k]);
    out += ',' + std::to_string(r.arm + 1);
    out += ',' + std::to_string(r.delivered);
    out += ',' + fmt(r.v_t);
    out += ',' + std::to_string(r.epoch);
    out += ',' + fmt(r.eta);
    out += ',' + fmt(r.round_loss);
    out += ',' + fmt(r.cum_loss);
    out += ',' + fmt(r.cum_regret_hindsight);
    out += ',' + fmt(r.cum_regret_expected);
    out += '\n';
  }
  return out;
}

void remove_quietly(const std::vector<std::string>& paths) {
  for (const auto& p : paths) {
    std::error_code ec;
    fs::remove(p, ec);
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string metric_axis_label(TraceMetric metric) {
  switch (metric) {
    case TraceMetric::kCumLoss:
      return "cumulative loss";
    case TraceMetric::kCumRegretHindsight:
      return "cumulative regret (best fixed arm)";
    case TraceMetric::kCumRegretExpected:
      return "cumulative regret (oracle arm)";
  }
  return "";
}

double metric_value(const RoundRecord& r, TraceMetric metric) {
  switch (metric) {
    case TraceMetric::kCumLoss:
      return r.cum_loss;
    case TraceMetric::kCumRegretHindsight:
      return r.cum_regret_hindsight;
    case TraceMetric::kCumRegretExpected:
      return r.cum_regret_expected;
  }
  return kNaN;
}

}  // namespace

// --- replications ---------------------------------------------------------------

std::uint64_t ReplicationContext::fingerprint() const {
  std::uint64_t h = hash_words({losses->seed(), static_cast<std::uint64_t>(losses->horizon()),
                                static_cast<std::uint64_t>(losses->num_arms()),
                                static_cast<std::uint64_t>(losses->num_users())});
  for (const auto& p : spec.params) {
    h = hash_words({h, std::bit_cast<std::uint64_t>(p.mean), std::bit_cast<std::uint64_t>(p.stddev)});
  }
  for (Round s : spec.segment_starts) h = hash_words({h, static_cast<std::uint64_t>(s)});
  for (int d : delays.table()) h = mix64(h ^ static_cast<std::uint64_t>(d));
  // A slice of realized values, so a different loss stream is caught too.
  const Round probe = std::min<Round>(losses->horizon(), 16);
  for (Round t = 1; t <= probe; ++t) {
    for (int i = 0; i < losses->num_arms(); ++i) {
      h = hash_words({h, std::bit_cast<std::uint64_t>(losses->loss(t, i, 0))});
    }
  }
  return h;
}

ReplicationContext make_replication(const ExperimentConfig& config, int replication) {
  const auto r = static_cast<std::uint64_t>(replication);
  ReplicationContext ctx;
  ctx.replication = replication;
  ctx.spec = build_adversarial_env(config.num_arms, config.num_users, config.horizon, config.tran_num,
                                   derive_seed(config.master_seed, StreamPurpose::kEnvironment, r));
  LossRealization lazy(ctx.spec, derive_seed(config.master_seed, StreamPurpose::kLosses, r));
  // The hindsight reference touches every cell anyway; keeping the table lets
  // the episodes read instead of regenerate.
  const auto cells = static_cast<std::uint64_t>(config.horizon) * config.num_arms * config.num_users;
  if (config.hindsight && cells <= kMaterializeCells) {
    ctx.losses = std::make_shared<const LossRealization>(lazy.materialized());
  } else {
    ctx.losses = std::make_shared<const LossRealization>(std::move(lazy));
  }

  const std::uint64_t delay_seed = derive_seed(config.master_seed, StreamPurpose::kDelays, r);
  switch (config.delay_kind) {
    case DelayKind::kUniform:
      ctx.delays = build_delay_schedule(config.num_users, config.horizon, config.d_max, delay_seed);
      break;
    case DelayKind::kConstant:
      ctx.delays = build_constant_delays(config.num_users, config.horizon, config.d_max);
      break;
    case DelayKind::kGeometric:
      ctx.delays = build_geometric_delays(config.num_users, config.horizon, config.d_max, config.geometric_p,
                                          delay_seed);
      break;
    case DelayKind::kHorizon:
      ctx.delays = build_horizon_delays(config.num_users, config.horizon);
      break;
    case DelayKind::kCustom:
      ctx.delays = load_delay_table(config.delay_file, config.num_users, config.horizon, config.d_max);
      break;
  }
  ctx.reference = RegretReference::build(*ctx.losses, config.hindsight);
  return ctx;
}

double input_eta(const ExperimentConfig& config, const PolicySpec& spec, const ReplicationContext& ctx) {
  if (spec.eta) return *spec.eta;
  switch (config.eta_mode) {
    case EtaMode::kFixed:
      return config.eta_value;
    case EtaMode::kRecommendedPessimistic:
      return recommended_eta(config.num_arms, config.num_users, config.horizon,
                             static_cast<double>(config.horizon) * config.num_users * (config.d_max + 1) / 2.0);
    case EtaMode::kRecommendedExact:
      break;
  }
  return recommended_eta(config.num_arms, config.num_users, config.horizon, ctx.delays.delivered_sum());
}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config, const PolicySpec& spec,
                                    const ReplicationContext& ctx) {
  const int n = config.num_arms;
  if (spec.name == "mud") {
    const double delta = spec.delta ? *spec.delta : config.resolved_delta();
    return std::make_unique<MudExp3>(n, config.num_users, input_eta(config, spec, ctx), delta);
  }
  if (spec.name == "amud") return std::make_unique<AmudExp3>(n, config.num_users);
  if (spec.name == "ducb") return std::make_unique<DelayedUcb>(n);
  if (spec.name == "se") return std::make_unique<SuccessiveElimination>(n);
  if (spec.name == "oracle") {
    const int arm = ctx.reference.has_expected() ? ctx.reference.oracle_arm : 0;
    return std::make_unique<FixedArmPolicy>(n, arm, "oracle");
  }
  if (spec.name == "random") return std::make_unique<UniformRandomPolicy>(n);
  throw ConfigError(ConfigErrorKind::kUnknownPolicy, "unknown policy '" + spec.name + "'");
}

std::uint64_t policy_seed(const ExperimentConfig& config, int replication, const PolicySpec& spec) {
  return derive_seed(config.master_seed, StreamPurpose::kPolicy, static_cast<std::uint64_t>(replication),
                     label_key(spec.display()));
}

double policy_bound(const ExperimentConfig& config, const Policy& policy, const RunTrace& trace,
                    const ReplicationContext& ctx) {
  if (const auto* mud = dynamic_cast<const MudExp3*>(&policy)) {
    BoundInputs in;
    in.num_arms = config.num_arms;
    in.num_users = config.num_users;
    in.horizon = config.horizon;
    in.eta_prime = mud->learning_rate();
    in.delivered_delay_sum = trace.delivered_delay_sum;
    in.omega_count = trace.omega_count;
    in.full_delay_sum = trace.full_delay_sum;
    return theorem1_bound(in);
  }
  if (dynamic_cast<const AmudExp3*>(&policy) != nullptr) {
    return theorem2_bound(config.num_arms, config.num_users, config.horizon, ctx.delays.full_sum());
  }
  return kNaN;
}

// --- experiment ------------------------------------------------------------------

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = std::string(kSummaryColumns) + "\n";
  for (const auto& r : rows) {
    out += r.policy + ',' + r.env_id + ',' + fmt(r.horizon) + ',' + std::to_string(r.d_max) + ',' +
           std::to_string(r.tran_num) + ',' + std::to_string(r.replications) + ',' + fmt(r.mean_final_loss) + ',' +
           fmt(r.std_final_loss) + ',' + fmt(r.mean_final_regret) + ',' + fmt(r.theorem_bound) + ',' +
           fmt(r.bound_margin) + '\n';
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  ExperimentResult result;
  result.config = config;
  const int num_policies = static_cast<int>(config.policies.size());
  const int reps = config.replications;
  const std::vector<Round> grid = sample_grid(config.horizon, config.trace_stride);

  // episodes[p * reps + (r - 1)]
  std::vector<EpisodeResult> episodes(static_cast<std::size_t>(num_policies) * reps);
  parallel_for(reps, config.threads, [&](int r0) {
    const ReplicationContext ctx = make_replication(config, r0 + 1);
    for (int p = 0; p < num_policies; ++p) {
      episodes[static_cast<std::size_t>(p) * reps + r0] = run_one(config, config.policies[p], ctx, grid, options);
    }
  });
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::vector<SummaryRow> rows;
  for (int p = 0; p < num_policies; ++p) {
    PolicyOutcome outcome;
    outcome.label = config.policies[p].display();
    outcome.rounds = grid;
    std::vector<std::vector<double>> loss, hind, expd;
    for (int r0 = 0; r0 < reps; ++r0) {
      auto& ep = episodes[static_cast<std::size_t>(p) * reps + r0];
      std::vector<double> l, h, e;
      for (const auto& row : ep.sampled) {
        l.push_back(row.cum_loss);
        h.push_back(row.cum_regret_hindsight);
        e.push_back(row.cum_regret_expected);
      }
      loss.push_back(std::move(l));
      hind.push_back(std::move(h));
      expd.push_back(std::move(e));
      outcome.final_loss.push_back(ep.final_loss);
      outcome.final_regret_hindsight.push_back(ep.final_regret_hindsight);
      outcome.final_regret_expected.push_back(ep.final_regret_expected);
      outcome.bounds.push_back(ep.bound);
      outcome.env_fingerprints.push_back(ep.fingerprint);
      for (auto& f : ep.failures) result.check_failures.push_back(std::move(f));
    }
    outcome.loss = band_of(loss);
    outcome.regret_hindsight = band_of(hind);
    outcome.regret_expected = band_of(expd);

    SummaryRow& s = outcome.summary;
    s.policy = outcome.label;
    s.env_id = config.resolved_env_id();
    s.horizon = config.horizon;
    s.d_max = config.d_max;
    s.tran_num = config.tran_num;
    s.replications = reps;
    s.mean_final_loss = mean_of(outcome.final_loss);
    s.std_final_loss = sample_std(outcome.final_loss);
    s.mean_final_regret_hindsight = mean_of(outcome.final_regret_hindsight);
    s.mean_final_regret_expected = mean_of(outcome.final_regret_expected);
    s.mean_final_regret = config.hindsight ? s.mean_final_regret_hindsight : s.mean_final_regret_expected;
    s.theorem_bound = mean_of(outcome.bounds);
    if (!std::isnan(s.theorem_bound) && !std::isnan(s.mean_final_regret)) {
      s.bound_margin = empirical_vs_bound(s.mean_final_regret, s.theorem_bound).margin;
    }
    s.wall_seconds = seconds;
    s.config_hash = config.hash();
    rows.push_back(s);
    result.policies.push_back(std::move(outcome));
  }

  if (options.check) {
    for (const auto& row : rows) {
      if (!std::isnan(row.bound_margin) && row.bound_margin < 0.0) {
        result.check_failures.push_back(row.policy + ": mean regret " + fmt(row.mean_final_regret) +
                                        " exceeds bound " + fmt(row.theorem_bound));
      }
    }
  }

  std::vector<std::string> written;
  try {
    fs::create_directories(config.output_dir);
    const fs::path dir(config.output_dir);
    if (options.write_trace) {
      result.trace_csv = (dir / "trace.csv").string();
      std::ofstream out(result.trace_csv, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + result.trace_csv);
      written.push_back(result.trace_csv);
      out << kTraceColumns << '\n';
      for (int p = 0; p < num_policies; ++p) {
        for (int r0 = 0; r0 < reps; ++r0) {
          out << format_trace_rows(result.policies[p].label, r0 + 1, grid,
                                   episodes[static_cast<std::size_t>(p) * reps + r0].sampled);
        }
      }
      if (!out.flush()) throw std::runtime_error("write failed: " + result.trace_csv);
    }
    result.summary_csv = (dir / "summary.csv").string();
    written.push_back(result.summary_csv);
    write_text_file(result.summary_csv, format_summary_csv(rows));

    if (options.write_plots) {
      std::vector<double> x(grid.begin(), grid.end());
      auto curves_of = [&](auto member) {
        std::vector<BandCurve> curves;
        for (const auto& o : result.policies) curves.push_back({o.label, x, o.*member});
        return curves;
      };
      PlotOptions po;
      po.title = "cumulative loss, " + config.resolved_env_id();
      po.y_label = metric_axis_label(TraceMetric::kCumLoss);
      const std::string loss_svg = (dir / "loss.svg").string();
      written.push_back(loss_svg);
      write_text_file(loss_svg, render_band_plot(curves_of(&PolicyOutcome::loss), po));
      result.plots.push_back(loss_svg);

      const bool use_hindsight = config.hindsight && config.tran_num > 1;
      po.title = "cumulative regret, " + config.resolved_env_id();
      po.y_label = metric_axis_label(use_hindsight ? TraceMetric::kCumRegretHindsight
                                                   : TraceMetric::kCumRegretExpected);
      const std::string regret_svg = (dir / "regret.svg").string();
      written.push_back(regret_svg);
      write_text_file(regret_svg,
                      render_band_plot(curves_of(use_hindsight ? &PolicyOutcome::regret_hindsight
                                                               : &PolicyOutcome::regret_expected),
                                       po));
      result.plots.push_back(regret_svg);
    }
  } catch (...) {
    remove_quietly(written);
    throw;
  }
  return result;
}

// --- reading traces and plotting ---------------------------------------------------

TraceTable read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace csv " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTraceColumns) {
    throw std::runtime_error("trace csv " + path + ": unexpected header");
  }
  TraceTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 12) {
      throw std::runtime_error("trace csv " + path + ": line " + std::to_string(line_no) + " has " +
                               std::to_string(c.size()) + " fields");
    }
    RoundRecord r;
    const int rep = std::stoi(c[1]);
    const Round t = std::stoll(c[2]);
    r.arm = std::stoi(c[3]) - 1;
    r.delivered = std::stoi(c[4]);
    r.v_t = std::stoll(c[5]);
    r.epoch = std::stoi(c[6]);
    r.eta = parse_double(c[7]);
    r.round_loss = parse_double(c[8]);
    r.cum_loss = parse_double(c[9]);
    r.cum_regret_hindsight = parse_double(c[10]);
    r.cum_regret_expected = parse_double(c[11]);
    table.series[c[0]][rep].emplace_back(t, r);
  }
  return table;
}

TraceMetric metric_from_string(const std::string& name) {
  if (name == "cum_loss" || name == "loss") return TraceMetric::kCumLoss;
  if (name == "cum_regret_hindsight" || name == "regret") return TraceMetric::kCumRegretHindsight;
  if (name == "cum_regret_expected") return TraceMetric::kCumRegretExpected;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

std::string to_string(TraceMetric metric) {
  switch (metric) {
    case TraceMetric::kCumLoss:
      return "cum_loss";
    case TraceMetric::kCumRegretHindsight:
      return "cum_regret_hindsight";
    case TraceMetric::kCumRegretExpected:
      return "cum_regret_expected";
  }
  return "";
}

void emit_plot(const std::vector<std::string>& trace_csvs, TraceMetric metric, const std::string& out_path,
               const std::string& title) {
  if (trace_csvs.empty()) throw std::invalid_argument("emit_plot: no trace files given");
  std::vector<BandCurve> curves;
  for (const auto& path : trace_csvs) {
    const TraceTable table = read_trace_csv(path);
    for (const auto& [policy, reps] : table.series) {
      std::vector<std::vector<double>> series;
      std::vector<double> x;
      for (const auto& [rep, rows] : reps) {
        std::vector<double> values;
        std::vector<double> rounds;
        for (const auto& [t, r] : rows) {
          rounds.push_back(static_cast<double>(t));
          values.push_back(metric_value(r, metric));
        }
        if (x.empty()) {
          x = rounds;
        } else if (rounds != x) {
          throw std::runtime_error("emit_plot: replications of '" + policy + "' use different round grids");
        }
        series.push_back(std::move(values));
      }
      std::string label = policy;
      if (trace_csvs.size() > 1) label = fs::path(path).parent_path().filename().string() + "/" + policy;
      curves.push_back({label, x, band_of(series)});
    }
  }
  if (curves.empty()) throw std::invalid_argument("emit_plot: trace files hold no rows");
  PlotOptions po;
  po.title = title.empty() ? to_string(metric) : title;
  po.y_label = metric_axis_label(metric);
  write_text_file(out_path, render_band_plot(curves, po));
}

// --- canned suite -------------------------------------------------------------------

namespace {

std::vector<PolicySpec> policy_list(std::initializer_list<const char*> names) {
  std::vector<PolicySpec> out;
  for (const char* n : names) out.push_back({n, std::nullopt, std::nullopt, ""});
  return out;
}

}  // namespace

SuiteResult reproduce_paper_suite(const SuiteOptions& options) {
  SuiteResult suite;
  const fs::path root(options.output_dir);
  fs::create_directories(root);

  auto base = [&](const std::string& name) {
    ExperimentConfig c;
    c.master_seed = options.master_seed;
    c.horizon = options.horizon;
    c.replications = options.replications;
    c.threads = options.threads;
    c.trace_stride = std::max<int>(1, static_cast<int>(options.horizon / 300));
    c.output_dir = (root / name).string();
    c.env_id = name;
    return c;
  };
  auto log = [&](const std::string& name, const ExperimentResult& r) {
    if (options.quiet) return;
    std::cerr << "suite: " << name << " done";
    if (!r.policies.empty()) std::cerr << " (" << fmt(r.policies.front().summary.wall_seconds) << " s)";
    std::cerr << '\n';
  };
  auto run = [&](const ExperimentConfig& c, bool traces) {
    RunOptions ro;
    ro.write_trace = traces;
    ro.write_plots = false;
    ExperimentResult r = run_experiment(c, ro);
    for (const auto& o : r.policies) suite.rows.push_back(o.summary);
    log(c.env_id, r);
    return r;
  };
  auto band_figure = [&](const std::string& file, const std::string& title, const ExperimentResult& r,
                         TraceMetric metric) {
    std::vector<BandCurve> curves;
    std::vector<double> x;
    for (const auto& o : r.policies) {
      x.assign(o.rounds.begin(), o.rounds.end());
      const BandSeries& band = metric == TraceMetric::kCumLoss              ? o.loss
                               : metric == TraceMetric::kCumRegretHindsight ? o.regret_hindsight
                                                                            : o.regret_expected;
      curves.push_back({o.label, x, band});
    }
    PlotOptions po;
    po.title = title;
    po.y_label = metric_axis_label(metric);
    const std::string path = (root / file).string();
    write_text_file(path, render_band_plot(curves, po));
    suite.plots.push_back(path);
  };

  const int delays[] = {10, 100, 1000};

  for (int d : delays) {
    ExperimentConfig c = base("stochastic_d" + std::to_string(d));
    c.tran_num = 1;
    c.d_max = d;
    band_figure("fig2_stochastic_regret_d" + std::to_string(d) + ".svg",
                "stochastic environment, d_max = " + std::to_string(d), run(c, true),
                TraceMetric::kCumRegretExpected);
  }

  for (int d : delays) {
    ExperimentConfig c = base("adversarial_d" + std::to_string(d));
    c.d_max = d;
    band_figure("fig3_adversarial_loss_d" + std::to_string(d) + ".svg",
                "adversarial environment, tran_num = 3, d_max = " + std::to_string(d), run(c, true),
                TraceMetric::kCumLoss);
  }

  int fig = 4;
  for (int d : delays) {
    std::vector<std::string> categories;
    std::vector<BarSeries> bars;
    for (const auto& p : policy_list({"mud", "amud", "ducb"})) bars.push_back({p.name, {}, {}});
    for (int tran = 2; tran <= 10; ++tran) {
      ExperimentConfig c = base("tran" + std::to_string(tran) + "_d" + std::to_string(d));
      c.tran_num = tran;
      c.d_max = d;
      c.hindsight = false;
      c.policies = policy_list({"mud", "amud", "ducb"});
      const ExperimentResult r = run(c, false);
      categories.push_back(std::to_string(tran));
      for (std::size_t k = 0; k < r.policies.size(); ++k) {
        bars[k].mean.push_back(r.policies[k].summary.mean_final_loss);
        bars[k].stddev.push_back(r.policies[k].summary.std_final_loss);
      }
    }
    PlotOptions po;
    po.title = "final cumulative loss vs tran_num, d_max = " + std::to_string(d);
    po.x_label = "tran_num";
    po.y_label = "final cumulative loss";
    const std::string path = (root / ("fig" + std::to_string(fig++) + "_tran_sweep_d" + std::to_string(d) + ".svg"))
                                 .string();
    write_text_file(path, render_bar_chart(categories, bars, po));
    suite.plots.push_back(path);
  }

  for (int tran : {50, 100}) {
    for (int d : {10, 100}) {
      const std::string name = "tran" + std::to_string(tran) + "_d" + std::to_string(d);
      ExperimentConfig c = base(name);
      c.tran_num = tran;
      c.d_max = d;
      c.policies = policy_list({"mud", "amud", "ducb", "se"});
      band_figure("fig" + std::string(tran == 50 ? "7" : "8") + "_" + name + "_loss.svg",
                  "tran_num = " + std::to_string(tran) + ", d_max = " + std::to_string(d), run(c, true),
                  TraceMetric::kCumLoss);
    }
  }

  for (const auto& [n, m] : std::vector<std::pair<int, int>>{{10, 100}, {100, 10}, {100, 100}}) {
    const std::string name = "N" + std::to_string(n) + "_M" + std::to_string(m);
    ExperimentConfig c = base(name);
    c.num_arms = n;
    c.num_users = m;
    c.hindsight = false;
    c.policies = policy_list({"mud", "amud", "ducb", "se"});
    band_figure("fig9_" + name + "_loss.svg", "N = " + std::to_string(n) + ", M = " + std::to_string(m),
                run(c, true), TraceMetric::kCumLoss);
  }

  suite.summary_csv = (root / "suite_summary.csv").string();
  write_text_file(suite.summary_csv, format_summary_csv(suite.rows));
  return suite;
}

}  // namespace banditlab

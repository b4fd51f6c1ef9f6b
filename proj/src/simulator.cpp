#include "banditlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace banditlab {

FeedbackQueue::FeedbackQueue(Round horizon, int max_delay)
    : horizon_(horizon), max_delay_(max_delay), ring_(static_cast<std::size_t>(max_delay) + 1) {
  if (horizon < 1 || max_delay < 1) throw std::invalid_argument("feedback queue: horizon and delay bound must be positive");
}

void FeedbackQueue::push(const DeliveredEvent& event) {
  if (event.delay < 1 || event.delay > max_delay_) {
    throw std::invalid_argument("feedback queue: delay outside [1, max_delay]");
  }
  if (event.origin_round <= last_popped_) {
    throw std::logic_error("feedback queue: event originates in an already delivered round");
  }
  ++created_;
  const Round due = event.origin_round + event.delay;
  if (due > horizon_) {
    ++omega_;
    return;
  }
  ring_[static_cast<std::size_t>(due % static_cast<Round>(ring_.size()))].push_back(event);
  ++in_flight_;
}

std::vector<DeliveredEvent> FeedbackQueue::pop(Round t) {
  if (t <= last_popped_ || t > horizon_) throw std::logic_error("feedback queue: rounds must be popped in order");
  last_popped_ = t;
  auto& bucket = ring_[static_cast<std::size_t>(t % static_cast<Round>(ring_.size()))];
  std::vector<DeliveredEvent> out;
  out.swap(bucket);
  in_flight_ -= static_cast<std::int64_t>(out.size());
  delivered_ += static_cast<std::int64_t>(out.size());
  return out;
}

RunTrace run_episode(Policy& policy, const LossRealization& losses, const DelaySchedule& delays, Round horizon,
                     std::uint64_t policy_seed, const EpisodeOptions& options) {
  const int n = losses.num_arms();
  const int m = losses.num_users();
  if (policy.num_arms() != n) throw std::invalid_argument("run_episode: policy and environment disagree on N");
  if (delays.num_users() != m) throw std::invalid_argument("run_episode: delay schedule and environment disagree on M");
  if (horizon < 1 || horizon > losses.horizon() || horizon > delays.horizon()) {
    throw std::invalid_argument("run_episode: horizon exceeds the environment or delay schedule");
  }

  policy.reset();
  PolicyRng rng(policy_seed);
  FeedbackQueue queue(horizon, delays.d_max());
  auto* weights = options.record_trajectory ? dynamic_cast<ExpWeightsPolicy*>(&policy) : nullptr;

  RunTrace trace;
  trace.policy = policy.name();
  trace.num_arms = n;
  trace.num_users = m;
  trace.horizon = horizon;
  trace.rounds.reserve(static_cast<std::size_t>(horizon));
  if (weights) {
    trace.distributions.reserve(static_cast<std::size_t>(horizon + 1) * n);
    trace.estimates.reserve(static_cast<std::size_t>(horizon) * n);
    auto p = weights->distribution();
    trace.distributions.insert(trace.distributions.end(), p.begin(), p.end());
  }
  if (options.record_deliveries) trace.deliveries.resize(static_cast<std::size_t>(horizon));

  double cum_loss = 0.0;
  std::int64_t delivered_total = 0;
  for (Round t = 1; t <= horizon; ++t) {
    const Selection sel = policy.select(t, rng);
    if (sel.arm < 0 || sel.arm >= n) throw std::logic_error("run_episode: policy selected an invalid arm");

    double round_loss = 0.0;
    for (int j = 0; j < m; ++j) {
      const double l = losses.loss(t, sel.arm, j);
      const int d = delays.delay(t, j);
      round_loss += l;
      trace.full_delay_sum += d;
      queue.push({t, j, sel.arm, l, sel.prob, d});
    }

    const auto phi = queue.pop(t);
    policy.observe(t, phi);

    delivered_total += static_cast<std::int64_t>(phi.size());
    cum_loss += round_loss;
    RoundRecord row;
    row.arm = sel.arm;
    row.delivered = static_cast<int>(phi.size());
    row.v_t = static_cast<std::int64_t>(m) * t - delivered_total;
    const auto snap = policy.snapshot();
    row.epoch = snap.epoch;
    row.eta = snap.eta;
    row.policy_missing = snap.missing;
    row.round_loss = round_loss;
    row.cum_loss = cum_loss;
    for (const auto& e : phi) row.delivered_delay += e.delay;
    trace.delivered_delay_sum += row.delivered_delay;
    trace.rounds.push_back(row);

    if (weights) {
      auto p = weights->distribution();
      trace.distributions.insert(trace.distributions.end(), p.begin(), p.end());
      auto est = weights->last_round_estimates();
      if (phi.empty()) {
        trace.estimates.insert(trace.estimates.end(), static_cast<std::size_t>(n), 0.0);
      } else {
        trace.estimates.insert(trace.estimates.end(), est.begin(), est.end());
      }
    }
    if (options.record_deliveries) {
      auto& slot = trace.deliveries[static_cast<std::size_t>(t - 1)];
      for (const auto& e : phi) slot.emplace_back(e.origin_round, e.user);
    }
  }
  trace.created = queue.created();
  trace.delivered = queue.delivered();
  trace.omega_count = queue.omega_count();
  return trace;
}

// --- regret ---------------------------------------------------------------

RegretReference RegretReference::build(const LossRealization& losses, bool hindsight) {
  RegretReference ref;
  ref.num_arms = losses.num_arms();
  ref.num_users = losses.num_users();
  ref.horizon = losses.horizon();
  const auto n = static_cast<std::size_t>(ref.num_arms);
  const auto rows = static_cast<std::size_t>(ref.horizon);

  if (hindsight) {
    ref.realized.resize(rows * n);
    ref.realized_totals.assign(n, 0.0);
    for (Round t = 1; t <= ref.horizon; ++t) {
      for (int i = 0; i < ref.num_arms; ++i) {
        const double g = losses.group_loss(t, i);
        ref.realized[static_cast<std::size_t>(t - 1) * n + i] = g;
        ref.realized_totals[i] += g;
      }
    }
    ref.best_arm = banditlab::oracle_arm(ref.realized_totals);
  }

  const auto& spec = losses.spec();
  if (spec.num_arms == ref.num_arms && spec.horizon == ref.horizon) {
    ref.expected.resize(rows * n);
    ref.expected_totals.assign(n, 0.0);
    for (int s = 0; s < spec.num_segments(); ++s) {
      const Round first = spec.segment_starts[s];
      const Round last = s + 1 < spec.num_segments() ? spec.segment_starts[s + 1] - 1 : spec.horizon;
      for (int i = 0; i < ref.num_arms; ++i) {
        const double e = ref.num_users * expected_loss(spec, first, i);
        for (Round t = first; t <= last; ++t) {
          ref.expected[static_cast<std::size_t>(t - 1) * n + i] = e;
          ref.expected_totals[i] += e;
        }
      }
    }
    ref.oracle_arm = banditlab::oracle_arm(ref.expected_totals);
  }
  return ref;
}

namespace {

void check_trace_against(const RunTrace& trace, const RegretReference& ref) {
  if (trace.num_arms != ref.num_arms || trace.horizon > ref.horizon) {
    throw std::invalid_argument("regret: trace does not match the reference environment");
  }
}

}  // namespace

RegretReport compute_regret(const RunTrace& trace, const RegretReference& ref) {
  check_trace_against(trace, ref);
  RegretReport report;
  report.player_loss = trace.rounds.empty() ? 0.0 : trace.rounds.back().cum_loss;
  report.omega_count = trace.omega_count;
  report.delivered_delay_sum = trace.delivered_delay_sum;
  report.full_delay_sum = trace.full_delay_sum;
  const auto n = static_cast<std::size_t>(ref.num_arms);

  if (ref.has_hindsight()) {
    std::vector<double> totals(n, 0.0);
    for (Round t = 1; t <= trace.horizon; ++t) {
      for (std::size_t i = 0; i < n; ++i) totals[i] += ref.realized[static_cast<std::size_t>(t - 1) * n + i];
    }
    report.regret_per_arm.resize(n);
    for (std::size_t i = 0; i < n; ++i) report.regret_per_arm[i] = report.player_loss - totals[i];
    report.best_arm = oracle_arm(totals);
    report.regret_hindsight = report.player_loss - totals[report.best_arm];
  }
  if (ref.has_expected()) {
    std::vector<double> totals(n, 0.0);
    for (Round t = 1; t <= trace.horizon; ++t) {
      for (std::size_t i = 0; i < n; ++i) totals[i] += ref.expected[static_cast<std::size_t>(t - 1) * n + i];
    }
    report.oracle_arm = oracle_arm(totals);
    report.regret_expected = report.player_loss - totals[report.oracle_arm];
  }
  return report;
}

RegretReport compute_regret(const RunTrace& trace, const LossRealization& losses) {
  return compute_regret(trace, RegretReference::build(losses, true));
}

void attach_regret_curves(RunTrace& trace, const RegretReference& ref) {
  check_trace_against(trace, ref);
  const auto n = static_cast<std::size_t>(ref.num_arms);
  double best = 0.0;
  double oracle = 0.0;
  for (Round t = 1; t <= trace.horizon; ++t) {
    auto& row = trace.rounds[static_cast<std::size_t>(t - 1)];
    const std::size_t base = static_cast<std::size_t>(t - 1) * n;
    if (ref.has_hindsight()) {
      best += ref.realized[base + static_cast<std::size_t>(ref.best_arm)];
      row.cum_regret_hindsight = row.cum_loss - best;
    }
    if (ref.has_expected()) {
      oracle += ref.expected[base + static_cast<std::size_t>(ref.oracle_arm)];
      row.cum_regret_expected = row.cum_loss - oracle;
    }
  }
}

// --- aggregation --------------------------------------------------------------

std::vector<double> extract_metric(const RunTrace& trace, TraceMetric metric) {
  std::vector<double> out;
  out.reserve(trace.rounds.size());
  for (const auto& row : trace.rounds) {
    switch (metric) {
      case TraceMetric::kCumLoss: out.push_back(row.cum_loss); break;
      case TraceMetric::kCumRegretHindsight: out.push_back(row.cum_regret_hindsight); break;
      case TraceMetric::kCumRegretExpected: out.push_back(row.cum_regret_expected); break;
    }
  }
  return out;
}

BandSeries aggregate_series(std::span<const std::vector<double>> series) {
  if (series.size() < 2) throw std::invalid_argument("aggregate: need at least two replications");
  const std::size_t len = series.front().size();
  for (const auto& s : series) {
    if (s.size() != len) throw std::invalid_argument("aggregate: replications differ in length");
  }
  const double r = static_cast<double>(series.size());
  BandSeries band;
  band.mean.resize(len);
  band.stddev.resize(len);
  band.lower.resize(len);
  band.upper.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    double sum = 0.0;
    for (const auto& s : series) sum += s[k];
    const double mean = sum / r;
    double ss = 0.0;
    for (const auto& s : series) ss += (s[k] - mean) * (s[k] - mean);
    const double sd = std::sqrt(ss / (r - 1.0));
    band.mean[k] = mean;
    band.stddev[k] = sd;
    band.lower[k] = mean - 2.0 * sd;
    band.upper[k] = mean + 2.0 * sd;
  }
  return band;
}

BandSeries aggregate_replications(std::span<const RunTrace> traces, TraceMetric metric) {
  std::vector<std::vector<double>> series;
  series.reserve(traces.size());
  for (const auto& tr : traces) series.push_back(extract_metric(tr, metric));
  return aggregate_series(series);
}

}  // namespace banditlab

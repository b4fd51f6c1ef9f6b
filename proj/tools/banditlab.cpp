#include <cstdint>
#include <exception>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "banditlab/bounds.hpp"
#include "banditlab/config.hpp"
#include "banditlab/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheck = 3;

using namespace banditlab;

int cmd_run(const std::string& config_path, const std::optional<std::string>& out,
            const std::optional<std::uint64_t>& seed, const std::optional<int>& threads, bool check) {
  ExperimentConfig config = load_config(config_path);
  if (out) config.output_dir = *out;
  if (seed) config.master_seed = *seed;
  if (threads) config.threads = *threads;
  config.validate();

  RunOptions options;
  options.check = check;
  const ExperimentResult result = run_experiment(config, options);

  std::cout << "config hash " << config.hash() << "\n";
  for (const auto& p : result.policies) {
    const auto& s = p.summary;
    std::cout << std::left << std::setw(8) << s.policy << " final loss " << s.mean_final_loss << " +- "
              << s.std_final_loss << "  regret " << s.mean_final_regret;
    if (!std::isnan(s.theorem_bound)) std::cout << "  bound " << s.theorem_bound << "  margin " << s.bound_margin;
    std::cout << "\n";
  }
  if (!result.trace_csv.empty()) std::cout << "wrote " << result.trace_csv << "\n";
  std::cout << "wrote " << result.summary_csv << "\n";
  for (const auto& plot : result.plots) std::cout << "wrote " << plot << "\n";

  if (check) {
    for (const auto& f : result.check_failures) std::cerr << "check failed: " << f << "\n";
    if (!result.check_failures.empty()) return kExitCheck;
    std::cout << "all checks passed\n";
  }
  return kExitOk;
}

int cmd_suite(bool full, const std::string& out, std::uint64_t seed, int replications,
              const std::optional<Round>& horizon, int threads, bool quiet) {
  SuiteOptions options;
  options.output_dir = out;
  options.master_seed = seed;
  options.replications = replications;
  options.horizon = horizon ? *horizon : (full ? 80001 : 30000);
  options.threads = threads;
  options.quiet = quiet;
  const SuiteResult suite = reproduce_paper_suite(options);
  for (const auto& plot : suite.plots) std::cout << "wrote " << plot << "\n";
  std::cout << "wrote " << suite.summary_csv << "\n";
  return kExitOk;
}

int cmd_bounds(const std::string& config_path, int replication) {
  const ExperimentConfig config = load_config(config_path);
  const ReplicationContext ctx = make_replication(config, replication);
  const double delta = config.resolved_delta();
  PolicySpec mud{"mud", std::nullopt, std::nullopt, ""};
  const double eta = input_eta(config, mud, ctx);
  const double eta_prime = truncate_learning_rate(eta, config.num_users, config.num_arms, delta);

  BoundInputs in;
  in.num_arms = config.num_arms;
  in.num_users = config.num_users;
  in.horizon = config.horizon;
  in.eta_prime = eta_prime;
  in.delivered_delay_sum = ctx.delays.delivered_sum();
  in.omega_count = ctx.delays.undelivered_count();
  in.full_delay_sum = ctx.delays.full_sum();

  std::cout << std::setprecision(10);
  std::cout << "env " << config.resolved_env_id() << " replication " << replication << "\n";
  std::cout << "sum_delays_full " << in.full_delay_sum << "\n";
  std::cout << "sum_delays_delivered " << in.delivered_delay_sum << "\n";
  std::cout << "omega " << in.omega_count << "\n";
  std::cout << "delta " << delta << "\n";
  std::cout << "eta " << eta << "\n";
  std::cout << "eta_prime " << eta_prime << "\n";
  std::cout << "theorem1_bound " << theorem1_bound(in) << "\n";
  std::cout << "theorem2_bound " << theorem2_bound(config.num_arms, config.num_users, config.horizon,
                                                   in.full_delay_sum)
            << "\n";
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& traces, const std::string& metric, const std::string& out,
             const std::string& title) {
  emit_plot(traces, metric_from_string(metric), out, title);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banditlab: multi-user delayed-feedback bandit experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool check = false;
  auto* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("--config", config_path, "experiment config (YAML)")->required();
  run->add_option("--out", out, "output directory (overrides output_dir)");
  run->add_option("--seed", seed, "master seed (overrides master_seed)");
  run->add_option("--threads", threads, "worker threads, 0 for all cores");
  run->add_flag("--check", check, "run lemma and bound checkers; exit 3 on a violation");

  bool full = false;
  bool quiet = false;
  std::string suite_out = "suite_out";
  std::uint64_t suite_seed = 2024;
  int suite_reps = 20;
  std::optional<Round> suite_horizon;
  int suite_threads = 0;
  auto* suite = app.add_subcommand("suite", "run the canned figure grid");
  suite->add_flag("--full", full, "use T = 80001 instead of 30000");
  suite->add_option("--out", suite_out, "output directory");
  suite->add_option("--seed", suite_seed, "master seed");
  suite->add_option("--replications", suite_reps, "replications per config")->check(CLI::PositiveNumber);
  suite->add_option("--horizon", suite_horizon, "override T")->check(CLI::PositiveNumber);
  suite->add_option("--threads", suite_threads, "worker threads, 0 for all cores");
  suite->add_flag("--quiet", quiet, "no progress lines");

  std::string bounds_config;
  int bounds_rep = 1;
  auto* bounds = app.add_subcommand("bounds", "evaluate theorem bounds for a config's delay draw");
  bounds->add_option("--config", bounds_config, "experiment config (YAML)")->required();
  bounds->add_option("--replication", bounds_rep, "replication whose delays are used")->check(CLI::PositiveNumber);

  std::vector<std::string> plot_traces;
  std::string plot_metric = "cum_loss";
  std::string plot_out = "plot.svg";
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "plot trace CSVs");
  plot->add_option("--trace", plot_traces, "trace CSV (repeatable)")->required();
  plot->add_option("--metric", plot_metric, "cum_loss | cum_regret_hindsight | cum_regret_expected");
  plot->add_option("--out", plot_out, "output SVG");
  plot->add_option("--title", plot_title, "figure title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out, seed, threads, check);
    if (suite->parsed()) {
      return cmd_suite(full, suite_out, suite_seed, suite_reps, suite_horizon, suite_threads, quiet);
    }
    if (bounds->parsed()) return cmd_bounds(bounds_config, bounds_rep);
    if (plot->parsed()) return cmd_plot(plot_traces, plot_metric, plot_out, plot_title);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

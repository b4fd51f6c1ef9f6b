#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "banditlab/environment.hpp"

namespace banditlab {

enum class ConfigErrorKind { kIo, kSyntax, kUnknownKey, kInvalidValue, kUnknownPolicy };

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ConfigErrorKind kind() const { return kind_; }

 private:
  ConfigErrorKind kind_;
};

enum class EtaMode { kRecommendedExact, kRecommendedPessimistic, kFixed };

std::string to_string(EtaMode mode);

inline const std::vector<std::string>& known_policy_names() {
  static const std::vector<std::string> names{"mud", "amud", "ducb", "se", "oracle", "random"};
  return names;
}

struct PolicySpec {
  std::string name;
  // Per-policy overrides for mud; unset falls back to the experiment values.
  std::optional<double> eta;
  std::optional<double> delta;
  // Column label; defaults to name.
  std::string label;

  const std::string& display() const { return label.empty() ? name : label; }
};

struct ExperimentConfig {
  std::uint64_t master_seed = 0;
  int num_arms = 10;
  int num_users = 10;
  Round horizon = 80001;
  int tran_num = 3;

  DelayKind delay_kind = DelayKind::kUniform;
  int d_max = 10;
  double geometric_p = 0.2;
  std::string delay_file;
  // Delay bound handed to mud; unset means d_max.
  std::optional<double> delta;

  std::vector<PolicySpec> policies = default_policies();
  int replications = 20;
  EtaMode eta_mode = EtaMode::kRecommendedExact;
  double eta_value = 0.0;

  std::string output_dir = "out";
  std::string env_id;  // derived from the environment fields when empty
  int trace_stride = 1;
  bool hindsight = true;
  int threads = 0;  // 0: hardware concurrency

  static std::vector<PolicySpec> default_policies();

  void validate() const;
  std::string resolved_env_id() const;
  double resolved_delta() const;
  // Stable hex digest of every field that influences results.
  std::string hash() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& config);

// Plain-text (YAML) form of a loss spec.
std::string dump_loss_spec(const SegmentedLossSpec& spec);
SegmentedLossSpec parse_loss_spec(const std::string& text);

// Custom delay table: one row per round, M comma-separated positive integers.
DelaySchedule load_delay_table(const std::string& path, int num_users, Round horizon, int d_max);

}  // namespace banditlab

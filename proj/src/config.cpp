#include "banditlab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "banditlab/random.hpp"

namespace banditlab {

std::string to_string(EtaMode mode) {
  switch (mode) {
    case EtaMode::kRecommendedExact: return "recommended_exact";
    case EtaMode::kRecommendedPessimistic: return "recommended_pessimistic";
    case EtaMode::kFixed: return "fixed";
  }
  return "unknown";
}

std::vector<PolicySpec> ExperimentConfig::default_policies() {
  std::vector<PolicySpec> out;
  for (const auto& name : known_policy_names()) out.push_back({name, {}, {}, {}});
  return out;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ConfigError(ConfigErrorKind::kInvalidValue, what); }

}  // namespace

void ExperimentConfig::validate() const {
  if (num_arms < 2) invalid("environment.N must be >= 2");
  if (num_users < 1) invalid("environment.M must be >= 1");
  if (horizon < 1) invalid("environment.T must be >= 1");
  if (tran_num < 1 || tran_num > horizon) invalid("environment.tran_num must lie in [1, T]");
  if (d_max < 1) invalid("delays.d_max must be >= 1");
  if (delay_kind == DelayKind::kGeometric && !(geometric_p > 0.0 && geometric_p <= 1.0)) {
    invalid("delays.p must lie in (0, 1]");
  }
  if (delay_kind == DelayKind::kCustom && delay_file.empty()) invalid("delays.file is required for custom delays");
  if (delta && !(*delta > 0.0)) invalid("delays.delta must be positive");
  if (replications < 1) invalid("replications must be >= 1");
  if (policies.empty()) invalid("policies must not be empty");
  std::set<std::string> labels;
  for (const auto& p : policies) {
    if (std::find(known_policy_names().begin(), known_policy_names().end(), p.name) == known_policy_names().end()) {
      throw ConfigError(ConfigErrorKind::kUnknownPolicy, "unknown policy '" + p.name + "'");
    }
    if (p.eta && !(*p.eta > 0.0)) invalid("policy '" + p.display() + "': eta must be positive");
    if (p.delta && !(*p.delta > 0.0)) invalid("policy '" + p.display() + "': delta must be positive");
    if (!labels.insert(p.display()).second) invalid("duplicate policy label '" + p.display() + "'");
  }
  if (eta_mode == EtaMode::kFixed && !(eta_value > 0.0)) invalid("eta must be positive when eta_mode is fixed");
  if (trace_stride < 1) invalid("trace_stride must be >= 1");
  if (threads < 0) invalid("threads must be >= 0");
  if (output_dir.empty()) invalid("output_dir must not be empty");
}

std::string ExperimentConfig::resolved_env_id() const {
  if (!env_id.empty()) return env_id;
  std::ostringstream id;
  id << "N" << num_arms << "_M" << num_users << "_T" << horizon << "_tran" << tran_num << "_d" << d_max << "_"
     << to_string(delay_kind);
  return id.str();
}

double ExperimentConfig::resolved_delta() const {
  if (delta) return *delta;
  return delay_kind == DelayKind::kHorizon ? static_cast<double>(horizon) : static_cast<double>(d_max);
}

std::string ExperimentConfig::hash() const {
  std::string canonical = dump_config(*this);
  // output_dir does not influence results.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) h = mix64(h ^ c);
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

// --- parsing ------------------------------------------------------------------

namespace {

void reject_unknown(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) invalid(where.empty() ? "config root must be a mapping" : where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) {
      throw ConfigError(ConfigErrorKind::kUnknownKey,
                        "unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <typename T>
T read(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    invalid("'" + key + "' has the wrong type");
  }
}

template <typename T>
void read_opt(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
  if (auto n = parent[key]) out = read<T>(n, path.empty() ? key : path + "." + key);
}

PolicySpec parse_policy(const YAML::Node& node) {
  PolicySpec p;
  if (node.IsScalar()) {
    p.name = node.as<std::string>();
    return p;
  }
  reject_unknown(node, "policies[]", {"name", "eta", "delta", "label"});
  if (!node["name"]) invalid("policy entry needs a name");
  p.name = read<std::string>(node["name"], "policies[].name");
  if (auto n = node["eta"]) p.eta = read<double>(n, "policies[].eta");
  if (auto n = node["delta"]) p.delta = read<double>(n, "policies[].delta");
  read_opt(node, "label", "policies[]", p.label);
  return p;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(ConfigErrorKind::kSyntax, std::string("malformed config: ") + e.what());
  }
  ExperimentConfig cfg;
  if (root.IsNull()) invalid("config is empty");
  reject_unknown(root, "",
                 {"master_seed", "environment", "delays", "policies", "replications", "eta_mode", "eta",
                  "output_dir", "env_id", "trace_stride", "hindsight", "threads"});

  read_opt(root, "master_seed", "", cfg.master_seed);
  if (auto env = root["environment"]) {
    reject_unknown(env, "environment", {"N", "M", "T", "tran_num"});
    read_opt(env, "N", "environment", cfg.num_arms);
    read_opt(env, "M", "environment", cfg.num_users);
    read_opt(env, "T", "environment", cfg.horizon);
    read_opt(env, "tran_num", "environment", cfg.tran_num);
  }
  if (auto d = root["delays"]) {
    reject_unknown(d, "delays", {"kind", "d_max", "delta", "p", "file"});
    if (auto k = d["kind"]) {
      try {
        cfg.delay_kind = delay_kind_from_string(read<std::string>(k, "delays.kind"));
      } catch (const std::invalid_argument& e) {
        invalid(e.what());
      }
    }
    read_opt(d, "d_max", "delays", cfg.d_max);
    if (auto n = d["delta"]) cfg.delta = read<double>(n, "delays.delta");
    read_opt(d, "p", "delays", cfg.geometric_p);
    read_opt(d, "file", "delays", cfg.delay_file);
  }
  if (auto pol = root["policies"]) {
    if (!pol.IsSequence()) invalid("policies must be a list");
    cfg.policies.clear();
    for (const auto& entry : pol) cfg.policies.push_back(parse_policy(entry));
  }
  read_opt(root, "replications", "", cfg.replications);
  if (auto m = root["eta_mode"]) {
    const auto mode = read<std::string>(m, "eta_mode");
    if (mode == "recommended_exact") {
      cfg.eta_mode = EtaMode::kRecommendedExact;
    } else if (mode == "recommended_pessimistic") {
      cfg.eta_mode = EtaMode::kRecommendedPessimistic;
    } else if (mode == "fixed") {
      cfg.eta_mode = EtaMode::kFixed;
    } else {
      invalid("unknown eta_mode '" + mode + "'");
    }
  }
  read_opt(root, "eta", "", cfg.eta_value);
  if (root["eta"] && !root["eta_mode"]) cfg.eta_mode = EtaMode::kFixed;
  read_opt(root, "output_dir", "", cfg.output_dir);
  read_opt(root, "env_id", "", cfg.env_id);
  read_opt(root, "trace_stride", "", cfg.trace_stride);
  read_opt(root, "hindsight", "", cfg.hindsight);
  read_opt(root, "threads", "", cfg.threads);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigErrorKind::kIo, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "master_seed" << YAML::Value << cfg.master_seed;
  out << YAML::Key << "environment" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "N" << YAML::Value << cfg.num_arms;
  out << YAML::Key << "M" << YAML::Value << cfg.num_users;
  out << YAML::Key << "T" << YAML::Value << cfg.horizon;
  out << YAML::Key << "tran_num" << YAML::Value << cfg.tran_num;
  out << YAML::EndMap;
  out << YAML::Key << "delays" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(cfg.delay_kind);
  out << YAML::Key << "d_max" << YAML::Value << cfg.d_max;
  if (cfg.delta) out << YAML::Key << "delta" << YAML::Value << *cfg.delta;
  if (cfg.delay_kind == DelayKind::kGeometric) out << YAML::Key << "p" << YAML::Value << cfg.geometric_p;
  if (!cfg.delay_file.empty()) out << YAML::Key << "file" << YAML::Value << cfg.delay_file;
  out << YAML::EndMap;
  out << YAML::Key << "policies" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : cfg.policies) {
    if (!p.eta && !p.delta && p.label.empty()) {
      out << p.name;
      continue;
    }
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << p.name;
    if (p.eta) out << YAML::Key << "eta" << YAML::Value << *p.eta;
    if (p.delta) out << YAML::Key << "delta" << YAML::Value << *p.delta;
    if (!p.label.empty()) out << YAML::Key << "label" << YAML::Value << p.label;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "replications" << YAML::Value << cfg.replications;
  out << YAML::Key << "eta_mode" << YAML::Value << to_string(cfg.eta_mode);
  if (cfg.eta_mode == EtaMode::kFixed) out << YAML::Key << "eta" << YAML::Value << cfg.eta_value;
  out << YAML::Key << "env_id" << YAML::Value << cfg.resolved_env_id();
  out << YAML::Key << "trace_stride" << YAML::Value << cfg.trace_stride;
  out << YAML::Key << "hindsight" << YAML::Value << cfg.hindsight;
  out << YAML::EndMap;
  return out.c_str();
}

// --- loss specs -----------------------------------------------------------------

std::string dump_loss_spec(const SegmentedLossSpec& spec) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "N" << YAML::Value << spec.num_arms;
  out << YAML::Key << "M" << YAML::Value << spec.num_users;
  out << YAML::Key << "T" << YAML::Value << spec.horizon;
  out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
  for (int s = 0; s < spec.num_segments(); ++s) {
    out << YAML::BeginMap;
    out << YAML::Key << "start" << YAML::Value << spec.segment_starts[s];
    out << YAML::Key << "mean" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (int i = 0; i < spec.num_arms; ++i) out << spec.at(i, s).mean;
    out << YAML::EndSeq;
    out << YAML::Key << "std" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (int i = 0; i < spec.num_arms; ++i) out << spec.at(i, s).stddev;
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return out.c_str();
}

SegmentedLossSpec parse_loss_spec(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(ConfigErrorKind::kSyntax, std::string("malformed loss spec: ") + e.what());
  }
  reject_unknown(root, "", {"N", "M", "T", "segments"});
  SegmentedLossSpec spec;
  spec.num_arms = read<int>(root["N"], "N");
  spec.num_users = read<int>(root["M"], "M");
  spec.horizon = read<Round>(root["T"], "T");
  if (!root["segments"].IsSequence()) invalid("segments must be a list");
  for (const auto& seg : root["segments"]) {
    reject_unknown(seg, "segments[]", {"start", "mean", "std"});
    spec.segment_starts.push_back(read<Round>(seg["start"], "segments[].start"));
    const auto means = read<std::vector<double>>(seg["mean"], "segments[].mean");
    const auto stds = read<std::vector<double>>(seg["std"], "segments[].std");
    if (static_cast<int>(means.size()) != spec.num_arms || static_cast<int>(stds.size()) != spec.num_arms) {
      invalid("each segment needs N means and N stds");
    }
    for (int i = 0; i < spec.num_arms; ++i) spec.params.push_back({means[i], stds[i]});
  }
  try {
    spec.validate(false);
  } catch (const std::invalid_argument& e) {
    invalid(e.what());
  }
  return spec;
}

DelaySchedule load_delay_table(const std::string& path, int num_users, Round horizon, int d_max) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigErrorKind::kIo, "cannot read delay file '" + path + "'");
  std::vector<int> table;
  table.reserve(static_cast<std::size_t>(horizon) * num_users);
  std::string line;
  Round row = 0;
  while (std::getline(in, line) && row < horizon) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream cells(line);
    std::string cell;
    int count = 0;
    while (std::getline(cells, cell, ',')) {
      int v = 0;
      const auto* first = cell.data();
      while (first != cell.data() + cell.size() && *first == ' ') ++first;
      auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc()) invalid("delay file: bad entry '" + cell + "'");
      table.push_back(v);
      ++count;
    }
    if (count != num_users) invalid("delay file: each row needs M entries");
    ++row;
  }
  if (row != horizon) invalid("delay file: expected T rows");
  try {
    return DelaySchedule(num_users, horizon, d_max, std::move(table));
  } catch (const std::invalid_argument& e) {
    invalid(std::string("delay file: ") + e.what());
  }
}

}  // namespace banditlab

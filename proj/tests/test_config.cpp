#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "banditlab/config.hpp"

using namespace banditlab;

namespace {

ConfigErrorKind kind_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigErrorKind::kIo;
}

std::string message_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const auto cfg = parse_config("master_seed: 1\n");
  CHECK(cfg.master_seed == 1);
  CHECK(cfg.num_arms == 10);
  CHECK(cfg.num_users == 10);
  CHECK(cfg.tran_num == 3);
  CHECK(cfg.d_max == 10);
  CHECK(cfg.horizon == 80001);
  CHECK(cfg.replications == 20);
  CHECK(cfg.delay_kind == DelayKind::kUniform);
  CHECK(cfg.eta_mode == EtaMode::kRecommendedExact);
  CHECK(cfg.resolved_delta() == 10.0);
  std::vector<std::string> names;
  for (const auto& p : cfg.policies) names.push_back(p.name);
  CHECK(names == known_policy_names());
}

TEST_CASE("rejections name the offending field") {
  CHECK(kind_of("policies: [mud, nosuch]\n") == ConfigErrorKind::kUnknownPolicy);
  CHECK(message_of("policies: [mud, nosuch]\n").find("nosuch") != std::string::npos);
  CHECK(kind_of("replications: 0\n") == ConfigErrorKind::kInvalidValue);
  CHECK(message_of("replications: 0\n").find("replications") != std::string::npos);
  CHECK(kind_of("environment: {N: 10, colour: red}\n") == ConfigErrorKind::kUnknownKey);
  CHECK(message_of("environment: {N: 10, colour: red}\n").find("environment.colour") != std::string::npos);
  CHECK(kind_of("bogus: 1\n") == ConfigErrorKind::kUnknownKey);
  CHECK(kind_of("environment: {N: [1, 2\n") == ConfigErrorKind::kSyntax);
  CHECK(kind_of("environment: {N: ten}\n") == ConfigErrorKind::kInvalidValue);
  CHECK(kind_of("environment: {N: 1}\n") == ConfigErrorKind::kInvalidValue);
  CHECK(kind_of("environment: {T: 0}\n") == ConfigErrorKind::kInvalidValue);
  CHECK(kind_of("delays: {d_max: 0}\n") == ConfigErrorKind::kInvalidValue);
  CHECK(kind_of("delays: {kind: sometimes}\n") == ConfigErrorKind::kInvalidValue);
  CHECK(kind_of("eta_mode: whatever\n") == ConfigErrorKind::kInvalidValue);
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("dump and parse round trip") {
  const std::string text =
      "master_seed: 99\n"
      "environment: {N: 4, M: 3, T: 500, tran_num: 2}\n"
      "delays: {kind: geometric, d_max: 30, p: 0.25, delta: 12}\n"
      "policies: [{name: mud, eta: 0.01, label: mud_fixed}, amud, random]\n"
      "replications: 3\n"
      "trace_stride: 5\n"
      "hindsight: false\n";
  const auto a = parse_config(text);
  const auto b = parse_config(dump_config(a));
  CHECK(dump_config(a) == dump_config(b));
  CHECK(a.hash() == b.hash());
  CHECK(b.delay_kind == DelayKind::kGeometric);
  CHECK(b.geometric_p == 0.25);
  CHECK(b.resolved_delta() == 12.0);
  REQUIRE(b.policies.size() == 3);
  CHECK(b.policies[0].display() == "mud_fixed");
  CHECK(*b.policies[0].eta == 0.01);
  CHECK_FALSE(b.hindsight);

  auto c = a;
  c.master_seed = 100;
  CHECK(c.hash() != a.hash());
  auto d = a;
  d.threads = 7;
  d.output_dir = "elsewhere";
  CHECK(d.hash() == a.hash());
}

TEST_CASE("loss spec round trip") {
  const auto spec = build_adversarial_env(3, 2, 1000, 4, 5);
  const auto back = parse_loss_spec(dump_loss_spec(spec));
  CHECK(back.segment_starts == spec.segment_starts);
  REQUIRE(back.params.size() == spec.params.size());
  for (std::size_t k = 0; k < spec.params.size(); ++k) {
    CHECK(back.params[k].mean == spec.params[k].mean);
    CHECK(back.params[k].stddev == spec.params[k].stddev);
  }
}

TEST_CASE("delay table files") {
  const auto dir = std::filesystem::temp_directory_path() / "banditlab_test_config";
  std::filesystem::create_directories(dir);
  const auto good = (dir / "good.csv").string();
  {
    std::ofstream out(good);
    out << "# round delays\n1,2\n3, 1\n\n2,2\n";
  }
  const auto d = load_delay_table(good, 2, 3, 3);
  CHECK(d.delay(1, 1) == 2);
  CHECK(d.delay(2, 0) == 3);
  CHECK(d.full_sum() == 11.0);

  const auto bad = (dir / "bad.csv").string();
  {
    std::ofstream out(bad);
    out << "1,2\n3\n2,2\n";
  }
  CHECK_THROWS_AS(load_delay_table(bad, 2, 3, 3), ConfigError);
  CHECK_THROWS_AS(load_delay_table(good, 2, 4, 3), ConfigError);
  CHECK_THROWS_AS(load_delay_table(good, 2, 3, 2), ConfigError);

  const auto cfg = parse_config("environment: {M: 2, T: 3}\ndelays: {kind: custom, d_max: 3, file: " + good + "}\n");
  CHECK(cfg.delay_kind == DelayKind::kCustom);
  std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "banditlab/experiment.hpp"

using namespace banditlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "banditlab_test_harness" / name;
  fs::remove_all(dir);
  return dir;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

ExperimentConfig tiny(const fs::path& out) {
  auto cfg = parse_config(
      "master_seed: 7\n"
      "environment: {N: 3, M: 2, T: 20, tran_num: 2}\n"
      "delays: {d_max: 3}\n"
      "policies: [mud, amud, ducb, se, oracle, random]\n"
      "replications: 2\n");
  cfg.output_dir = out.string();
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("trace has one row per policy, replication and round") {
  const auto dir = scratch("rows");
  auto cfg = parse_config("master_seed: 3\nenvironment: {T: 100}\npolicies: [mud, random]\nreplications: 2\n");
  cfg.output_dir = dir.string();
  const auto result = run_experiment(cfg);
  const std::string text = slurp(result.trace_csv);
  CHECK(count_lines(text) == 401);
  CHECK(text.rfind(std::string(kTraceColumns) + "\n", 0) == 0);
  const std::string summary = slurp(result.summary_csv);
  CHECK(count_lines(summary) == 3);
  CHECK(summary.rfind(std::string(kSummaryColumns) + "\n", 0) == 0);
  CHECK(result.plots.size() == 2);
  for (const auto& p : result.plots) CHECK(fs::exists(p));
}

TEST_CASE("reruns are byte identical and thread count does not matter") {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  auto cfg = parse_config("master_seed: 11\nenvironment: {T: 300, tran_num: 2}\nreplications: 3\n");
  cfg.output_dir = a.string();
  cfg.threads = 1;
  const auto ra = run_experiment(cfg);
  cfg.output_dir = b.string();
  cfg.threads = 3;
  const auto rb = run_experiment(cfg);
  CHECK(slurp(ra.trace_csv) == slurp(rb.trace_csv));
  CHECK(slurp(ra.summary_csv) == slurp(rb.summary_csv));
  for (const char* svg : {"loss.svg", "regret.svg"}) CHECK(slurp((a / svg).string()) == slurp((b / svg).string()));
}

TEST_CASE("every policy sees the same environment draws") {
  const auto dir = scratch("crn");
  auto cfg = tiny(dir);
  const auto result = run_experiment(cfg, {false, false, false});
  REQUIRE(result.policies.size() == 6);
  const auto& first = result.policies.front().env_fingerprints;
  CHECK(first.size() == 2);
  CHECK(first[0] != first[1]);
  for (const auto& p : result.policies) CHECK(p.env_fingerprints == first);

  // The context is a pure function of (config, replication).
  const auto c1 = make_replication(cfg, 2);
  const auto c2 = make_replication(cfg, 2);
  CHECK(c1.fingerprint() == c2.fingerprint());
  CHECK(c1.fingerprint() == first[1]);
  CHECK(policy_seed(cfg, 1, cfg.policies[0]) != policy_seed(cfg, 1, cfg.policies[5]));
  CHECK(policy_seed(cfg, 1, cfg.policies[0]) != policy_seed(cfg, 2, cfg.policies[0]));
}

TEST_CASE("oracle has zero-mean expected regret in a stationary environment") {
  const auto dir = scratch("oracle");
  auto cfg = parse_config(
      "master_seed: 5\nenvironment: {N: 5, M: 3, T: 400, tran_num: 1}\npolicies: [oracle]\nreplications: 200\n");
  cfg.output_dir = dir.string();
  const auto result = run_experiment(cfg, {false, false, false});
  const auto& v = result.policies[0].final_regret_expected;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  CHECK(se > 0.0);
  CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("golden trace for a tiny configuration") {
  const auto dir = scratch("golden");
  const auto result = run_experiment(tiny(dir), {true, false, false});
  const std::string golden = std::string(BANDITLAB_TEST_DATA) + "/golden/tiny_trace.csv";
  REQUIRE(fs::exists(golden));
  CHECK(slurp(result.trace_csv) == slurp(golden));
}

TEST_CASE("bounds land in the summary for the exponential-weights policies only") {
  const auto dir = scratch("bounds");
  const auto result = run_experiment(tiny(dir), {false, false, false});
  for (const auto& p : result.policies) {
    const bool has_bound = p.label == "mud" || p.label == "amud";
    CHECK(std::isnan(p.summary.theorem_bound) != has_bound);
    if (has_bound) CHECK(p.summary.bound_margin == doctest::Approx(p.summary.theorem_bound - p.summary.mean_final_regret));
  }
}

TEST_CASE("failed writes throw and leave nothing behind") {
  auto cfg = tiny(fs::path("/proc/banditlab_cannot_exist"));
  CHECK_THROWS(run_experiment(cfg));

  // A directory squatting on a plot path makes the last write fail.
  const auto dir = scratch("partial");
  fs::create_directories(dir / "loss.svg");
  cfg.output_dir = dir.string();
  CHECK_THROWS(run_experiment(cfg));
  CHECK_FALSE(fs::exists(dir / "trace.csv"));
  CHECK_FALSE(fs::exists(dir / "summary.csv"));
  CHECK_FALSE(fs::exists(dir / "regret.svg"));
}

TEST_CASE("emit_plot from trace files") {
  const auto dir = scratch("plot");
  fs::create_directories(dir);
  CHECK_THROWS_AS(emit_plot({}, TraceMetric::kCumLoss, (dir / "x.svg").string()), std::invalid_argument);

  const auto write = [&](const std::string& name, const std::string& body) {
    const auto path = (dir / name).string();
    std::ofstream(path) << kTraceColumns << '\n' << body;
    return path;
  };
  const auto header_only = write("empty.csv", "");
  CHECK_THROWS_AS(emit_plot({header_only}, TraceMetric::kCumLoss, (dir / "x.svg").string()), std::invalid_argument);

  // Two replications of "a" differing by 2 at every round: std sqrt(2), band half-width 2 sqrt(2).
  // A single replication of "b": zero-width band.
  std::string body;
  for (int t = 1; t <= 5; ++t) {
    body += "a,1," + std::to_string(t) + ",1,0,0,0,nan,0," + std::to_string(10 * t) + ",nan,nan\n";
    body += "a,2," + std::to_string(t) + ",1,0,0,0,nan,0," + std::to_string(10 * t + 2) + ",nan,nan\n";
    body += "b,1," + std::to_string(t) + ",1,0,0,0,nan,0," + std::to_string(3 * t) + ",nan,nan\n";
  }
  const auto trace = write("trace.csv", body);
  const auto svg_path = (dir / "plot.svg").string();
  emit_plot({trace}, TraceMetric::kCumLoss, svg_path, "read back");
  const std::string svg = slurp(svg_path);
  CHECK(svg.find("read back") != std::string::npos);
  CHECK(svg.find("class=\"legend\"") != std::string::npos);

  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex(R"re(data-y0="([^"]+)" data-y1="([^"]+)".*data-height="([^"]+)")re")));
  const double y0 = std::stod(m[1]), y1 = std::stod(m[2]), height = std::stod(m[3]);
  const double per_px = (y1 - y0) / height;

  std::vector<std::string> bands, colors, dashes;
  const std::regex band_re(R"re(<path class="band" fill="([^"]+)"[^>]* d="([^"]+)")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), band_re); it != std::sregex_iterator(); ++it) {
    colors.push_back((*it)[1]);
    bands.push_back((*it)[2]);
  }
  REQUIRE(bands.size() == 2);
  CHECK(colors[0] != colors[1]);

  const auto ys = [](const std::string& d) {
    std::vector<double> out;
    const std::regex pt(R"re([ML]([-0-9.]+),([-0-9.]+))re");
    for (auto it = std::sregex_iterator(d.begin(), d.end(), pt); it != std::sregex_iterator(); ++it) {
      out.push_back(std::stod((*it)[2]));
    }
    return out;
  };
  const auto a = ys(bands[0]);
  const auto b = ys(bands[1]);
  REQUIRE(a.size() == 10);
  REQUIRE(b.size() == 10);
  for (int i = 0; i < 5; ++i) {
    const double half_width = (a[9 - i] - a[i]) * per_px / 2.0;
    CHECK(std::abs(half_width - 2.0 * std::sqrt(2.0)) <= 0.002 * per_px);
    CHECK(b[9 - i] == b[i]);
  }
}

TEST_CASE("small suite writes every figure") {
  const auto dir = scratch("suite");
  SuiteOptions opt;
  opt.output_dir = dir.string();
  opt.horizon = 300;
  opt.replications = 2;
  opt.quiet = true;
  const auto result = reproduce_paper_suite(opt);
  CHECK(result.plots.size() >= 7);
  for (const auto& p : result.plots) CHECK(fs::exists(p));
  CHECK(fs::exists(result.summary_csv));
  CHECK(count_lines(slurp(result.summary_csv)) == result.rows.size() + 1);
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <string>
#include <vector>

#include "banditlab/bounds.hpp"
#include "banditlab/config.hpp"
#include "banditlab/experiment.hpp"

namespace py = pybind11;
using namespace banditlab;

namespace {

std::unique_ptr<Policy> policy_by_name(const std::string& name, int num_arms, int num_users, double eta,
                                       double delta, int arm) {
  if (name == "mud") return std::make_unique<MudExp3>(num_arms, num_users, eta, delta);
  if (name == "amud") return std::make_unique<AmudExp3>(num_arms, num_users);
  if (name == "ducb") return std::make_unique<DelayedUcb>(num_arms);
  if (name == "se") return std::make_unique<SuccessiveElimination>(num_arms);
  if (name == "oracle") return std::make_unique<FixedArmPolicy>(num_arms, arm);
  if (name == "random") return std::make_unique<UniformRandomPolicy>(num_arms);
  throw std::invalid_argument("unknown policy '" + name + "'");
}

py::dict trace_to_dict(const RunTrace& trace) {
  std::vector<int> arm, delivered, epoch;
  std::vector<std::int64_t> v_t;
  std::vector<double> eta, round_loss, cum_loss, reg_h, reg_e;
  for (const auto& r : trace.rounds) {
    arm.push_back(r.arm);
    delivered.push_back(r.delivered);
    epoch.push_back(r.epoch);
    v_t.push_back(r.v_t);
    eta.push_back(r.eta);
    round_loss.push_back(r.round_loss);
    cum_loss.push_back(r.cum_loss);
    reg_h.push_back(r.cum_regret_hindsight);
    reg_e.push_back(r.cum_regret_expected);
  }
  py::dict d;
  d["policy"] = trace.policy;
  d["arm"] = arm;
  d["delivered_count"] = delivered;
  d["v_t"] = v_t;
  d["epoch"] = epoch;
  d["eta"] = eta;
  d["round_loss"] = round_loss;
  d["cum_loss"] = cum_loss;
  d["cum_regret_hindsight"] = reg_h;
  d["cum_regret_expected"] = reg_e;
  d["created"] = trace.created;
  d["delivered"] = trace.delivered;
  d["omega_count"] = trace.omega_count;
  d["delivered_delay_sum"] = trace.delivered_delay_sum;
  d["full_delay_sum"] = trace.full_delay_sum;
  return d;
}

py::dict summary_to_dict(const SummaryRow& s) {
  py::dict d;
  d["policy"] = s.policy;
  d["env_id"] = s.env_id;
  d["T"] = s.horizon;
  d["d_max"] = s.d_max;
  d["tran_num"] = s.tran_num;
  d["R"] = s.replications;
  d["mean_final_loss"] = s.mean_final_loss;
  d["std_final_loss"] = s.std_final_loss;
  d["mean_final_regret"] = s.mean_final_regret;
  d["mean_final_regret_hindsight"] = s.mean_final_regret_hindsight;
  d["mean_final_regret_expected"] = s.mean_final_regret_expected;
  d["theorem_bound"] = s.theorem_bound;
  d["bound_margin"] = s.bound_margin;
  d["wall_seconds"] = s.wall_seconds;
  d["config_hash"] = s.config_hash;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "multi-user delayed-feedback bandit engine";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // --- formulas -------------------------------------------------------------
  m.def("recommended_eta", &recommended_eta, py::arg("num_arms"), py::arg("num_users"), py::arg("horizon"),
        py::arg("sum_delays"));
  m.def("truncate_learning_rate", &truncate_learning_rate, py::arg("eta"), py::arg("num_users"),
        py::arg("num_arms"), py::arg("delta"));
  m.def(
      "softmax_distribution",
      [](const std::vector<double>& cum, double eta) { return softmax_distribution(cum, eta); },
      py::arg("cum_est_loss"), py::arg("eta"));
  m.def(
      "theorem1_bound",
      [](int n, int m_, Round t, double eta_prime, double delivered_delay_sum, std::int64_t omega) {
        BoundInputs in;
        in.num_arms = n;
        in.num_users = m_;
        in.horizon = t;
        in.eta_prime = eta_prime;
        in.delivered_delay_sum = delivered_delay_sum;
        in.omega_count = omega;
        in.full_delay_sum = delivered_delay_sum;
        return theorem1_bound(in);
      },
      py::arg("num_arms"), py::arg("num_users"), py::arg("horizon"), py::arg("eta_prime"),
      py::arg("delivered_delay_sum"), py::arg("omega_count") = 0);
  m.def("theorem2_bound", &theorem2_bound, py::arg("num_arms"), py::arg("num_users"), py::arg("horizon"),
        py::arg("full_delay_sum"));
  m.def("truncated_gaussian_mean", &truncated_gaussian_mean, py::arg("mean"), py::arg("stddev"),
        py::arg("lo") = kLossLo, py::arg("hi") = kLossHi);
  m.def("uniform_segment_starts", &uniform_segment_starts, py::arg("horizon"), py::arg("segments"));

  // --- environment ------------------------------------------------------------
  py::class_<SegmentedLossSpec>(m, "LossSpec")
      .def_readonly("num_arms", &SegmentedLossSpec::num_arms)
      .def_readonly("num_users", &SegmentedLossSpec::num_users)
      .def_readonly("horizon", &SegmentedLossSpec::horizon)
      .def_readonly("segment_starts", &SegmentedLossSpec::segment_starts)
      .def("segment_of", &SegmentedLossSpec::segment_of, py::arg("t"))
      .def("mean", [](const SegmentedLossSpec& s, int arm, int seg) { return s.at(arm, seg).mean; })
      .def("stddev", [](const SegmentedLossSpec& s, int arm, int seg) { return s.at(arm, seg).stddev; })
      .def("expected_loss", [](const SegmentedLossSpec& s, Round t, int arm) { return expected_loss(s, t, arm); })
      .def("dump", &dump_loss_spec);
  m.def("build_adversarial_env", &build_adversarial_env, py::arg("num_arms"), py::arg("num_users"),
        py::arg("horizon"), py::arg("tran_num"), py::arg("seed"));

  py::class_<LossRealization, std::shared_ptr<LossRealization>>(m, "LossRealization")
      .def(py::init<SegmentedLossSpec, std::uint64_t>(), py::arg("spec"), py::arg("seed"))
      .def("loss", &LossRealization::loss, py::arg("t"), py::arg("arm"), py::arg("user"))
      .def("group_loss", &LossRealization::group_loss, py::arg("t"), py::arg("arm"))
      .def_property_readonly("horizon", &LossRealization::horizon)
      .def_property_readonly("num_arms", &LossRealization::num_arms)
      .def_property_readonly("num_users", &LossRealization::num_users);

  py::class_<DelaySchedule>(m, "DelaySchedule")
      .def(py::init<int, Round, int, std::vector<int>>(), py::arg("num_users"), py::arg("horizon"),
           py::arg("d_max"), py::arg("table"))
      .def("delay", &DelaySchedule::delay, py::arg("t"), py::arg("user"))
      .def("full_sum", &DelaySchedule::full_sum)
      .def("delivered_sum", &DelaySchedule::delivered_sum)
      .def("undelivered_count", &DelaySchedule::undelivered_count)
      .def_property_readonly("d_max", &DelaySchedule::d_max);
  m.def("uniform_delays", &build_delay_schedule, py::arg("num_users"), py::arg("horizon"), py::arg("d_max"),
        py::arg("seed"));
  m.def("constant_delays", &build_constant_delays, py::arg("num_users"), py::arg("horizon"), py::arg("delay"));

  // --- simulation ------------------------------------------------------------------
  m.def(
      "run_episode",
      [](const std::string& policy, const LossRealization& losses, const DelaySchedule& delays,
         std::uint64_t seed, double eta, double delta, int arm) {
        auto p = policy_by_name(policy, losses.num_arms(), losses.num_users(), eta, delta, arm);
        RunTrace trace = run_episode(*p, losses, delays, losses.horizon(), seed);
        attach_regret_curves(trace, RegretReference::build(losses, true));
        return trace_to_dict(trace);
      },
      py::arg("policy"), py::arg("losses"), py::arg("delays"), py::arg("seed") = 0, py::arg("eta") = 0.01,
      py::arg("delta") = 0.0, py::arg("arm") = 0);

  m.def(
      "amud_epoch_checks",
      [](const LossRealization& losses, const DelaySchedule& delays, std::uint64_t seed) {
        AmudExp3 policy(losses.num_arms(), losses.num_users());
        const RunTrace trace = run_episode(policy, losses, delays, losses.horizon(), seed);
        const EpochLog log = build_epoch_log(trace, delays);
        py::dict out;
        for (const auto& report : {check_lemma5(log, losses.num_users()), check_lemma6(log, losses.num_users()),
                                   check_lemma7(log, delays.full_sum(), losses.num_users(), losses.horizon())}) {
          out[py::str(report.name)] = report.passed();
        }
        return out;
      },
      py::arg("losses"), py::arg("delays"), py::arg("seed") = 0);

  // --- harness --------------------------------------------------------------------
  m.def("known_policies", &known_policy_names);
  m.def(
      "run_config",
      [](const std::string& yaml_text, const std::string& output_dir, bool write_trace) {
        ExperimentConfig config = parse_config(yaml_text);
        if (!output_dir.empty()) config.output_dir = output_dir;
        RunOptions options;
        options.write_trace = write_trace;
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(config, options);
        }
        py::list rows;
        for (const auto& p : result.policies) rows.append(summary_to_dict(p.summary));
        py::dict out;
        out["summary"] = rows;
        out["trace_csv"] = result.trace_csv;
        out["summary_csv"] = result.summary_csv;
        out["plots"] = result.plots;
        out["config_hash"] = config.hash();
        return out;
      },
      py::arg("config_yaml"), py::arg("output_dir") = "", py::arg("write_trace") = true);
  m.def(
      "config_defaults",
      [](const std::string& yaml_text) { return dump_config(parse_config(yaml_text)); },
      py::arg("config_yaml") = "{}");
  m.def(
      "emit_plot",
      [](const std::vector<std::string>& traces, const std::string& metric, const std::string& out,
         const std::string& title) { emit_plot(traces, metric_from_string(metric), out, title); },
      py::arg("trace_csvs"), py::arg("metric"), py::arg("out_path"), py::arg("title") = "");
}

/* SPDX-License-Identifier: Apache-2.0 */
// Command-line front end; links only the public C API.

#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "retrace/retrace.h"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitBudget = 2;

int exit_code_for(rt_status s) {
  if (s == RT_OK) return 0;
  if (s == RT_ERR_BUDGET) return kExitBudget;
  return kExitUsage;
}

int report(rt_status s) {
  if (s != RT_OK) std::fprintf(stderr, "error: %s\n", rt_last_error());
  return exit_code_for(s);
}

struct TablePtr {
  rt_tau_table* p = rt_tau_table_new();
  ~TablePtr() { rt_tau_table_free(p); }
};

struct CurvePtr {
  rt_curve* p = nullptr;
  ~CurvePtr() { rt_curve_free(p); }
};

bool make_curve(CurvePtr& out, const std::string& name,
                const rt_tau_table* table, unsigned n_max) {
  if (name == "gamma") out.p = rt_curve_new_constructed(table, n_max);
  else if (name == "straightened") out.p = rt_curve_new_straightened(table, n_max);
  else out.p = rt_curve_new_builtin(name.c_str());
  if (!out.p) std::fprintf(stderr, "error: %s\n", rt_last_error());
  return out.p != nullptr;
}

int stdout_sink(void*, const char* data, size_t len) {
  return std::fwrite(data, 1, len, stdout) == len ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "retrace: certified evaluation, length bounds, retracing detection and "
      "constant-speed reparametrization of plane curves"};
  app.require_subcommand(1);

  std::string tau_path, curve_name = "gamma", t_str, x_str, format = "csv";
  unsigned n_max = 0;
  int precision = 20, samples = 1000, k = 10;
  unsigned det_n = 1, det_m = 1;
  std::uint64_t max_steps = 1ull << 22;
  int stride_bits = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tau-table", tau_path, "step-count table file");
    cmd->add_option("--curve", curve_name,
                    "segment | halfcircle | triangle-wave | gamma | "
                    "straightened");
    cmd->add_option("--n-max", n_max, "segment cutoff (gamma curves)");
  };

  CLI::App* eval = app.add_subcommand("eval", "position enclosure at t");
  eval->add_option("--t", t_str, "parameter in [0,1]")->required();
  eval->add_option("--precision", precision, "output precision bits");
  add_common(eval);

  CLI::App* trace = app.add_subcommand("trace", "sampled curve as CSV or SVG");
  trace->add_option("--samples", samples, "sample count (>= 2)");
  trace->add_option("--precision", precision, "per-sample precision bits");
  trace->add_option("--format", format, "csv | svg");
  add_common(trace);

  CLI::App* length =
      app.add_subcommand("length", "certified lower-bound length table");
  length->add_option("--precision", precision, "max precision r")->required();
  add_common(length);

  CLI::App* reparam =
      app.add_subcommand("reparam", "constant-speed parametrization point");
  reparam->add_option("--x", x_str, "arclength fraction in [0,1]")->required();
  reparam->add_option("--k", k, "output precision bits");
  add_common(reparam);

  CLI::App* detect =
      app.add_subcommand("detect", "marker-scan decision for segment n");
  detect->add_option("--n", det_n, "segment index")->required();
  detect->add_option("--m", det_m, "retracing bound")->required();
  detect->add_option("--max-steps", max_steps, "probe budget");
  detect->add_option("--stride-bits", stride_bits,
                     "fix the scan stride to 2^-bits (coarse modulus)");
  add_common(detect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  TablePtr table;
  if (!tau_path.empty()) {
    rt_status s = rt_tau_table_load(table.p, tau_path.c_str());
    if (s != RT_OK) return report(s);
  }
  CurvePtr curve;
  char buf[4096];

  if (eval->parsed()) {
    if (!make_curve(curve, curve_name, table.p, n_max)) return kExitUsage;
    rt_status s =
        rt_curve_eval(curve.p, t_str.c_str(), precision, buf, sizeof buf);
    if (s != RT_OK) return report(s);
    std::printf("%s\n", buf);
    return 0;
  }
  if (trace->parsed()) {
    if (!make_curve(curve, curve_name, table.p, n_max)) return kExitUsage;
    rt_status s = rt_curve_trace(curve.p, samples, precision, format.c_str(),
                                 stdout_sink, nullptr);
    return report(s);
  }
  if (length->parsed()) {
    if (!make_curve(curve, curve_name, table.p, n_max)) return kExitUsage;
    for (int r = 1; r <= precision; ++r) {
      rt_status s = rt_length_estimate(curve.p, r, buf, sizeof buf);
      if (s != RT_OK) return report(s);
      std::printf("%s\n", buf);
    }
    return 0;
  }
  if (reparam->parsed()) {
    if (!make_curve(curve, curve_name, table.p, n_max)) return kExitUsage;
    rt_status s = rt_reparam_point(curve.p, k, x_str.c_str(), buf, sizeof buf);
    if (s != RT_OK) return report(s);
    std::printf("%s\n", buf);
    return 0;
  }
  if (detect->parsed()) {
    if (!make_curve(curve, curve_name, table.p, n_max)) return kExitUsage;
    int verdict = 0;
    rt_status s = rt_detect(curve.p, table.p, det_n, det_m, stride_bits,
                            max_steps, &verdict);
    if (s != RT_OK) return report(s);
    std::printf("%s\n", verdict ? "ACCEPT" : "REJECT");
    return verdict ? 0 : 1;
  }
  return kExitUsage;
}

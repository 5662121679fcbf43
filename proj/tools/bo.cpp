// bo: run Bayesian-optimization experiments and check their regret
// instrumentation against the closed-form bounds.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bogp/config.hpp"
#include "bogp/diagnostics.hpp"
#include "bogp/harness.hpp"
#include "bogp/serialize.hpp"
#include "bogp/trace_io.hpp"

using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool force = false;
  int jobs = 1;
};

int cmd_run(const std::string& config_path, const GlobalOpts& g,
            const std::string& json_path) {
  bogp::ExperimentPlan plan = bogp::parse_config_file(config_path);
  if (g.seed_set) plan.base.seed = g.seed;
  bogp::RunConfig rc = plan.base;
  bogp::Objective obj = bogp::make_objective(plan, rc);
  bogp::resolve_objective_dependent(plan, rc, obj);
  const bogp::Trace trace = bogp::run(rc, obj);
  const std::string out = g.out.empty() ? "trace.csv" : g.out;
  if (!g.force && std::filesystem::exists(out))
    throw bogp::ConfigError("refusing to overwrite '" + out + "' (use --force)");
  bogp::write_text_file(out, bogp::trace_to_csv(trace));
  const json summary = bogp::summarize(plan, rc, trace, obj);
  if (!json_path.empty()) bogp::write_text_file(json_path, summary.dump(2) + "\n");
  std::printf("records=%zu final_y_plus=%s R_T=%s -> %s\n", trace.records.size(),
              bogp::format_double(trace.final_y_plus()).c_str(),
              bogp::format_double(trace.records.empty()
                                      ? 0.0
                                      : trace.records.back().cum_regret)
                  .c_str(),
              out.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, const GlobalOpts& g) {
  bogp::ExperimentPlan plan = bogp::parse_config_file(config_path);
  const std::string out = g.out.empty() ? "sweep_out" : g.out;
  const bogp::PlanOutcome outcome = bogp::run_plan(plan, out, g.force, g.jobs);
  std::printf("cells=%d failures=%d -> %s/aggregate.json\n", outcome.cells,
              outcome.failures, out.c_str());
  return outcome.failures == 0 ? 0 : 1;
}

int cmd_check_bounds(const std::string& trace_path, const std::string& config_path,
                     const GlobalOpts& g) {
  bogp::ExperimentPlan plan = bogp::parse_config_file(config_path);
  bogp::RunConfig rc = plan.base;
  bogp::Objective obj = bogp::make_objective(plan, rc);
  bogp::resolve_objective_dependent(plan, rc, obj);

  bogp::Trace trace;
  trace.records = bogp::read_trace_csv(trace_path);
  trace.kind = rc.acq.kind;
  trace.regret = rc.active_regret();
  trace.T0 = rc.T0;
  trace.negated_surrogate =
      rc.acq.kind == bogp::AcqKind::ucb || rc.acq.kind == bogp::AcqKind::ts;
  trace.f_star = obj.f_star;

  const bogp::ScheduleParams params = rc.schedule_params();
  const int T = static_cast<int>(trace.records.size());
  const long grid = std::max<long>(256, 4L * T);
  const bogp::GammaSeries gamma =
      bogp::gamma_greedy(rc.kernel, rc.problem.domain, rc.sigma, std::max(1, T), grid);

  json rep;
  rep["trace"] = trace_path;
  rep["records"] = T;
  rep["gamma_hat"] = gamma.total;
  rep["info_gain_run"] = bogp::info_gain(trace, rc.sigma).total;
  {
    const auto u = bogp::bound_ucb(trace, params, gamma);
    rep["ucb"] = {{"lhs", u.lhs},
                  {"rhs", u.rhs},
                  {"satisfied", u.satisfied},
                  {"rhs_info_gain", u.rhs_info_gain},
                  {"satisfied_info_gain", u.satisfied_info_gain},
                  {"beta_T", u.beta_T}};
  }
  {
    const double theta =
        rc.acq.theta_mode == bogp::ThetaMode::fixed
            ? rc.acq.theta
            : bogp::vei_schedule(params, std::max(1, T), rc.vei_log_term).theta_min;
    const auto v = bogp::bound_vei(trace, params, rc.acq.alpha, theta, gamma,
                                   rc.vei_log_term);
    rep["vei"] = {{"lhs", v.lhs},
                  {"rhs", v.rhs},
                  {"satisfied", v.satisfied},
                  {"rhs_with_theta", v.rhs_with_theta},
                  {"satisfied_with_theta", v.satisfied_with_theta},
                  {"beta_T", v.beta_T}};
  }
  if (!obj.minimizers.empty()) {
    const auto e = bogp::ei_bound_report(trace, params, rc.kernel,
                                         obj.minimizers.front(), gamma);
    rep["ei"] = {{"lhs", e.lhs},
                 {"rhs", e.rhs},
                 {"satisfied", e.satisfied},
                 {"star_term", e.star_term},
                 {"m_h", e.m_h}};
  }
  const std::string text = rep.dump(2) + "\n";
  if (!g.out.empty()) bogp::write_text_file(g.out, text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

int cmd_check_constants(double c1, double c2, double w, double alpha,
                        double beta_sqrt, int samples, const GlobalOpts& g) {
  bogp::ConvergenceConstants cc;
  cc.c1 = c1;
  cc.c2 = c2;
  cc.w = w;
  cc.alpha = alpha;
  cc.beta_sqrt = beta_sqrt;
  const bogp::ConstantsReport rep = bogp::check_ei_constants(cc, samples);
  json j = {{"c1", c1},
            {"c2", c2},
            {"c3", cc.c3()},
            {"w", w},
            {"alpha", alpha},
            {"beta_sqrt", beta_sqrt},
            {"a_ok", rep.a_ok},
            {"a_proof_ok", rep.a_proof_ok},
            {"b_ok", rep.b_ok},
            {"c_ok", rep.c_ok},
            {"d_ok", rep.d_ok},
            {"margins",
             {{"a", rep.a_margin},
              {"a_proof", rep.a_proof_margin},
              {"b", rep.b_margin},
              {"c", rep.c_margin},
              {"d", rep.d_margin}}},
            {"all_ok_proof_a", rep.all_ok(true)},
            {"all_ok_stated_a", rep.all_ok(false)}};
  const std::string text = j.dump(2) + "\n";
  if (!g.out.empty()) bogp::write_text_file(g.out, text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

int cmd_estimate_gamma(const std::string& kernel, double lengthscale, double sigma,
                       int T, long grid, int d, double r, const GlobalOpts& g) {
  bogp::KernelSpec ks{bogp::kernel_family_from_string(kernel), lengthscale};
  bogp::BoxDomain box{d, r, 1.0};
  const bogp::GammaSeries series = bogp::gamma_greedy(ks, box, sigma, T, grid);
  std::printf("gamma_hat=%s grid=%ld\n", bogp::format_double(series.total).c_str(),
              series.grid_size);
  if (!g.out.empty()) {
    std::string csv = "T,gamma_hat\n";
    double acc = 0.0;
    for (std::size_t i = 0; i < series.per_term.size(); ++i) {
      acc += series.per_term[i];
      csv += std::to_string(i + 1) + "," + bogp::format_double(acc) + "\n";
    }
    bogp::write_text_file(g.out, csv);
  }
  return 0;
}

int cmd_gen_objective(const std::string& kind, const std::string& name,
                      const std::string& kernel, double lengthscale, int d, double r,
                      int centers, double B, long axis_points, const GlobalOpts& g) {
  bogp::KernelSpec ks{bogp::kernel_family_from_string(kernel), lengthscale};
  bogp::BoxDomain box{d, r, 1.0};
  const std::uint64_t seed = g.seed_set ? g.seed : 1;
  json j;
  if (kind == "rkhs") {
    j = bogp::make_rkhs(ks, box, centers, B, seed).to_json();
  } else if (kind == "gp") {
    j = bogp::make_gp_prior(ks, box, axis_points, seed).to_json();
  } else if (kind == "benchmark") {
    j = {{"kind", "benchmark"}, {"name", name}};
  } else {
    throw bogp::ConfigError("gen-objective: unknown kind '" + kind + "'");
  }
  const std::string out = g.out.empty() ? "fn.json" : g.out;
  bogp::write_text_file(out, j.dump(2) + "\n");
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_coverage(const std::string& kind, int n, double delta, double B,
                 double sigma, double sigma_eps, const std::string& kernel,
                 double lengthscale, int d, double r, const GlobalOpts& g) {
  bogp::CoverageParams cp;
  cp.kernel = {bogp::kernel_family_from_string(kernel), lengthscale};
  cp.domain = {d, r, 1.0};
  cp.B = B;
  cp.delta = delta;
  cp.sigma = sigma;
  cp.sigma_eps = sigma_eps;
  cp.seed = g.seed_set ? g.seed : 1;
  const bogp::CoverageReport rep =
      bogp::coverage_test(bogp::coverage_kind_from_string(kind), n, cp);
  json j = {{"kind", kind},
            {"replications", rep.replications},
            {"violations", rep.violations},
            {"rate", rep.rate},
            {"ci99_halfwidth", rep.ci99_halfwidth},
            {"delta", rep.delta},
            {"within_guarantee", rep.rate <= rep.delta + rep.ci99_halfwidth}};
  const std::string text = j.dump(2) + "\n";
  if (!g.out.empty()) bogp::write_text_file(g.out, text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization with regret instrumentation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "override the master seed")
      ->each([&g](const std::string&) { g.seed_set = true; });
  app.add_option("--out", g.out, "output file or directory");
  app.add_flag("--force", g.force, "overwrite existing outputs");
  app.add_option("--jobs", g.jobs, "parallel sweep cells");

  std::string config_path, json_path, trace_path;
  auto* run = app.add_subcommand("run", "run one configuration");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--json", json_path, "also write a summary JSON");

  auto* sweep = app.add_subcommand("sweep", "run every sweep cell");
  sweep->add_option("--config", config_path, "config file")->required();

  auto* chk = app.add_subcommand("check-bounds", "evaluate regret bounds on a trace");
  chk->add_option("--trace", trace_path, "trace csv")->required();
  chk->add_option("--config", config_path, "config file")->required();

  double c1 = 100, c2 = 0, w = 2, alpha = 1, beta_sqrt = 0;
  int samples = 10000;
  auto* cc = app.add_subcommand("check-constants", "convergence-constants report");
  cc->add_option("--c1", c1)->required();
  cc->add_option("--c2", c2)->required();
  cc->add_option("--w", w)->required();
  cc->add_option("--alpha", alpha);
  cc->add_option("--beta-sqrt", beta_sqrt);
  cc->add_option("--samples", samples);

  std::string kernel = "se", obj_kind = "rkhs", obj_name = "quadratic_bowl",
              cov_kind = "pointwise_error";
  double lengthscale = 0.2, sigma = 0.1, r = 1.0, B = 2.0, delta = 0.2,
         sigma_eps = 0.1;
  int T = 100, d = 1, centers = 12, n = 500;
  long grid = 1024, axis_points = 33;
  auto* eg = app.add_subcommand("estimate-gamma", "greedy information-gain estimate");
  eg->add_option("--kernel", kernel);
  eg->add_option("--lengthscale", lengthscale);
  eg->add_option("--sigma", sigma)->required();
  eg->add_option("--T", T)->required();
  eg->add_option("--grid", grid);
  eg->add_option("--d", d);
  eg->add_option("--r", r);

  auto* go = app.add_subcommand("gen-objective", "serialize a synthetic objective");
  go->add_option("--kind", obj_kind)->required();
  go->add_option("--name", obj_name);
  go->add_option("--kernel", kernel);
  go->add_option("--lengthscale", lengthscale);
  go->add_option("--d", d);
  go->add_option("--r", r);
  go->add_option("--centers", centers);
  go->add_option("--B", B);
  go->add_option("--axis-points", axis_points);

  auto* cov = app.add_subcommand("coverage", "statistical coverage of error bounds");
  cov->add_option("--kind", cov_kind);
  cov->add_option("--n", n)->required();
  cov->add_option("--delta", delta);
  cov->add_option("--B", B);
  cov->add_option("--sigma", sigma);
  cov->add_option("--sigma-eps", sigma_eps);
  cov->add_option("--kernel", kernel);
  cov->add_option("--lengthscale", lengthscale);
  cov->add_option("--d", d);
  cov->add_option("--r", r);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, g, json_path);
    if (sweep->parsed()) return cmd_sweep(config_path, g);
    if (chk->parsed()) return cmd_check_bounds(trace_path, config_path, g);
    if (cc->parsed()) return cmd_check_constants(c1, c2, w, alpha, beta_sqrt, samples, g);
    if (eg->parsed())
      return cmd_estimate_gamma(kernel, lengthscale, sigma, T, grid, d, r, g);
    if (go->parsed())
      return cmd_gen_objective(obj_kind, obj_name, kernel, lengthscale, d, r,
                               centers, B, axis_points, g);
    if (cov->parsed())
      return cmd_coverage(cov_kind, n, delta, B, sigma, sigma_eps, kernel,
                          lengthscale, d, r, g);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}

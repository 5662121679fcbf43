#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bogp/config.hpp"
#include "bogp/diagnostics.hpp"
#include "bogp/serialize.hpp"
#include "bogp/trace_io.hpp"

namespace bogp {

enum class LogLevel { error = 0, info = 1, debug = 2 };

inline LogLevel log_level() {
  const char* env = std::getenv("BO_REGRET_LOG");
  if (!env) return LogLevel::error;
  const std::string v = env;
  if (v == "debug") return LogLevel::debug;
  if (v == "info") return LogLevel::info;
  return LogLevel::error;
}

inline void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(log_level()))
    std::fprintf(stderr, "[bo] %s\n", msg.c_str());
}

// Instantiate the objective a given run will optimize.  Synthetic instances
// (rkhs, gp) are derived per run seed unless objective.per_seed is off, so
// replication sweeps sample fresh functions.
inline Objective make_objective(const ExperimentPlan& plan, const RunConfig& rc) {
  const ObjectiveConfig& oc = plan.objective;
  const BoxDomain& box = rc.problem.domain;
  const std::uint64_t oseed =
      oc.per_seed ? mix_seed(oc.seed, rc.seed) : oc.seed;
  switch (oc.kind) {
    case ObjectiveKind::benchmark:
      return benchmark(oc.name, box);
    case ObjectiveKind::rkhs:
      return make_rkhs(rc.kernel, box, oc.centers, rc.problem.B, oseed)
          .objective(box, oseed);
    case ObjectiveKind::gp:
      return make_gp_prior(rc.kernel, box, oc.axis_points, oseed).objective(oseed);
    case ObjectiveKind::file: {
      std::ifstream in(oc.path);
      if (!in) throw ConfigError("cannot open objective file '" + oc.path + "'");
      nlohmann::json j;
      in >> j;
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "rkhs") return RkhsFunction::from_json(j).objective(box, oc.seed);
      if (kind == "gp") return GpPriorFunction::from_json(j).objective(oc.seed);
      if (kind == "benchmark")
        return benchmark(j.at("name").get<std::string>(), box);
      throw ConfigError("objective file: unknown kind '" + kind + "'");
    }
  }
  throw ConfigError("objective.kind: unresolved");
}

// Fill config slots that default to objective ground truth.
inline void resolve_objective_dependent(const ExperimentPlan& plan, RunConfig& rc,
                                        const Objective& obj) {
  if (!plan.lipschitz_given && obj.lipschitz > 0.0)
    rc.problem.domain.lipschitz = obj.lipschitz;
}

inline nlohmann::json config_echo(const ExperimentPlan& plan, const RunConfig& rc) {
  nlohmann::json j;
  std::istringstream in(to_config_string(plan));
  for (const auto& [k, v] : parse_key_values(in)) j[k] = v;
  j["acq.kind"] = to_string(rc.acq.kind);
  j["run.T"] = std::to_string(rc.T);
  j["run.seed"] = std::to_string(rc.seed);
  j["schedule.delta"] = format_double(rc.problem.delta);
  j["lipschitz"] = format_double(rc.problem.domain.lipschitz);
  j["regret.definition"] = to_string(rc.active_regret());
  return j;
}

struct CellResult {
  std::string name;
  RunConfig config;
  Trace trace;
  nlohmann::json summary;
  bool bound_satisfied = false;
  bool bound_defined = false;
};

inline nlohmann::json summarize(const ExperimentPlan& plan, const RunConfig& rc,
                                const Trace& trace, const Objective& obj) {
  nlohmann::json s;
  s["config"] = config_echo(plan, rc);
  s["records"] = trace.records.size();
  s["final_y_plus"] = trace.final_y_plus();
  s["f_star"] = obj.f_star;
  s["regret"] = {{"standard", trace.cumulative(RegretDef::standard_max)},
                 {"asymptotic", trace.cumulative(RegretDef::asymptotic)},
                 {"improvement", trace.cumulative(RegretDef::improvement)},
                 {"active", to_string(trace.regret)},
                 {"active_total", trace.records.empty()
                                      ? 0.0
                                      : trace.records.back().cum_regret}};
  const ScheduleParams params = rc.schedule_params();
  const InfoGainSeries ig = info_gain(trace, rc.sigma);
  s["info_gain_run"] = ig.total;

  const int T = static_cast<int>(trace.records.size());
  const long grid = std::max<long>(256, 4L * T);
  const GammaSeries gamma = gamma_greedy(rc.kernel, rc.problem.domain, rc.sigma,
                                         std::max(1, T), grid);
  s["gamma_hat"] = gamma.total;
  s["gamma_grid"] = gamma.grid_size;

  bool any_cap = false, any_chunk = false;
  for (const auto& recd : trace.records) {
    any_cap = any_cap || recd.flags.find("grid_cap") != std::string::npos;
    any_chunk = any_chunk || recd.flags.find("ts_chunked") != std::string::npos;
  }
  s["flags"] = {{"grid_cap_hit", any_cap}, {"ts_chunked", any_chunk}};

  if (rc.acq.kind == AcqKind::ucb) {
    const UcbBoundReport rep = bound_ucb(trace, params, gamma);
    s["bound"] = {{"kind", "ucb"},        {"lhs", rep.lhs},
                  {"rhs", rep.rhs},       {"satisfied", rep.satisfied},
                  {"beta_T", rep.beta_T}, {"rhs_info_gain", rep.rhs_info_gain},
                  {"satisfied_info_gain", rep.satisfied_info_gain}};
  } else if (rc.acq.kind == AcqKind::vei) {
    const double theta = rc.acq.theta_mode == ThetaMode::fixed
                             ? rc.acq.theta
                             : vei_schedule(params, std::max(1, T), rc.vei_log_term)
                                   .theta_min;
    const VeiBoundReport rep =
        bound_vei(trace, params, rc.acq.alpha, theta, gamma, rc.vei_log_term);
    s["bound"] = {{"kind", "vei"},
                  {"lhs", rep.lhs},
                  {"rhs", rep.rhs},
                  {"satisfied", rep.satisfied},
                  {"rhs_with_theta", rep.rhs_with_theta},
                  {"satisfied_with_theta", rep.satisfied_with_theta},
                  {"beta_T", rep.beta_T}};
  } else if (rc.acq.kind == AcqKind::ei && !obj.minimizers.empty()) {
    const EiBoundReport rep = ei_bound_report(trace, params, rc.kernel,
                                              obj.minimizers.front(), gamma);
    s["bound"] = {{"kind", "ei"},           {"lhs", rep.lhs},
                  {"rhs", rep.rhs},         {"satisfied", rep.satisfied},
                  {"star_term", rep.star_term}, {"m_h", rep.m_h}};
  }
  return s;
}

inline CellResult run_cell(const ExperimentPlan& plan, AcqKind algo,
                           std::uint64_t seed, int T, double delta) {
  RunConfig rc = plan.base;
  rc.acq.kind = algo;
  rc.seed = seed;
  rc.T = T;
  rc.problem.delta = delta;
  Objective obj = make_objective(plan, rc);
  resolve_objective_dependent(plan, rc, obj);
  CellResult cell;
  cell.config = rc;
  cell.trace = run(rc, obj);
  cell.summary = summarize(plan, rc, cell.trace, obj);
  if (cell.summary.contains("bound")) {
    cell.bound_defined = true;
    cell.bound_satisfied = cell.summary["bound"]["satisfied"].get<bool>();
  }
  return cell;
}

inline std::string cell_file_stem(const ExperimentPlan& plan, AcqKind algo,
                                  std::uint64_t seed, int T, double delta) {
  std::string stem = to_string(algo) + "_" + std::to_string(seed) + "_" +
                     std::to_string(T);
  if (plan.deltas.size() > 1) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_delta%g", delta);
    stem += buf;
  }
  return stem;
}

struct PlanOutcome {
  int cells = 0;
  int failures = 0;
  nlohmann::json aggregate;
};

// Runs every sweep cell, writing {stem}.csv and {stem}.json per cell plus an
// aggregate.json.  Cells are independent; --jobs only parallelizes across
// them, so outputs are identical at any parallelism width.
inline PlanOutcome run_plan(const ExperimentPlan& plan, const std::string& out_dir,
                            bool force, int jobs = 1) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  struct Cell {
    AcqKind algo;
    std::uint64_t seed;
    int T;
    double delta;
    std::string stem;
  };
  std::vector<Cell> cells;
  for (AcqKind algo : plan.cell_algorithms())
    for (double delta : plan.cell_deltas())
      for (int T : plan.cell_horizons())
        for (std::uint64_t seed : plan.cell_seeds())
          cells.push_back({algo, seed, T, delta,
                           cell_file_stem(plan, algo, seed, T, delta)});

  if (!force) {
    for (const auto& c : cells) {
      const fs::path p = fs::path(out_dir) / (c.stem + ".csv");
      if (fs::exists(p))
        throw ConfigError("refusing to overwrite '" + p.string() +
                          "' (use --force)");
    }
  }

  std::vector<nlohmann::json> results(cells.size());
  std::vector<std::string> errors(cells.size());
  std::mutex io_mutex;
  std::size_t next = 0;

  auto worker = [&]() {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (next >= cells.size()) return;
        i = next++;
      }
      const Cell& c = cells[i];
      try {
        CellResult cr = run_cell(plan, c.algo, c.seed, c.T, c.delta);
        const fs::path base = fs::path(out_dir) / c.stem;
        write_text_file(base.string() + ".csv", trace_to_csv(cr.trace));
        write_text_file(base.string() + ".json", cr.summary.dump(2) + "\n");
        nlohmann::json r;
        r["cell"] = c.stem;
        r["algorithm"] = to_string(c.algo);
        r["R_T"] = cr.trace.records.empty() ? 0.0
                                            : cr.trace.records.back().cum_regret;
        r["final_y_plus"] = cr.trace.final_y_plus();
        r["bound_defined"] = cr.bound_defined;
        r["bound_satisfied"] = cr.bound_satisfied;
        results[i] = std::move(r);
        log(LogLevel::info, "cell " + c.stem + " done");
      } catch (const std::exception& e) {
        errors[i] = e.what();
        log(LogLevel::error, "cell " + c.stem + " failed: " + e.what());
      }
    }
  };

  const int width = std::max(1, jobs);
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < width; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  PlanOutcome outcome;
  outcome.cells = static_cast<int>(cells.size());
  nlohmann::json agg;
  agg["cells"] = cells.size();
  nlohmann::json per_algo = nlohmann::json::object();
  for (AcqKind algo : plan.cell_algorithms()) {
    std::vector<double> regrets;
    int satisfied = 0, defined = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].algo != algo || !errors[i].empty()) continue;
      regrets.push_back(results[i]["R_T"].get<double>());
      if (results[i]["bound_defined"].get<bool>()) {
        ++defined;
        if (results[i]["bound_satisfied"].get<bool>()) ++satisfied;
      }
    }
    nlohmann::json a;
    a["runs"] = regrets.size();
    if (!regrets.empty()) {
      std::vector<double> sorted = regrets;
      std::sort(sorted.begin(), sorted.end());
      double mean = 0;
      for (double v : regrets) mean += v;
      mean /= double(regrets.size());
      a["mean_R_T"] = mean;
      a["median_R_T"] = sorted[sorted.size() / 2];
    }
    if (defined > 0) a["bound_satisfaction_rate"] = double(satisfied) / defined;
    per_algo[to_string(algo)] = a;
  }
  agg["per_algorithm"] = per_algo;
  nlohmann::json cell_list = nlohmann::json::array();
  nlohmann::json error_list = nlohmann::json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (errors[i].empty()) {
      cell_list.push_back(results[i]);
    } else {
      ++outcome.failures;
      error_list.push_back({{"cell", cells[i].stem}, {"error", errors[i]}});
    }
  }
  agg["results"] = cell_list;
  agg["errors"] = error_list;
  outcome.aggregate = agg;
  write_text_file((fs::path(out_dir) / "aggregate.json").string(),
                  agg.dump(2) + "\n");
  return outcome;
}

}  // namespace bogp

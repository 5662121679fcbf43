#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bogp/config.hpp"
#include "bogp/harness.hpp"

using namespace bogp;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig =
    "kernel.family = se\n"
    "domain.d = 1\n"
    "domain.r = 1\n"
    "acq.kind = ucb\n"
    "run.T = 10\n"
    "run.seed = 1\n";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("bogp_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("minimal config parses with documented defaults") {
  const ExperimentPlan plan = parse_config_string(kMinimalConfig);
  CHECK(plan.base.problem.domain.d == 1);
  CHECK(plan.base.kernel.lengthscale == doctest::Approx(0.2));  // 0.2 r
  CHECK(plan.base.acq.kind == AcqKind::ucb);
  CHECK(plan.base.T == 10);
  CHECK(plan.base.T0 == 1);
  CHECK(plan.base.sigma == doctest::Approx(0.1));
  CHECK(plan.base.problem.sigma_eps == plan.base.sigma);
  CHECK(plan.base.grid_cap == 200000);
  CHECK(plan.objective.kind == ObjectiveKind::benchmark);
  CHECK(plan.cell_count() == 1);
}

TEST_CASE("unknown keys are hard errors") {
  CHECK_THROWS_WITH_AS(
      parse_config_string(std::string(kMinimalConfig) + "acq.kinde = ucb\n"),
      doctest::Contains("acq.kinde"), ConfigError);
}

TEST_CASE("missing required keys are named") {
  CHECK_THROWS_WITH_AS(parse_config_string("domain.d = 1\ndomain.r = 1\n"
                                           "run.T = 5\nrun.seed = 1\n"),
                       doctest::Contains("acq.kind"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_string("domain.d = 1\ndomain.r = 1\n"
                                           "acq.kind = ucb\nrun.T = 5\n"),
                       doctest::Contains("run.seed"), ConfigError);
}

TEST_CASE("type and range errors name the key") {
  CHECK_THROWS_WITH_AS(
      parse_config_string(std::string(kMinimalConfig) + "schedule.delta = two\n"),
      doctest::Contains("schedule.delta"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_string("kernel.family = se\ndomain.d = 0\ndomain.r = 1\n"
                          "acq.kind = ucb\nrun.T = 10\nrun.seed = 1\n"),
      doctest::Contains("domain.d"), ConfigError);
}

TEST_CASE("vei with fixed theta requires acq.theta") {
  const std::string base =
      "domain.d = 1\ndomain.r = 1\nacq.kind = vei\nrun.T = 5\nrun.seed = 1\n"
      "acq.theta_mode = fixed\n";
  CHECK_THROWS_WITH_AS(parse_config_string(base), doctest::Contains("acq.theta"),
                       ConfigError);
  CHECK_NOTHROW(parse_config_string(base + "acq.theta = 2.0\n"));
}

TEST_CASE("sweep cell counting") {
  const ExperimentPlan plan = parse_config_string(
      std::string(kMinimalConfig) +
      "sweep.seeds = 1..100\nsweep.algorithms = ucb,ts\n");
  CHECK(plan.cell_count() == 200);
}

TEST_CASE("config emission round trips") {
  const ExperimentPlan plan = parse_config_string(
      std::string(kMinimalConfig) +
      "sweep.seeds = 3,5,9\nsweep.T = 10,20\nschedule.delta = 0.25\n"
      "objective.kind = rkhs\nobjective.centers = 7\n");
  const ExperimentPlan back = parse_config_string(to_config_string(plan));
  CHECK(plan_equal(plan, back));
  CHECK(to_config_string(back) == to_config_string(plan));
}

TEST_CASE("run_plan emits one file pair per cell plus the aggregate") {
  TempDir tmp;
  ExperimentPlan plan = parse_config_string(kMinimalConfig);
  plan.base.T = 6;
  plan.base.restarts = 4;
  plan.base.local_steps = 10;
  const PlanOutcome outcome = run_plan(plan, tmp.path.string(), false, 1);
  CHECK(outcome.cells == 1);
  CHECK(outcome.failures == 0);
  CHECK(fs::exists(tmp.path / "ucb_1_6.csv"));
  CHECK(fs::exists(tmp.path / "ucb_1_6.json"));
  CHECK(fs::exists(tmp.path / "aggregate.json"));

  // refuses to overwrite without force
  CHECK_THROWS_AS(run_plan(plan, tmp.path.string(), false, 1), ConfigError);
  CHECK_NOTHROW(run_plan(plan, tmp.path.string(), true, 1));
}

TEST_CASE("aggregate matches per-cell summaries recomputed from files") {
  TempDir tmp;
  ExperimentPlan plan = parse_config_string(
      std::string(kMinimalConfig) + "sweep.seeds = 1..4\nobjective.kind = rkhs\n");
  plan.base.T = 6;
  plan.base.restarts = 4;
  plan.base.local_steps = 10;
  const PlanOutcome outcome = run_plan(plan, tmp.path.string(), false, 2);
  CHECK(outcome.cells == 4);
  CHECK(outcome.failures == 0);

  double mean = 0.0;
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto records =
        read_trace_csv((tmp.path / ("ucb_" + std::to_string(seed) + "_6.csv")).string());
    REQUIRE(records.size() == 6);
    mean += records.back().cum_regret;
    // emitted rows satisfy the trace invariants
    double y_plus = std::numeric_limits<double>::infinity();
    for (const auto& rec : records) {
      y_plus = std::min(y_plus, rec.y);
      REQUIRE(rec.y_plus == y_plus);
    }
  }
  mean /= 4.0;
  CHECK(outcome.aggregate["per_algorithm"]["ucb"]["mean_R_T"].get<double>() ==
        doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("parallel cells produce byte-identical outputs") {
  TempDir a, b;
  ExperimentPlan plan = parse_config_string(
      std::string(kMinimalConfig) + "sweep.seeds = 1..3\n");
  plan.base.T = 5;
  plan.base.restarts = 4;
  plan.base.local_steps = 8;
  run_plan(plan, a.path.string(), false, 1);
  run_plan(plan, b.path.string(), false, 3);
  for (std::uint64_t seed : {1, 2, 3}) {
    const std::string name = "ucb_" + std::to_string(seed) + "_5.csv";
    std::ifstream fa(a.path / name), fb(b.path / name);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    REQUIRE(sa.str() == sb.str());
  }
}

TEST_CASE("per-seed synthetic objectives differ across seeds") {
  ExperimentPlan plan = parse_config_string(
      std::string(kMinimalConfig) + "objective.kind = rkhs\n");
  RunConfig rc1 = plan.base;
  rc1.seed = 1;
  RunConfig rc2 = plan.base;
  rc2.seed = 2;
  const Objective o1 = make_objective(plan, rc1);
  const Objective o2 = make_objective(plan, rc2);
  Vector x(1);
  x << 0.37;
  CHECK(o1.f(x) != o2.f(x));

  plan.objective.per_seed = false;
  const Objective o3 = make_objective(plan, rc1);
  const Objective o4 = make_objective(plan, rc2);
  CHECK(o3.f(x) == o4.f(x));
}

TEST_CASE("lipschitz defaults to objective ground truth") {
  ExperimentPlan plan = parse_config_string(kMinimalConfig);
  RunConfig rc = plan.base;
  const Objective obj = make_objective(plan, rc);
  resolve_objective_dependent(plan, rc, obj);
  CHECK(rc.problem.domain.lipschitz == doctest::Approx(1.0));  // r sqrt(d) for the bowl

  ExperimentPlan given = parse_config_string(std::string(kMinimalConfig) +
                                             "lipschitz = 7.5\n");
  RunConfig rc2 = given.base;
  const Objective obj2 = make_objective(given, rc2);
  resolve_objective_dependent(given, rc2, obj2);
  CHECK(rc2.problem.domain.lipschitz == 7.5);
}

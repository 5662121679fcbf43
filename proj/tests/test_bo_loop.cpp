#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bogp/bo_loop.hpp"
#include "bogp/domain.hpp"
#include "bogp/trace_io.hpp"

using namespace bogp;

namespace {

RunConfig base_config(AcqKind kind, int T, std::uint64_t seed) {
  RunConfig rc;
  rc.problem.domain = {1, 1.0, 3.0 * M_PI};
  rc.problem.B = 2.0;
  rc.problem.sigma_eps = 0.05;
  rc.problem.delta = 0.1;
  rc.kernel = {KernelFamily::squared_exponential, 0.2};
  rc.sigma = 0.05;
  rc.acq.kind = kind;
  rc.T = T;
  rc.T0 = 1;
  rc.seed = seed;
  rc.restarts = 8;
  rc.local_steps = 25;
  rc.grid_cap = 4096;
  return rc;
}

}  // namespace

TEST_CASE("degenerate horizon: only the initialization record") {
  RunConfig rc = base_config(AcqKind::ei, 1, 3);
  const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
  const Trace trace = run(rc, obj);
  REQUIRE(trace.records.size() == 1);
  CHECK(trace.records[0].flags == "init");
  CHECK(std::isnan(trace.records[0].acq_value));
}

TEST_CASE("config validation") {
  RunConfig rc = base_config(AcqKind::ei, 5, 3);
  rc.T0 = 6;
  const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
  CHECK_THROWS_AS(run(rc, obj), std::invalid_argument);
  rc.T0 = 0;
  CHECK_THROWS_AS(run(rc, obj), std::invalid_argument);
}

TEST_CASE("determinism: identical config and seed give bit-identical traces") {
  for (AcqKind kind : {AcqKind::ucb, AcqKind::ts, AcqKind::ei, AcqKind::vei}) {
    RunConfig rc = base_config(kind, 12, 99);
    const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
    const std::string a = trace_to_csv(run(rc, obj));
    const std::string b = trace_to_csv(run(rc, obj));
    REQUIRE(a == b);
    rc.seed = 100;
    const std::string c = trace_to_csv(run(rc, obj));
    REQUIRE(a != c);
  }
}

TEST_CASE("trace invariants across engines") {
  for (AcqKind kind : {AcqKind::ucb, AcqKind::ts, AcqKind::ei, AcqKind::vei}) {
    RunConfig rc = base_config(kind, 25, 7);
    rc.T0 = 3;
    const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
    const Trace trace = run(rc, obj);
    REQUIRE(trace.records.size() == 25);
    double y_plus = std::numeric_limits<double>::infinity();
    double cum = 0.0;
    double info_prev = 0.0;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      const TraceRecord& rec = trace.records[i];
      REQUIRE(rec.t == int(i) + 1);
      REQUIRE(rc.problem.domain.contains(rec.x));
      // incumbent is the running minimum
      y_plus = std::min(y_plus, rec.y);
      REQUIRE(rec.y_plus == y_plus);
      if (i > 0) REQUIRE(rec.y_plus <= trace.records[i - 1].y_plus);
      // cumulative regret is the sum of the active instantaneous regrets
      cum += rec.r_inst;
      REQUIRE(rec.cum_regret == doctest::Approx(cum).epsilon(1e-12));
      REQUIRE(rec.r_std >= -1e-12);
      REQUIRE(rec.r_impr >= -1e-12);
      REQUIRE(rec.info_gain_cum >= info_prev - 1e-15);
      info_prev = rec.info_gain_cum;
      if (int(i) < rc.T0) {
        REQUIRE(rec.flags == "init");
      } else if (kind == AcqKind::ts) {
        REQUIRE(rec.grid_size > 0);
      }
    }
  }
}

TEST_CASE("ts selections are lattice members") {
  RunConfig rc = base_config(AcqKind::ts, 15, 11);
  const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
  const Trace trace = run(rc, obj);
  for (const auto& rec : trace.records) {
    if (rec.flags == "init") continue;
    Discretization disc(rc.problem.domain, rec.t, rc.grid_cap);
    REQUIRE(rec.grid_size == disc.size());
    // the recorded point must coincide with some lattice point
    const Vector back = closest(disc, rec.x);
    REQUIRE((back - rec.x).norm() <= 1e-12);
  }
}

TEST_CASE("ei converges on the noiseless quadratic") {
  RunConfig rc = base_config(AcqKind::ei, 30, 17);
  rc.problem.domain = {1, 1.0, 1.0};
  rc.problem.sigma_eps = 0.0;
  rc.sigma = 0.01;
  rc.restarts = 16;
  rc.local_steps = 40;
  const Objective obj = benchmark("quadratic_bowl", rc.problem.domain);
  const Trace trace = run(rc, obj);
  CHECK(trace.final_y_plus() <= 1e-2);
  // cross-check against an exhaustive scan: nothing does better than f*
  CHECK(trace.final_y_plus() >= obj.f_star);
}

TEST_CASE("regret definitions agree with their formulas") {
  RunConfig rc = base_config(AcqKind::ucb, 20, 23);
  const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
  const Trace trace = run(rc, obj);
  CHECK(trace.regret == RegretDef::standard_max);
  double prev_asymp = 1e300;
  for (const auto& rec : trace.records) {
    REQUIRE(rec.r_asymp == doctest::Approx(rec.y_plus - obj.f_star).epsilon(1e-12));
    REQUIRE(rec.r_asymp <= prev_asymp + 1e-12);
    prev_asymp = rec.r_asymp;
    REQUIRE(rec.r_inst == rec.r_std);
  }
  RunConfig rc2 = base_config(AcqKind::ei, 20, 23);
  const Trace t2 = run(rc2, obj);
  CHECK(t2.regret == RegretDef::improvement);
  for (const auto& rec : t2.records) REQUIRE(rec.r_inst == rec.r_impr);
}

TEST_CASE("stopping rules") {
  // horizon never fires early
  {
    RunConfig rc = base_config(AcqKind::ei, 10, 31);
    const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
    CHECK(run(rc, obj).records.size() == 10);
  }
  // a constant objective with zero tolerance stalls after the window fills
  {
    RunConfig rc = base_config(AcqKind::ei, 40, 31);
    rc.problem.sigma_eps = 0.0;
    rc.T0 = 2;
    rc.stopping_rule = {StoppingKind::stall, 0.0, 5};
    Objective flat;
    flat.name = "flat";
    flat.f = [](const Vector&) { return 1.0; };
    flat.lipschitz = 1.0;
    flat.f_star = 1.0;
    flat.f_star_exact = true;
    const Trace trace = run(rc, flat);
    CHECK(trace.records.size() == std::size_t(rc.T0 + 5));
  }
  // a strictly improving synthetic trace never stalls
  {
    Trace synth;
    synth.T0 = 1;
    synth.kind = AcqKind::ei;
    for (int t = 1; t <= 12; ++t) {
      TraceRecord rec;
      rec.t = t;
      rec.y_plus = 1.0 - 0.05 * t;
      synth.records.push_back(rec);
    }
    CHECK_FALSE(stopping({StoppingKind::stall, 0.0, 5}, synth));
  }
  // the acquisition-floor rule fires on the last recorded value
  {
    Trace synth;
    synth.kind = AcqKind::ei;
    synth.T0 = 1;
    TraceRecord init;
    init.t = 1;
    init.acq_value = std::numeric_limits<double>::quiet_NaN();
    TraceRecord live;
    live.t = 2;
    live.acq_value = 0.5;
    TraceRecord dead;
    dead.t = 3;
    dead.acq_value = 1e-9;
    synth.records = {init};
    CHECK_FALSE(stopping({StoppingKind::acq_below, 1e-6, 1}, synth));
    synth.records = {init, live};
    CHECK_FALSE(stopping({StoppingKind::acq_below, 1e-6, 1}, synth));
    synth.records = {init, live, dead};
    CHECK(stopping({StoppingKind::acq_below, 1e-6, 1}, synth));
  }
  // misapplied rules are configuration errors
  {
    Trace synth;
    synth.kind = AcqKind::ucb;
    synth.T0 = 1;
    TraceRecord rec;
    rec.t = 1;
    synth.records.push_back(rec);
    CHECK_THROWS_AS(stopping({StoppingKind::acq_below, 0.1, 1}, synth), ConfigError);
  }
}

TEST_CASE("objective returning NaN aborts with the point") {
  RunConfig rc = base_config(AcqKind::ei, 5, 37);
  Objective bad;
  bad.name = "bad";
  bad.f = [](const Vector& x) {
    return x[0] > 0.0 ? std::nan("") : 0.0;
  };
  bad.lipschitz = 1.0;
  bad.f_star = 0.0;
  CHECK_THROWS_AS(run(rc, bad), NumericError);
}

TEST_CASE("custom schedule hook feeds the engine") {
  RunConfig rc = base_config(AcqKind::ucb, 6, 41);
  rc.acq.schedule = [](int) { return 0.0; };  // pure exploitation
  const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
  const Trace trace = run(rc, obj);
  for (const auto& rec : trace.records)
    if (rec.flags != "init") REQUIRE(rec.schedule_sqrt == 0.0);
}

TEST_CASE("csv round trip preserves records") {
  RunConfig rc = base_config(AcqKind::ts, 14, 43);
  const Objective obj = benchmark("sinusoid_1d", rc.problem.domain);
  const Trace trace = run(rc, obj);
  const std::string csv = trace_to_csv(trace);
  std::istringstream in(csv);
  const auto records = records_from_csv(in);
  REQUIRE(records.size() == trace.records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    REQUIRE(records[i].x == trace.records[i].x);
    REQUIRE(records[i].y == trace.records[i].y);
    REQUIRE(records[i].cum_regret == trace.records[i].cum_regret);
    REQUIRE(records[i].grid_size == trace.records[i].grid_size);
    REQUIRE(records[i].flags == trace.records[i].flags);
  }
  Trace rebuilt = trace;
  rebuilt.records = records;
  REQUIRE(trace_to_csv(rebuilt) == csv);
}

#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "pdq/experiments.hpp"

using namespace pdq;

namespace {

RunConfig make_config(const std::string& text) {
  return RunConfig::from_json(ordered_json::parse(text));
}

const char* kMm1 = R"({
  "model": {"lambda": "1", "h": "2", "lambda0": "1",
            "lambda_sup": 1.0, "h_sup": 2.0}
})";

}  // namespace

TEST_CASE("validate command reports conditions and gates on them",
          "[experiments]") {
  const auto ok = run_validate(make_config(kMm1), RunContext{});
  REQUIRE(ok.exit_code == 0);
  REQUIRE(ok.report["command"] == "validate");
  REQUIRE(ok.report["conditions"]["all_ok"] == true);

  const auto bad = run_validate(make_config(R"({
    "model": {"lambda": "2", "h": "1", "lambda0": "1",
              "lambda_sup": 1.0, "h_sup": 1.0}
  })"),
                                RunContext{});
  REQUIRE(bad.exit_code == 2);
  REQUIRE(bad.report["conditions"]["boundedness_ok"] == false);
}

TEST_CASE("simulate command writes a trajectory table", "[experiments]") {
  auto cfg = make_config(kMm1);
  cfg.raw["simulate"] = ordered_json::parse(R"({"horizon": 20.0})");
  const auto out = run_simulate(cfg, RunContext{7, 1, SamplerKind::thinning});
  REQUIRE(out.exit_code == 0);
  const std::size_t arrivals = out.report["arrivals"].get<std::size_t>();
  const std::size_t done = out.report["service_completions"].get<std::size_t>();
  REQUIRE(arrivals + done == out.report["events"].get<std::size_t>());
  REQUIRE(out.files.size() == 1);
  REQUIRE(out.files[0].first == "trajectory.csv");
  REQUIRE(out.files[0].second.rfind("t,kind,n,x,y\n", 0) == 0);
}

TEST_CASE("stationary command estimates the long-run law", "[experiments]") {
  auto cfg = make_config(kMm1);
  cfg.raw["stationary"] =
      ordered_json::parse(R"({"cycles": 4000, "levels": 4})");
  const auto out =
      run_stationary(cfg, RunContext{11, 1, SamplerKind::thinning});
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.report["availability"].size() == 4);
  // Geometric law with ratio 1/2: long-run idle fraction is one half.
  const double pi0 =
      out.report["availability"][0]["estimate"]["value"].get<double>();
  REQUIRE(pi0 == Catch::Approx(0.5).margin(0.05));
  const double mean_n = out.report["mean_number"]["value"].get<double>();
  REQUIRE(mean_n == Catch::Approx(1.0).margin(0.15));

  // Long-run commands refuse models without a positive hazard floor.
  auto drifting = make_config(R"json({
    "model": {"lambda": "1", "h": "x/(1+x)", "lambda0": "1",
              "lambda_sup": 1.0, "h_sup": 1.0}
  })json");
  REQUIRE(run_stationary(drifting, RunContext{}).exit_code == 2);
}

TEST_CASE("hitting command tabulates drain-time moments", "[experiments]") {
  auto cfg = make_config(kMm1);
  cfg.raw["hitting"] = ordered_json::parse(
      R"({"starts": [{"n": 1}], "k": 1, "m": 2, "replicas": 400})");
  const auto out = run_hitting(cfg, RunContext{3, 1, SamplerKind::thinning});
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.report["censor_gate_ok"] == true);
  const double tau =
      out.report["rows"][0]["tau_moment"]["value"].get<double>();
  REQUIRE(tau == Catch::Approx(1.0).margin(0.3));
  REQUIRE(out.report["rows"][0]["lyapunov_weight"].get<double>() == 4.0);
}

TEST_CASE("dynkin command checks the centered residual", "[experiments]") {
  auto cfg = make_config(kMm1);
  cfg.raw["dynkin"] = ordered_json::parse(
      R"({"m": 1, "t_end": 2.0, "replicas": 600})");
  const auto out = run_dynkin(cfg, RunContext{21, 1, SamplerKind::thinning});
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.report["within_three_se"] == true);
  REQUIRE(out.report["fn_scale"].get<double>() > 0.0);
}

TEST_CASE("jumpprob command matches short-window predictions",
          "[experiments]") {
  auto cfg = make_config(kMm1);
  cfg.raw["jumpprob"] = ordered_json::parse(
      R"({"start": {"n": 1}, "deltas": [0.1], "trials": 4000})");
  const auto out = run_jumpprob(cfg, RunContext{9, 1, SamplerKind::thinning});
  REQUIRE(out.exit_code == 0);
  const auto& row = out.report["rows"][0];
  std::size_t total = 0;
  for (const char* key : {"none", "arrival", "service", "multiple"})
    total += row["observed"][key].get<std::size_t>();
  REQUIRE(total == 4000);
  const double freq_none =
      row["observed"]["none"].get<double>() / 4000.0;
  REQUIRE(freq_none ==
          Catch::Approx(row["predicted"]["none"].get<double>()).margin(0.03));
}

TEST_CASE("reports are byte-identical across thread counts",
          "[experiments]") {
  auto cfg = make_config(kMm1);
  cfg.raw["stationary"] =
      ordered_json::parse(R"({"cycles": 1500, "levels": 3})");
  const auto serial =
      run_stationary(cfg, RunContext{5, 1, SamplerKind::thinning});
  const auto threaded =
      run_stationary(cfg, RunContext{5, 4, SamplerKind::thinning});
  REQUIRE(json_to_string(serial.report) == json_to_string(threaded.report));
  REQUIRE(serial.files[0].second == threaded.files[0].second);

  cfg.raw["jumpprob"] = ordered_json::parse(
      R"({"deltas": [0.05], "trials": 2000})");
  const auto j1 = run_jumpprob(cfg, RunContext{5, 1, SamplerKind::thinning});
  const auto j4 = run_jumpprob(cfg, RunContext{5, 4, SamplerKind::thinning});
  REQUIRE(json_to_string(j1.report) == json_to_string(j4.report));
}

TEST_CASE("unknown commands are config errors", "[experiments]") {
  REQUIRE_THROWS_AS(run_command("explode", make_config(kMm1), RunContext{}),
                    ConfigError);
  REQUIRE(run_command("validate", make_config(kMm1), RunContext{}).exit_code ==
          0);
}

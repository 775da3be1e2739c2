#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdq/config.hpp"
#include "pdq/convergence.hpp"
#include "pdq/cycles.hpp"
#include "pdq/dynkin.hpp"
#include "pdq/estimators.hpp"
#include "pdq/generator.hpp"
#include "pdq/hazard.hpp"
#include "pdq/intensity.hpp"
#include "pdq/io.hpp"
#include "pdq/sampler.hpp"
#include "pdq/simulate.hpp"
#include "pdq/validate.hpp"

namespace pdq {

struct RunContext {
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  SamplerKind sampler = SamplerKind::thinning;
};

/// Exit codes: 0 success, 1 unusable config (thrown as ConfigError before an
/// outcome exists), 2 model fails its rate-bound checks, 3 the run finished
/// but a statistical gate failed.
struct ExperimentOutcome {
  int exit_code = 0;
  ordered_json report;
  std::vector<std::pair<std::string, std::string>> files;
};

namespace detail {

inline ordered_json conditions_to_json(const ConditionReport& r) {
  ordered_json v;
  v["all_ok"] = r.all_ok();
  v["boundedness_ok"] = r.boundedness_ok;
  v["idle_rate_ok"] = r.idle_rate_ok;
  v["lambda_sup_observed"] = r.lambda_sup_observed;
  v["lambda0_sup_observed"] = r.lambda0_sup_observed;
  v["h_sup_observed"] = r.h_sup_observed;
  v["lambda0_inf_observed"] = r.lambda0_inf_observed;
  v["c0_estimate"] = r.c0_estimate;
  v["idle_c0_prime"] = r.idle_c0_prime;
  v["grid"] = r.grid;
  v["violations"] = r.violations;
  return v;
}

inline ordered_json estimate_to_json(const EstimateCI& e) {
  return ordered_json{{"value", e.value},
                      {"std_error", e.std_error},
                      {"ci_low", e.ci_low},
                      {"ci_high", e.ci_high},
                      {"n_samples", e.n_samples}};
}

inline ordered_json report_base(const char* command, const RunConfig& cfg,
                                const RunContext& ctx) {
  ordered_json rep;
  rep["command"] = command;
  rep["seed"] = ctx.seed;
  rep["sampler"] = sampler_name(ctx.sampler);
  rep["model"] = cfg.model.to_json();
  return rep;
}

// Jobs never appear in a report: thread count must not change any output.
inline ExperimentOutcome gated(const char* command, const RunConfig& cfg,
                               const RunContext& ctx,
                               const ConditionReport& conditions,
                               bool need_all) {
  ExperimentOutcome out;
  out.report = report_base(command, cfg, ctx);
  out.report["conditions"] = conditions_to_json(conditions);
  const bool ok = need_all ? conditions.all_ok() : conditions.boundedness_ok;
  if (!ok) {
    out.report["error"] = need_all
                              ? "model fails the long-run rate conditions"
                              : "declared rate bounds do not hold";
    out.exit_code = 2;
  }
  return out;
}

}  // namespace detail

inline ExperimentOutcome run_validate(const RunConfig& cfg,
                                      const RunContext& ctx) {
  const auto field = build_field(cfg.model);
  const auto conditions = validate_conditions(field);
  ExperimentOutcome out;
  out.report = detail::report_base("validate", cfg, ctx);
  out.report["conditions"] = detail::conditions_to_json(conditions);
  if (!conditions.all_ok()) {
    out.report["error"] = "model fails the long-run rate conditions";
    out.exit_code = 2;
  }
  return out;
}

inline ExperimentOutcome run_simulate(const RunConfig& cfg,
                                      const RunContext& ctx) {
  const auto field = build_field(cfg.model);
  const auto c = SimulateConfig::from_json(cfg.section("simulate"));
  auto out = detail::gated("simulate", cfg, ctx, validate_conditions(field),
                           /*need_all=*/false);
  if (out.exit_code != 0) return out;

  const auto traj = simulate_path(field, c.start, c.horizon,
                                  SeedSpec{ctx.seed, 0}, ctx.sampler);
  std::size_t arrivals = 0, completions = 0;
  for (const auto& e : traj.events)
    (e.kind == EventKind::arrival ? arrivals : completions) += 1;
  out.report["start"] = state_to_json(c.start);
  out.report["horizon"] = c.horizon;
  out.report["events"] = traj.events.size();
  out.report["arrivals"] = arrivals;
  out.report["service_completions"] = completions;
  out.report["final_state"] = state_to_json(traj.state_at(c.horizon));
  std::ostringstream csv;
  traj.write_csv(csv);
  out.files.emplace_back("trajectory.csv", std::move(csv).str());
  return out;
}

inline ExperimentOutcome run_stationary(const RunConfig& cfg,
                                        const RunContext& ctx) {
  const auto field = build_field(cfg.model);
  const auto c = StationaryConfig::from_json(cfg.section("stationary"));
  auto out = detail::gated("stationary", cfg, ctx,
                           validate_conditions(field), /*need_all=*/true);
  if (out.exit_code != 0) return out;

  try {
    const std::vector<CycleFunctional> fns{
        CycleFunctional::number_in_system()};
    const auto cycles =
        collect_cycles_parallel(field, c.warmup, c.cycles, fns, ctx.seed,
                                ctx.jobs, CycleOptions{1e6, ctx.sampler});
    out.report["cycles"] = cycles.size();
    out.report["mean_number"] =
        detail::estimate_to_json(stationary_functional(cycles, 0));
    ordered_json rows = ordered_json::array();
    std::string csv = "level,value,std_error,ci_low,ci_high\n";
    for (std::uint32_t lvl = 0; lvl < c.levels; ++lvl) {
      const auto est = availability_factor(cycles, lvl);
      ordered_json row;
      row["level"] = lvl;
      row["estimate"] = detail::estimate_to_json(est);
      rows.push_back(std::move(row));
      csv += csv_line({std::to_string(lvl), format_double(est.value),
                       format_double(est.std_error),
                       format_double(est.ci_low),
                       format_double(est.ci_high)});
    }
    out.report["availability"] = std::move(rows);
    out.files.emplace_back("table.csv", std::move(csv));
  } catch (const InstabilityError& e) {
    out.report["error"] = e.what();
    out.exit_code = 3;
  } catch (const InsufficientCyclesError& e) {
    out.report["error"] = e.what();
    out.exit_code = 3;
  }
  return out;
}

inline ExperimentOutcome run_hitting(const RunConfig& cfg,
                                     const RunContext& ctx) {
  const auto field = build_field(cfg.model);
  const auto c = HittingConfig::from_json(cfg.section("hitting"));
  auto out = detail::gated("hitting", cfg, ctx, validate_conditions(field),
                           /*need_all=*/false);
  if (out.exit_code != 0) return out;

  const auto table =
      hitting_moment_experiment(field, c.starts, c.k, c.m, c.replicas, c.cap,
                                ctx.seed, ctx.jobs, ctx.sampler);
  out.report["k"] = table.k;
  out.report["m"] = table.m;
  out.report["cap"] = table.cap;
  ordered_json rows = ordered_json::array();
  std::string csv =
      "n,x,y,tau_moment,std_error,censored,replicas,weight,ratio\n";
  for (const auto& r : table.rows) {
    ordered_json row;
    row["start"] = state_to_json(r.start);
    row["tau_moment"] = detail::estimate_to_json(r.tau_moment);
    row["censored"] = r.censored;
    row["replicas"] = r.replicas;
    row["lyapunov_weight"] = r.lyapunov_weight;
    row["ratio"] = r.ratio;
    rows.push_back(std::move(row));
    csv += csv_line(
        {std::to_string(r.start.n), format_double(r.start.x),
         format_double(r.start.y), format_double(r.tau_moment.value),
         format_double(r.tau_moment.std_error), std::to_string(r.censored),
         std::to_string(r.replicas), format_double(r.lyapunov_weight),
         format_double(r.ratio)});
  }
  out.report["rows"] = std::move(rows);
  out.report["censored_fraction_max"] = table.censored_fraction_max;
  out.report["censor_gate_ok"] = table.censor_gate_ok;
  out.files.emplace_back("table.csv", std::move(csv));
  if (!table.censor_gate_ok) {
    out.report["error"] = "too many paths hit the simulation cap";
    out.exit_code = 3;
  }
  return out;
}

inline ExperimentOutcome run_dynkin(const RunConfig& cfg,
                                    const RunContext& ctx) {
  const auto field = build_field(cfg.model);
  const auto c = DynkinConfig::from_json(cfg.section("dynkin"));
  auto out = detail::gated("dynkin", cfg, ctx, validate_conditions(field),
                           /*need_all=*/false);
  if (out.exit_code != 0) return out;

  DynkinResult res;
  std::string fn_name;
  if (c.k > 0) {
    const auto fn = TimeTestFunction::lyapunov_capped(c.k, c.m, c.cap);
    fn_name = fn.name;
    res = dynkin_residual_time(field, fn, c.start, c.t_end, c.replicas,
                               ctx.seed, ctx.jobs, ctx.sampler);
  } else {
    const auto fn = TestFunction::lyapunov_capped(c.m, c.cap);
    fn_name = fn.name;
    res = dynkin_residual(field, fn, c.start, c.t_end, c.replicas, ctx.seed,
                          ctx.jobs, ctx.sampler);
  }
  out.report["test_function"] = fn_name;
  out.report["start"] = state_to_json(c.start);
  out.report["t_end"] = res.t_end;
  out.report["replicas"] = res.replicas;
  out.report["residual"] = detail::estimate_to_json(res.residual);
  out.report["fn_scale"] = res.fn_scale;
  const bool mean_zero =
      std::fabs(res.residual.value) <= 3.0 * res.residual.std_error;
  out.report["within_three_se"] = mean_zero;
  if (!mean_zero) {
    out.report["error"] = "martingale residual is not centered at zero";
    out.exit_code = 3;
  }
  return out;
}

inline ExperimentOutcome run_jumpprob(const RunConfig& cfg,
                                      const RunContext& ctx) {
  const auto field = build_field(cfg.model);
  const auto c = JumpProbConfig::from_json(cfg.section("jumpprob"));
  auto out = detail::gated("jumpprob", cfg, ctx, validate_conditions(field),
                           /*need_all=*/false);
  if (out.exit_code != 0) return out;

  ordered_json rows = ordered_json::array();
  std::string csv =
      "delta,trials,none,arrival,service,multiple,"
      "pred_none,pred_arrival,pred_service,second_order\n";
  for (std::size_t di = 0; di < c.deltas.size(); ++di) {
    const double delta = c.deltas[di];
    const std::uint64_t row_master =
        derive_stream_seed(ctx.seed, 0x4A554D50ull + di);
    std::vector<std::uint8_t> category(c.trials, 0);
    parallel_tasks(c.trials, ctx.jobs, [&](std::size_t r) {
      PathStepper stepper(field, c.start,
                          SeedSpec{row_master, static_cast<std::uint32_t>(r)},
                          ctx.sampler);
      std::size_t events = 0;
      EventKind first = EventKind::arrival;
      while (auto evt = stepper.step(delta)) {
        if (events == 0) first = evt->kind;
        if (++events == 2) break;
      }
      category[r] = events == 0 ? 0
                    : events >= 2 ? 3
                    : first == EventKind::arrival ? 1
                                                  : 2;
    });
    std::size_t counts[4] = {0, 0, 0, 0};
    for (std::uint8_t cat : category) counts[cat] += 1;

    // One-sided first-event mass per channel; multiple jumps make the
    // observed single-jump count fall below it by at most O(delta^2).
    const auto one_jump = [&](bool arrival_channel) {
      return integrate_flow(field, c.start, delta, [&](double u) {
        const StateX su = flow(c.start, u);
        const double rate =
            arrival_channel ? field.arrival_rate(su) : field.service_rate(su);
        return rate * survival_probability(field, c.start, u);
      });
    };
    const double p_none = survival_probability(field, c.start, delta);
    const double p_arr = one_jump(true);
    const double p_srv = one_jump(false);
    const double second_order = field.bound() * field.bound() * delta * delta;

    ordered_json row;
    row["delta"] = delta;
    row["trials"] = c.trials;
    row["observed"] = ordered_json{{"none", counts[0]},
                                   {"arrival", counts[1]},
                                   {"service", counts[2]},
                                   {"multiple", counts[3]}};
    row["predicted"] = ordered_json{{"none", p_none},
                                    {"arrival_first_event", p_arr},
                                    {"service_first_event", p_srv},
                                    {"second_order", second_order}};
    rows.push_back(std::move(row));
    csv += csv_line({format_double(delta), std::to_string(c.trials),
                     std::to_string(counts[0]), std::to_string(counts[1]),
                     std::to_string(counts[2]), std::to_string(counts[3]),
                     format_double(p_none), format_double(p_arr),
                     format_double(p_srv), format_double(second_order)});
  }
  out.report["start"] = state_to_json(c.start);
  out.report["rows"] = std::move(rows);
  out.files.emplace_back("table.csv", std::move(csv));
  return out;
}

inline ExperimentOutcome run_converge(const RunConfig& cfg,
                                      const RunContext& ctx) {
  const auto field = build_field(cfg.model);
  const auto c = ConvergeConfig::from_json(cfg.section("converge"));
  auto out = detail::gated("converge", cfg, ctx, validate_conditions(field),
                           /*need_all=*/true);
  if (out.exit_code != 0) return out;

  ConvergenceOptions opt;
  opt.reference_cycles = c.reference_cycles;
  opt.warmup_cycles = c.warmup;
  opt.sampler = ctx.sampler;
  opt.jobs = ctx.jobs;
  opt.floor_margin = c.floor_margin;
  out.report["mode"] =
      c.mode == StartMode::fixed ? "fixed" : "stationary";
  out.report["start"] = state_to_json(c.start);
  out.report["replicas"] = c.replicas;
  try {
    const auto res = convergence_experiment(field, c.mode, c.start, c.grid,
                                            c.replicas, ctx.seed, opt);
    ordered_json pts = ordered_json::array();
    std::string csv = "t,tv,tv_se,usable,at_noise_floor\n";
    bool all_at_floor = true;
    for (const auto& p : res.points) {
      pts.push_back(ordered_json{{"t", p.t},
                                 {"tv", p.tv},
                                 {"tv_se", p.tv_se},
                                 {"usable", p.usable},
                                 {"at_noise_floor", p.at_noise_floor}});
      all_at_floor = all_at_floor && p.at_noise_floor;
      csv += csv_line({format_double(p.t), format_double(p.tv),
                       format_double(p.tv_se), p.usable ? "1" : "0",
                       p.at_noise_floor ? "1" : "0"});
    }
    out.report["points"] = std::move(pts);
    out.report["noise_floor"] = ordered_json{{"mean", res.floor.mean},
                                             {"sd", res.floor.sd},
                                             {"q999", res.floor.q999}};
    out.report["usable_points"] = res.usable_points;
    if (res.usable_points >= 2)
      out.report["fit"] = ordered_json{{"slope", res.fit.slope},
                                       {"intercept", res.fit.intercept}};
    out.report["note"] = res.note;
    out.files.emplace_back("curve.csv", std::move(csv));
    if (c.mode == StartMode::stationary_pool && !all_at_floor) {
      out.report["error"] =
          "stationary starts drifted off the sampling-noise floor";
      out.exit_code = 3;
    }
  } catch (const UninformativeGridError& e) {
    out.report["error"] = e.what();
    out.exit_code = 3;
  } catch (const InstabilityError& e) {
    out.report["error"] = e.what();
    out.exit_code = 3;
  }
  return out;
}

inline ExperimentOutcome run_command(const std::string& command,
                                     const RunConfig& cfg,
                                     const RunContext& ctx) {
  if (command == "validate") return run_validate(cfg, ctx);
  if (command == "simulate") return run_simulate(cfg, ctx);
  if (command == "stationary") return run_stationary(cfg, ctx);
  if (command == "hitting") return run_hitting(cfg, ctx);
  if (command == "dynkin") return run_dynkin(cfg, ctx);
  if (command == "jumpprob") return run_jumpprob(cfg, ctx);
  if (command == "converge") return run_converge(cfg, ctx);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace pdq

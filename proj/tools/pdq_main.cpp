// Command line front end: loads a json model config, runs one experiment,
// and writes report.json plus any tables into the output directory. The
// report depends only on the config, seed, and sampler; timing and thread
// count go to manifest.json so reruns stay byte-comparable.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "pdq/config.hpp"
#include "pdq/experiments.hpp"
#include "pdq/io.hpp"
#include "pdq/rng.hpp"
#include "pdq/simulate.hpp"

namespace {

pdq::ordered_json manifest_json(const std::string& command,
                                const pdq::RunContext& ctx,
                                std::uint64_t config_digest,
                                std::uint64_t report_digest,
                                double wall_seconds) {
  pdq::ordered_json m;
  m["command"] = command;
  m["master_seed"] = ctx.seed;
  m["sampler"] = pdq::sampler_name(ctx.sampler);
  m["jobs"] = ctx.jobs;
  m["wall_seconds"] = wall_seconds;
  m["config_digest"] = pdq::hex64(config_digest);
  m["report_digest"] = pdq::hex64(report_digest);
  m["seed_derivation"] =
      "replica r draws from stream (master_seed, r); auxiliary streams "
      "offset the index by fixed multiples of 2^32";
  pdq::ordered_json sample = pdq::ordered_json::array();
  for (std::uint64_t r = 0; r < 4; ++r)
    sample.push_back(pdq::hex64(pdq::derive_stream_seed(ctx.seed, r)));
  m["derived_seed_sample"] = sample;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and checks for a state-dependent single-server "
               "queue"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string sampler = "thinning";
  unsigned jobs = 1;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "check the declared rate bounds on a state grid"},
      {"simulate", "write one event path as csv"},
      {"stationary", "long-run queue statistics from regeneration cycles"},
      {"hitting", "moments of the time to empty the queue"},
      {"dynkin", "centered-residual check of the generator identity"},
      {"jumpprob", "jump-count probabilities over short windows"},
      {"converge", "total-variation distance to the long-run law over time"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "json config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: .)");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--jobs", jobs, "worker threads")
        ->check(CLI::Range(1u, 256u));
    sub->add_option("--sampler", sampler, "event sampler")
        ->check(CLI::IsMember({"thinning", "inversion"}));
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  try {
    const std::string config_text = pdq::read_text_file(config_path);
    pdq::ordered_json root;
    try {
      root = pdq::ordered_json::parse(config_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw pdq::ConfigError(std::string("config is not valid json: ") +
                             e.what());
    }
    const auto cfg = pdq::RunConfig::from_json(root);

    pdq::RunContext ctx;
    ctx.seed = sub->count("--seed") > 0 ? seed : cfg.seed;
    ctx.jobs = jobs;
    ctx.sampler = pdq::sampler_from_name(sampler);

    const auto t0 = std::chrono::steady_clock::now();
    const auto outcome = pdq::run_command(command, cfg, ctx);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    std::filesystem::create_directories(out_dir);
    const std::string report_text = pdq::json_to_string(outcome.report);
    pdq::write_text_file(out_dir + "/report.json", report_text);
    for (const auto& [name, content] : outcome.files)
      pdq::write_text_file(out_dir + "/" + name, content);
    pdq::write_json_file(
        out_dir + "/manifest.json",
        manifest_json(command, ctx, pdq::fnv1a64(config_text),
                      pdq::fnv1a64(report_text), wall));

    if (outcome.exit_code == 0) {
      std::printf("%s: ok (%s/report.json)\n", command.c_str(),
                  out_dir.c_str());
    } else {
      const std::string why = outcome.report.contains("error")
                                  ? outcome.report["error"].get<std::string>()
                                  : "check failed";
      std::fprintf(stderr, "%s: failed: %s\n", command.c_str(), why.c_str());
    }
    return outcome.exit_code;
  } catch (const pdq::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const pdq::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

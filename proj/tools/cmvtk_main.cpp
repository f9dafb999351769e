// cmvtk: command-line front end. Subcommands:
//   run          execute a configured task and write the result table
//   validate     parse and validate a configuration without running it
//   list-models  print the model catalogue
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 4 resource limit exceeded, 1 anything else.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cmv/config.hpp"
#include "cmv/io.hpp"
#include "cmv/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitResource = 4;

cmv::cfg::ExperimentConfig load(const std::string& path,
                                bool seedSet, cmv::u64 seed) {
  cmv::cfg::ExperimentConfig cfg =
      cmv::cfg::parse_config(cmv::io::read_file(path));
  if (seedSet) {
    cfg.seed = seed;
    cfg.raw["seed"] = seed;
  }
  cmv::cfg::validate_task(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmvtk: spectral diagnostics for generalized CMV operators"};
  app.require_subcommand(1);

  std::string configPath, outDir;
  int threads = 1;
  cmv::u64 seed = 0;

  CLI::App* runCmd = app.add_subcommand("run", "execute a configured task");
  runCmd->add_option("--config", configPath, "configuration file (JSON)")
      ->required();
  runCmd->add_option("--out", outDir, "directory for relative output paths");
  runCmd->add_option("--threads", threads, "worker threads (default 1)")
      ->check(CLI::PositiveNumber);
  CLI::Option* runSeed =
      runCmd->add_option("--seed", seed, "overrides the configured seed");

  CLI::App* valCmd =
      app.add_subcommand("validate", "check a configuration and exit");
  valCmd->add_option("--config", configPath, "configuration file (JSON)")
      ->required();
  CLI::Option* valSeed =
      valCmd->add_option("--seed", seed, "overrides the configured seed");

  CLI::App* listCmd =
      app.add_subcommand("list-models", "print the model catalogue");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (listCmd->parsed()) {
      std::fputs(cmv::cfg::list_models_text().c_str(), stdout);
      return kExitOk;
    }
    if (valCmd->parsed()) {
      cmv::cfg::ExperimentConfig cfg =
          load(configPath, valSeed->count() > 0, seed);
      std::printf("ok: task %s, model %s, output %s (%s)\n", cfg.task.c_str(),
                  cfg.modelName.empty() ? "-" : cfg.modelName.c_str(),
                  cfg.outputPath.c_str(), cfg.format.c_str());
      return kExitOk;
    }
    cmv::cfg::ExperimentConfig cfg =
        load(configPath, runSeed->count() > 0, seed);
    cmv::run::TaskOutcome out = cmv::run::run_task(cfg, outDir, threads);
    std::printf("wrote %s (%lld rows, %.3fs); manifest %s\n",
                out.resultPath.c_str(), static_cast<long long>(out.rows),
                out.wallSeconds, out.manifestPath.c_str());
    return kExitOk;
  } catch (const cmv::cfg::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const cmv::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const cmv::ResourceError& e) {
    std::fprintf(stderr, "resource limit: %s\n", e.what());
    return kExitResource;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
}

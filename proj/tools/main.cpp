#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairexpo/config.hpp"
#include "fairexpo/pipeline.hpp"

namespace {

int run_stage(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::function<void(const fairexpo::RunConfig&)>& stage) {
  try {
    fairexpo::RunConfig config = fairexpo::RunConfig::parse_file(config_path);
    for (const std::string& override_arg : overrides) {
      const std::size_t eq = override_arg.find('=');
      if (eq == std::string::npos) {
        std::cerr << "error: --set expects section.key=value, got '" << override_arg << "'\n";
        return 1;
      }
      config.set(override_arg.substr(0, eq), override_arg.substr(eq + 1));
    }
    stage(config);
    return 0;
  } catch (const fairexpo::PipelineError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return error.exit_code();
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exposure-fair ranking pipeline: ingest call logs, cluster listeners, "
               "train per-cluster recommenders, plan exposure, replay ranking models, "
               "and report fairness metrics."};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "Run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--set", overrides,
                 "Override a config value as section.key=value (repeatable)");

  struct StageSpec {
    const char* name;
    const char* help;
    void (*stage)(const fairexpo::RunConfig&);
  };
  const StageSpec stages[] = {
      {"ingest", "Parse call logs into events, sessions, and a traffic profile",
       fairexpo::cmd_ingest},
      {"cluster", "Filter engaged listeners and cluster their preference vectors",
       fairexpo::cmd_cluster},
      {"train", "Label items per cluster and train the per-cluster classifiers",
       fairexpo::cmd_train},
      {"plan", "Derive aspect shares and per-item exposure targets", fairexpo::cmd_plan},
      {"simulate", "Replay the session stream under every configured ranking model",
       fairexpo::cmd_simulate},
      {"report", "Compute Gini, Lorenz, HHI, NRMSE, and rating CDFs from outcomes",
       fairexpo::cmd_report},
      {"all", "Run the whole pipeline in order", fairexpo::cmd_all},
  };

  int exit_code = 0;
  for (const StageSpec& spec : stages) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->fallthrough();  // -c / --set may follow the subcommand name
    void (*stage)(const fairexpo::RunConfig&) = spec.stage;
    sub->callback([&config_path, &overrides, &exit_code, stage]() {
      exit_code = run_stage(config_path, overrides, stage);
    });
  }

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}

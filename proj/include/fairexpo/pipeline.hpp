#pragma once

#include <stdexcept>
#include <string>

#include "fairexpo/config.hpp"

namespace fairexpo {

// Stage failure carrying the process exit code the CLI should use.
// Codes: 1 generic, 2 ingest input, 3 clustering, 4 simulation inputs,
// 5 reporting inputs.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(int exit_code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_ = 1;
};

// Each stage reads its inputs from the paths in the config (upstream
// artifacts from the output directory) and writes its artifacts there.
// All stages are deterministic functions of the config contents.
void cmd_ingest(const RunConfig& config);
void cmd_cluster(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_plan(const RunConfig& config);
void cmd_simulate(const RunConfig& config);
void cmd_report(const RunConfig& config);
void cmd_all(const RunConfig& config);

}  // namespace fairexpo

#ifndef HARDEM_CLI_CLI_H_
#define HARDEM_CLI_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hardem/config.h"
#include "hardem/solution.h"

namespace hardem::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kSchemaError = 2,
  kTrainingAbort = 3,
};

struct Options {
  std::optional<std::string> task;
  std::optional<std::filesystem::path> config;
  std::vector<std::filesystem::path> in;
  std::optional<std::filesystem::path> solutions;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> objective;
  std::optional<long> tau;
  std::optional<std::string> anneal_direction;
  std::optional<std::string> pruning;
  std::vector<std::string> set;  // raw key=value overrides
};

// Config file (if any), then the dedicated flags, then --set pairs. When a
// checkpoint config is given it replaces the file as the base.
RunConfig resolve_config(const Options& opts, const std::string* base_text = nullptr);

struct PrecomputeSummary {
  std::size_t examples = 0;
  std::size_t empty = 0;
  double mean_z = 0.0;    // over all examples, empty ones included
  double median_z = 0.0;
};

PrecomputeSummary summarize(std::span<const SolutionSet> sets);

// Each command reads its inputs, writes its artifacts atomically and logs a
// short report to `log`. Errors propagate as hardem exceptions.
PrecomputeSummary cmd_precompute(const Options& opts, std::ostream& log);
void cmd_train(const Options& opts, std::ostream& log);
void cmd_eval(const Options& opts, std::ostream& log);
void cmd_analyze(const Options& opts, std::ostream& log);

// Parses argv, dispatches, and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hardem::cli

#endif  // HARDEM_CLI_CLI_H_

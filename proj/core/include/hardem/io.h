#ifndef HARDEM_IO_H_
#define HARDEM_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardem/example.h"
#include "hardem/learning.h"
#include "hardem/metrics.h"
#include "hardem/solution.h"

namespace hardem {

// Example records, one JSON object per line:
//   span / arithmetic: {"id", "question", "document", "answers": [..]}
//   sql:               {"id", "question", "table": {"header", "rows"}, "answers"}
// Blank lines are skipped. Violations raise SchemaError with the 1-based line.
Example parse_example(std::string_view line, TaskKind task, std::size_t line_no);
std::vector<Example> parse_examples(std::string_view text, TaskKind task);
std::string example_to_json(const Example& ex);

// Solution records: {"id", "candidate_count", "solutions": [..]} where each
// solution is tagged by "type":
//   {"type":"span","s","e"}
//   {"type":"equation","o1","n1":{"source","index","value"},"o2","n2"}
//   {"type":"sql","sel","agg","conds":[{"col","op","value_text","span":[s,e]}]}
SolutionSet parse_solution_set(std::string_view line, std::size_t line_no);
std::vector<SolutionSet> parse_solution_sets(std::string_view text);
std::string solution_set_to_json(const SolutionSet& z);

// Per-example evaluation records. `predicted` holds the structured solution
// (or null), `predicted_text` its rendering, and `sparsity` one entry per
// epsilon in the same order as the run's epsilon list.
std::string eval_record_to_json(const EvalRecord& r, std::span<const double> epsilons);
EvalRecord parse_eval_record(std::string_view line, std::size_t line_no,
                             std::vector<double>* epsilons = nullptr);
EvalResult parse_eval_records(std::string_view text);

// RFC 4180 quoting where needed.
std::string csv_field(std::string_view s);
std::string csv_row(std::span<const std::string> fields);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over `path`, so readers
// never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Checkpoint layout: one JSON header line
//   {"format":"hardem-checkpoint","version":1,"task","scorer","extractor",
//    "num_specials","num_params","step","config_hash","config"}
// followed by num_params little-endian IEEE-754 doubles.
struct Checkpoint {
  TaskKind task = TaskKind::kSpanExtraction;
  Scorer scorer;
  long step = 0;
  std::uint64_t config_hash = 0;
  std::string config_text;

  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& c);
// Throws CheckpointError on a malformed or truncated file.
Checkpoint deserialize_checkpoint(std::string_view bytes);

}  // namespace hardem

#endif  // HARDEM_IO_H_

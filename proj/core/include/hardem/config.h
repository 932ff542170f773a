#ifndef HARDEM_CONFIG_H_
#define HARDEM_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hardem/example.h"
#include "hardem/learning.h"
#include "hardem/metrics.h"
#include "hardem/pipeline.h"

namespace hardem {

struct ScorerSpec {
  ScorerKind kind = ScorerKind::kFactorizedSpan;
  std::string extractor = "span";  // log_linear only
  std::size_t feature_dim = 4096;  // log_linear only
  std::size_t tabular_size = 0;    // tabular only
};

// Every knob of a run. Text form is flat `key = value` lines:
//
//   task              span | arithmetic | sql
//   matcher           exact | rouge
//   max_span_len      >= 1
//   noisy_rank_k      0 (off) or >= 1
//   specials          comma-separated numbers
//   tol               > 0
//   allow_copy        true | false
//   max_conditions    0..3
//   max_value_len     >= 1
//   pruning           column_grounded | exhaustive
//   scorer            tabular | log_linear | factorized_span | factorized_tag
//   feature_extractor span | equation | sql
//   feature_dim       >= 1
//   tabular_size      >= 0
//   objective         first_only | mml | hard | annealed_hard
//   tau               >= 1
//   anneal_direction  paper_literal | inverted
//   learning_rate     > 0
//   batch_size        >= 1
//   max_steps         >= 0
//   seed              unsigned integer
//   gradient_clip     >= 0 (0 disables)
//   epsilons          comma-separated, each > 0
//   z_buckets         e.g. 0,1,2-3,4-10,11+
//   workers           >= 1
struct RunConfig {
  TaskKind task = TaskKind::kSpanExtraction;
  PrecomputeOptions precompute;
  ScorerSpec scorer;
  TrainConfig train;
  std::vector<double> epsilons = {1e-3, 1e-4};
  std::vector<ZBucket> buckets;
  std::size_t workers = 1;

  // Task-appropriate defaults: factorized_span for span extraction,
  // factorized_tag for arithmetic, log_linear/sql for SQL.
  static RunConfig defaults(TaskKind task);

  // Throws ConfigError for unknown keys or out-of-range values. Setting
  // `task` is rejected here; pick the task before building the config.
  void set(std::string_view key, std::string_view value);

  // Canonical text: one `key = value` per line, keys sorted.
  std::string to_text() const;
  std::uint64_t hash() const;

  Scorer make_scorer() const;
  void validate() const;
};

// Parses `key = value` lines; '#' starts a comment. Throws ConfigError with
// the line number.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

// Builds a config from text, applying defaults for the text's task (or
// `fallback_task` when the text names none).
RunConfig config_from_text(std::string_view text, TaskKind fallback_task);

}  // namespace hardem

#endif  // HARDEM_CONFIG_H_

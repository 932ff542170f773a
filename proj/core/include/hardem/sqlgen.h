#ifndef HARDEM_SQLGEN_H_
#define HARDEM_SQLGEN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hardem/example.h"
#include "hardem/solution.h"
#include "hardem/table.h"
#include "hardem/text.h"

namespace hardem {

struct QuestionSpan {
  int start = 0;
  int end = 0;
  std::string text;  // literal question substring
};

// Every contiguous question span of at most max_len tokens, ordered by
// (start, end).
std::vector<QuestionSpan> question_spans(const TokenSequence& question, int max_len);

using Denotation = std::vector<std::string>;

// Filters rows by the AND of the conditions, then projects or aggregates the
// sel column. Sum/Mean on a text column throw AggregationTypeError; Sum, Mean,
// Max and Min over zero surviving rows denote the empty result.
Denotation execute_query(const Table& table, const SqlQuery& query);

// Multiset equality of normalized strings.
bool denotation_matches(const Denotation& denotation,
                        std::span<const std::string> answers);

enum class Pruning { kExhaustive, kColumnGrounded };

struct QueryLimits {
  int max_conditions = 3;
  int max_value_len = 8;
  Pruning pruning = Pruning::kColumnGrounded;
};

// The condition pool C, canonically ordered. Question spans are deduplicated
// by normalized text (first occurrence wins) and spans normalizing to nothing
// are dropped. ColumnGrounded keeps Eq values equal to a cell of the column
// and Lt/Gt values that parse as numbers.
std::vector<Condition> candidate_conditions(const TokenSequence& question,
                                            const Table& table,
                                            const QueryLimits& limits);

// Streams Z_tot in canonical order: sel, then aggregation, then condition
// sets of size 0..max_conditions drawn without repetition from the pool.
// Sum/Mean over text columns are skipped.
void enumerate_queries(const TokenSequence& question, const Table& table,
                       const QueryLimits& limits,
                       const std::function<void(const SqlQuery&)>& visit);
std::vector<SqlQuery> enumerate_queries(const TokenSequence& question,
                                        const Table& table,
                                        const QueryLimits& limits);

// Z = queries whose denotation matches the gold answers.
SolutionSet sql_solution_set(const Example& ex, const QueryLimits& limits = {});

}  // namespace hardem

#endif  // HARDEM_SQLGEN_H_

#ifndef HARDEM_EXAMPLE_H_
#define HARDEM_EXAMPLE_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hardem/table.h"
#include "hardem/text.h"

namespace hardem {

enum class TaskKind { kSpanExtraction, kArithmetic, kSqlGeneration };

std::string_view task_name(TaskKind task);
// Accepts "span", "arithmetic", "sql". Throws ConfigError otherwise.
TaskKind parse_task(std::string_view name);

// Document context for span extraction and arithmetic; a table for SQL.
using Context = std::variant<TokenSequence, Table>;

// One weakly supervised instance: x = (question, context), y = answers.
struct Example {
  std::string id;
  TaskKind task = TaskKind::kSpanExtraction;
  TokenSequence question;
  Context context;
  std::vector<std::string> answers;

  const TokenSequence& document() const { return std::get<TokenSequence>(context); }
  const Table& table() const { return std::get<Table>(context); }

  // Throws std::invalid_argument when an invariant is broken: empty question,
  // no answers, empty document, or a context kind that does not fit the task.
  void validate() const;
};

}  // namespace hardem

#endif  // HARDEM_EXAMPLE_H_

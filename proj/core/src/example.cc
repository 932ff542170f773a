#include "hardem/example.h"

#include <stdexcept>

#include "hardem/error.h"

namespace hardem {

std::string_view task_name(TaskKind task) {
  switch (task) {
    case TaskKind::kSpanExtraction: return "span";
    case TaskKind::kArithmetic: return "arithmetic";
    case TaskKind::kSqlGeneration: return "sql";
  }
  return "?";
}

TaskKind parse_task(std::string_view name) {
  if (name == "span") return TaskKind::kSpanExtraction;
  if (name == "arithmetic") return TaskKind::kArithmetic;
  if (name == "sql") return TaskKind::kSqlGeneration;
  throw ConfigError("unknown task '" + std::string(name) +
                    "' (expected span, arithmetic or sql)");
}

void Example::validate() const {
  if (question.empty()) throw std::invalid_argument("example '" + id + "': empty question");
  if (answers.empty()) throw std::invalid_argument("example '" + id + "': no answers");
  const bool wants_table = task == TaskKind::kSqlGeneration;
  if (wants_table != std::holds_alternative<Table>(context)) {
    throw std::invalid_argument("example '" + id + "': context does not match task");
  }
  if (!wants_table && document().empty()) {
    throw std::invalid_argument("example '" + id + "': empty document");
  }
}

}  // namespace hardem

#ifndef HARDEM_SOLUTION_H_
#define HARDEM_SOLUTION_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hardem {

// Inclusive token span [start, end] of a document.
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  auto operator<=>(const Span&) const = default;
};

// Where an operand comes from. The enumerator order is the canonical order:
// document numbers, then question numbers, then special numbers, then the
// zero constant used by copy equations.
enum class NumberSource : std::uint8_t { kDocument, kQuestion, kSpecial, kZero };

struct NumberMention {
  double value = 0.0;
  NumberSource source = NumberSource::kDocument;
  int index = 0;  // token index, or index into the special numbers

  // Identity is the position; the value is derived from it.
  bool same_position(const NumberMention& o) const {
    return source == o.source && index == o.index;
  }
};

enum class Operator : std::uint8_t { kPlus, kMinus, kPercent };

struct Equation {
  Operator o1 = Operator::kPlus;
  NumberMention n1;
  Operator o2 = Operator::kPlus;
  NumberMention n2;
};

enum class Aggregation : std::uint8_t { kNone, kSum, kMean, kMax, kMin, kCount };
enum class CompareOp : std::uint8_t { kEq, kLt, kGt };

// WHERE clause term: column `op` question-span value.
struct Condition {
  int column = 0;
  CompareOp op = CompareOp::kEq;
  int value_start = 0;  // question token span, inclusive
  int value_end = 0;
  std::string value_text;  // literal question substring
};

struct SqlQuery {
  int sel = 0;
  Aggregation agg = Aggregation::kNone;
  std::vector<Condition> conditions;  // AND-ed, canonical order, at most 3
};

using Solution = std::variant<Span, Equation, SqlQuery>;

std::strong_ordering compare(const NumberMention& a, const NumberMention& b);
std::strong_ordering compare(const Equation& a, const Equation& b);
std::strong_ordering compare(const Condition& a, const Condition& b);
std::strong_ordering compare(const SqlQuery& a, const SqlQuery& b);

// Total order over solutions of one variant; the First-Only tie-break.
// Throws std::invalid_argument when the variants differ.
std::strong_ordering canonical_order(const Solution& a, const Solution& b);

inline bool canonical_less(const Solution& a, const Solution& b) {
  return canonical_order(a, b) < 0;
}
inline bool same_solution(const Solution& a, const Solution& b) {
  return canonical_order(a, b) == 0;
}

// Sorts canonically and drops duplicates.
void canonicalize(std::vector<Solution>& solutions);

// Index of `needle` in a canonically sorted list, or -1.
long find_canonical(std::span<const Solution> sorted, const Solution& needle);

// Precomputed Z for one example, plus |Z_tot| as enumerated.
struct SolutionSet {
  std::string example_id;
  std::vector<Solution> solutions;
  std::uint64_t candidate_count = 0;
};

std::string_view operator_symbol(Operator op);
std::string_view aggregation_name(Aggregation agg);
std::string_view compare_symbol(CompareOp op);
std::string_view source_name(NumberSource source);

// Human-readable rendering used in logs and eval output, e.g. "41-37",
// "SELECT min(c0) WHERE c2 = guard", "[3,4]".
std::string describe(const Solution& z);

}  // namespace hardem

#endif  // HARDEM_SOLUTION_H_

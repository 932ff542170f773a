#include "hardem/solution.h"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "hardem/text.h"

namespace hardem {
namespace {

auto mention_key(const NumberMention& m) {
  return std::make_tuple(static_cast<int>(m.source), m.index);
}

auto condition_key(const Condition& c) {
  return std::make_tuple(c.column, static_cast<int>(c.op), c.value_start,
                         c.value_end);
}

std::string equation_term(Operator op, const NumberMention& n, bool first) {
  const std::string v = format_number(n.value);
  switch (op) {
    case Operator::kPlus:
      return first ? v : "+" + v;
    case Operator::kMinus:
      return "-" + v;
    case Operator::kPercent:
      return (first ? "" : "+") + v + "%";
  }
  return v;
}

}  // namespace

std::strong_ordering compare(const NumberMention& a, const NumberMention& b) {
  return mention_key(a) <=> mention_key(b);
}

std::strong_ordering compare(const Equation& a, const Equation& b) {
  if (auto c = compare(a.n1, b.n1); c != 0) return c;
  if (auto c = compare(a.n2, b.n2); c != 0) return c;
  if (auto c = a.o1 <=> b.o1; c != 0) return c;
  return a.o2 <=> b.o2;
}

std::strong_ordering compare(const Condition& a, const Condition& b) {
  return condition_key(a) <=> condition_key(b);
}

std::strong_ordering compare(const SqlQuery& a, const SqlQuery& b) {
  if (auto c = a.sel <=> b.sel; c != 0) return c;
  if (auto c = a.agg <=> b.agg; c != 0) return c;
  const std::size_t n = std::min(a.conditions.size(), b.conditions.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare(a.conditions[i], b.conditions[i]); c != 0) return c;
  }
  return a.conditions.size() <=> b.conditions.size();
}

std::strong_ordering canonical_order(const Solution& a, const Solution& b) {
  if (a.index() != b.index()) {
    throw std::invalid_argument("canonical_order: mismatched solution variants");
  }
  return std::visit(
      [&b](const auto& lhs) -> std::strong_ordering {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b);
        if constexpr (std::is_same_v<T, Span>) {
          return lhs <=> rhs;
        } else {
          return compare(lhs, rhs);
        }
      },
      a);
}

void canonicalize(std::vector<Solution>& solutions) {
  std::sort(solutions.begin(), solutions.end(), canonical_less);
  solutions.erase(std::unique(solutions.begin(), solutions.end(), same_solution),
                  solutions.end());
}

long find_canonical(std::span<const Solution> sorted, const Solution& needle) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), needle, canonical_less);
  if (it == sorted.end() || !same_solution(*it, needle)) return -1;
  return static_cast<long>(it - sorted.begin());
}

std::string_view operator_symbol(Operator op) {
  switch (op) {
    case Operator::kPlus: return "+";
    case Operator::kMinus: return "-";
    case Operator::kPercent: return "%";
  }
  return "?";
}

std::string_view aggregation_name(Aggregation agg) {
  switch (agg) {
    case Aggregation::kNone: return "none";
    case Aggregation::kSum: return "sum";
    case Aggregation::kMean: return "mean";
    case Aggregation::kMax: return "max";
    case Aggregation::kMin: return "min";
    case Aggregation::kCount: return "count";
  }
  return "?";
}

std::string_view compare_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kLt: return "<";
    case CompareOp::kGt: return ">";
  }
  return "?";
}

std::string_view source_name(NumberSource source) {
  switch (source) {
    case NumberSource::kDocument: return "document";
    case NumberSource::kQuestion: return "question";
    case NumberSource::kSpecial: return "special";
    case NumberSource::kZero: return "zero";
  }
  return "?";
}

std::string describe(const Solution& z) {
  struct Visitor {
    std::string operator()(const Span& s) const {
      return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + "]";
    }
    std::string operator()(const Equation& e) const {
      std::string out = equation_term(e.o1, e.n1, true);
      if (e.n2.source != NumberSource::kZero) {
        out += equation_term(e.o2, e.n2, false);
      }
      return out;
    }
    std::string operator()(const SqlQuery& q) const {
      std::string out = "SELECT ";
      const std::string col = "c" + std::to_string(q.sel);
      if (q.agg == Aggregation::kNone) {
        out += col;
      } else {
        out += std::string(aggregation_name(q.agg)) + "(" + col + ")";
      }
      for (std::size_t i = 0; i < q.conditions.size(); ++i) {
        const Condition& c = q.conditions[i];
        out += i == 0 ? " WHERE " : " AND ";
        out += "c" + std::to_string(c.column) + " " +
               std::string(compare_symbol(c.op)) + " " + c.value_text;
      }
      return out;
    }
  };
  return std::visit(Visitor{}, z);
}

}  // namespace hardem

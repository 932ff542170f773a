#include "hardem/sqlgen.h"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "hardem/error.h"

namespace hardem {
namespace {

constexpr Aggregation kAggregations[] = {
    Aggregation::kNone, Aggregation::kSum, Aggregation::kMean,
    Aggregation::kMax,  Aggregation::kMin, Aggregation::kCount};
constexpr CompareOp kCompareOps[] = {CompareOp::kEq, CompareOp::kLt, CompareOp::kGt};

bool needs_numeric(Aggregation agg) {
  return agg == Aggregation::kSum || agg == Aggregation::kMean;
}

bool allowed(const Table& t, int sel, Aggregation agg) {
  return !needs_numeric(agg) || t.kind(sel) == ColumnKind::kNumeric;
}

// A condition with its value pre-normalized and pre-parsed.
struct PreparedCondition {
  int column;
  CompareOp op;
  std::string normalized;
  std::optional<double> number;

  explicit PreparedCondition(const Condition& c)
      : column(c.column),
        op(c.op),
        normalized(normalize_text(c.value_text)),
        number(parse_number(c.value_text)) {}

  bool holds(const Table& t, int row) const {
    if (op == CompareOp::kEq) return t.normalized(row, column) == normalized;
    const auto& cell = t.numeric(row, column);
    if (!cell || !number) return false;
    return op == CompareOp::kLt ? *cell < *number : *cell > *number;
  }
};

// Aggregates the sel column over `rows` (ascending row indices).
Denotation aggregate(const Table& t, int sel, Aggregation agg,
                     const std::vector<int>& rows) {
  if (needs_numeric(agg) && t.kind(sel) != ColumnKind::kNumeric) {
    throw AggregationTypeError(std::string(aggregation_name(agg)) +
                               " over text column " + std::to_string(sel));
  }
  switch (agg) {
    case Aggregation::kNone: {
      Denotation out;
      for (int r : rows) out.push_back(t.cell(r, sel));
      return out;
    }
    case Aggregation::kCount:
      return {format_number(static_cast<double>(rows.size()))};
    case Aggregation::kSum:
    case Aggregation::kMean: {
      if (rows.empty()) return {};
      double sum = 0.0;
      for (int r : rows) sum += *t.numeric(r, sel);
      if (agg == Aggregation::kMean) sum /= static_cast<double>(rows.size());
      return {format_number(sum)};
    }
    case Aggregation::kMax:
    case Aggregation::kMin: {
      if (rows.empty()) return {};
      const bool want_max = agg == Aggregation::kMax;
      int best = rows.front();
      for (int r : rows) {
        bool better;
        if (t.kind(sel) == ColumnKind::kNumeric) {
          better = want_max ? *t.numeric(r, sel) > *t.numeric(best, sel)
                            : *t.numeric(r, sel) < *t.numeric(best, sel);
        } else {
          better = want_max ? t.normalized(r, sel) > t.normalized(best, sel)
                            : t.normalized(r, sel) < t.normalized(best, sel);
        }
        if (better) best = r;
      }
      return {t.cell(best, sel)};
    }
  }
  return {};
}

void check_query(const Table& t, const SqlQuery& q) {
  auto in_range = [&t](int c) { return c >= 0 && c < t.num_columns(); };
  if (!in_range(q.sel)) throw std::invalid_argument("sel column out of range");
  if (q.conditions.size() > 3) throw std::invalid_argument("more than 3 conditions");
  for (const auto& c : q.conditions) {
    if (!in_range(c.column)) throw std::invalid_argument("condition column out of range");
  }
}

std::vector<std::string> sorted_normalized(std::span<const std::string> values) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(normalize_text(v));
  std::sort(out.begin(), out.end());
  return out;
}

void dfs_conditions(std::size_t next, std::size_t max_size,
                    const std::vector<Condition>& pool,
                    std::vector<Condition>& current,
                    const std::function<void(const std::vector<Condition>&)>& visit) {
  visit(current);
  if (current.size() == max_size) return;
  for (std::size_t j = next; j < pool.size(); ++j) {
    current.push_back(pool[j]);
    dfs_conditions(j + 1, max_size, pool, current, visit);
    current.pop_back();
  }
}

// Row sets as bit masks, one bit per row.
using RowMask = std::vector<std::uint64_t>;

RowMask full_mask(int rows) {
  RowMask m(static_cast<std::size_t>((rows + 63) / 64), 0);
  for (int r = 0; r < rows; ++r) m[r / 64] |= std::uint64_t{1} << (r % 64);
  return m;
}

std::vector<int> mask_rows(const RowMask& m, int rows) {
  std::vector<int> out;
  for (int r = 0; r < rows; ++r) {
    if (m[r / 64] >> (r % 64) & 1) out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<QuestionSpan> question_spans(const TokenSequence& question, int max_len) {
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  std::vector<QuestionSpan> out;
  for (int s = 0; s < question.size(); ++s) {
    for (int e = s; e < question.size() && e - s + 1 <= max_len; ++e) {
      out.push_back({s, e, question.slice(s, e)});
    }
  }
  return out;
}

Denotation execute_query(const Table& table, const SqlQuery& query) {
  check_query(table, query);
  std::vector<PreparedCondition> conds(query.conditions.begin(), query.conditions.end());
  std::vector<int> rows;
  for (int r = 0; r < table.num_rows(); ++r) {
    if (std::all_of(conds.begin(), conds.end(),
                    [&](const PreparedCondition& c) { return c.holds(table, r); })) {
      rows.push_back(r);
    }
  }
  return aggregate(table, query.sel, query.agg, rows);
}

bool denotation_matches(const Denotation& denotation,
                        std::span<const std::string> answers) {
  if (denotation.size() != answers.size()) return false;
  return sorted_normalized(denotation) == sorted_normalized(answers);
}

std::vector<Condition> candidate_conditions(const TokenSequence& question,
                                            const Table& table,
                                            const QueryLimits& limits) {
  std::vector<QuestionSpan> values;
  std::unordered_set<std::string> seen;
  for (auto& span : question_spans(question, limits.max_value_len)) {
    std::string key = normalize_text(span.text);
    if (key.empty() || !seen.insert(key).second) continue;
    values.push_back(std::move(span));
  }

  std::vector<Condition> pool;
  for (int col = 0; col < table.num_columns(); ++col) {
    std::set<std::string> cells;
    for (int r = 0; r < table.num_rows(); ++r) cells.insert(table.normalized(r, col));
    for (CompareOp op : kCompareOps) {
      for (const auto& v : values) {
        if (limits.pruning == Pruning::kColumnGrounded) {
          const bool keep = op == CompareOp::kEq
                                ? cells.count(normalize_text(v.text)) > 0
                                : parse_number(v.text).has_value();
          if (!keep) continue;
        }
        pool.push_back({col, op, v.start, v.end, v.text});
      }
    }
  }
  return pool;
}

void enumerate_queries(const TokenSequence& question, const Table& table,
                       const QueryLimits& limits,
                       const std::function<void(const SqlQuery&)>& visit) {
  const std::vector<Condition> pool = candidate_conditions(question, table, limits);
  const std::size_t max_size =
      static_cast<std::size_t>(std::clamp(limits.max_conditions, 0, 3));
  SqlQuery q;
  for (int sel = 0; sel < table.num_columns(); ++sel) {
    for (Aggregation agg : kAggregations) {
      if (!allowed(table, sel, agg)) continue;
      q.sel = sel;
      q.agg = agg;
      std::vector<Condition> current;
      dfs_conditions(0, max_size, pool, current,
                     [&](const std::vector<Condition>& conds) {
                       q.conditions = conds;
                       visit(q);
                     });
    }
  }
}

std::vector<SqlQuery> enumerate_queries(const TokenSequence& question,
                                        const Table& table,
                                        const QueryLimits& limits) {
  std::vector<SqlQuery> out;
  enumerate_queries(question, table, limits,
                    [&out](const SqlQuery& q) { out.push_back(q); });
  return out;
}

SolutionSet sql_solution_set(const Example& ex, const QueryLimits& limits) {
  if (ex.task != TaskKind::kSqlGeneration) {
    throw std::invalid_argument("sql_solution_set: example '" + ex.id +
                                "' is not a SQL example");
  }
  const Table& table = ex.table();
  const std::vector<Condition> pool = candidate_conditions(ex.question, table, limits);
  const std::size_t max_size =
      static_cast<std::size_t>(std::clamp(limits.max_conditions, 0, 3));
  const int n_rows = table.num_rows();
  const std::vector<std::string> gold = sorted_normalized(ex.answers);

  std::vector<RowMask> cond_masks;
  for (const auto& c : pool) {
    PreparedCondition pc(c);
    RowMask m(static_cast<std::size_t>((n_rows + 63) / 64), 0);
    for (int r = 0; r < n_rows; ++r) {
      if (pc.holds(table, r)) m[r / 64] |= std::uint64_t{1} << (r % 64);
    }
    cond_masks.push_back(std::move(m));
  }

  SolutionSet out;
  out.example_id = ex.id;
  std::vector<std::size_t> chosen;
  // Walks condition sets depth-first, carrying the surviving-row mask.
  std::function<void(std::size_t, const RowMask&)> walk =
      [&](std::size_t next, const RowMask& mask) {
        const std::vector<int> rows = mask_rows(mask, n_rows);
        for (int sel = 0; sel < table.num_columns(); ++sel) {
          for (Aggregation agg : kAggregations) {
            if (!allowed(table, sel, agg)) continue;
            ++out.candidate_count;
            if (agg == Aggregation::kNone ? rows.size() != gold.size() : gold.size() != 1) {
              continue;
            }
            if (sorted_normalized(aggregate(table, sel, agg, rows)) != gold) continue;
            SqlQuery q{sel, agg, {}};
            for (std::size_t idx : chosen) q.conditions.push_back(pool[idx]);
            out.solutions.emplace_back(std::move(q));
          }
        }
        if (chosen.size() == max_size) return;
        for (std::size_t j = next; j < pool.size(); ++j) {
          RowMask narrowed = mask;
          for (std::size_t w = 0; w < narrowed.size(); ++w) narrowed[w] &= cond_masks[j][w];
          chosen.push_back(j);
          walk(j + 1, narrowed);
          chosen.pop_back();
        }
      };
  walk(0, full_mask(n_rows));
  canonicalize(out.solutions);
  return out;
}

}  // namespace hardem

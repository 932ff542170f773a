#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "hardem/error.h"
#include "hardem/io.h"
#include "hardem/sqlgen.h"
#include "oracles.h"

namespace hardem {
namespace {

Example sql_example(const std::vector<std::string>& question,
                    const std::vector<std::string>& header,
                    std::vector<std::vector<std::string>> rows,
                    std::vector<std::string> answers) {
  Example ex;
  ex.id = "q";
  ex.task = TaskKind::kSqlGeneration;
  ex.question = TokenSequence::from_tokens(question);
  ex.context = Table::make(header, std::move(rows));
  ex.answers = std::move(answers);
  return ex;
}

Condition cond(int col, CompareOp op, int s, const std::string& text) {
  return {col, op, s, s, text};
}

bool contains(const SolutionSet& z, const SqlQuery& q) {
  for (const auto& s : z.solutions) {
    if (same_solution(s, q)) return true;
  }
  return false;
}

TEST(QuestionSpans, Counts) {
  const auto q3 = TokenSequence::from_tokens({"a", "b", "c"});
  EXPECT_EQ(question_spans(q3, 2).size(), 5u);
  EXPECT_EQ(question_spans(TokenSequence::from_tokens({"a"}), 3).size(), 1u);
  const auto q6 = TokenSequence::from_tokens({"a", "b", "c", "d", "e", "f"});
  EXPECT_EQ(question_spans(q6, 6).size(), 21u);
  EXPECT_EQ(question_spans(q6, 60).size(), 21u);
  EXPECT_EQ(question_spans(q3, 2)[1].text, "a b");
}

TEST(ExecuteQuery, TorontoRosterExamples) {
  const Table t = Table::make({"player", "position"}, {{"John Long", "Guard"}, {"Bob", "Center"}});
  SqlQuery q{0, Aggregation::kNone, {cond(1, CompareOp::kEq, 0, "guard")}};
  EXPECT_EQ(execute_query(t, q), (Denotation{"John Long"}));
  EXPECT_EQ(execute_query(t, SqlQuery{0, Aggregation::kCount, {}}), (Denotation{"2"}));
  q.agg = Aggregation::kMin;
  EXPECT_EQ(execute_query(t, q), (Denotation{"John Long"}));

  const Table t2 = Table::make({"player", "position"},
                               {{"John Long", "Guard"}, {"Bob", "Center"}, {"Adam", "guard"}});
  EXPECT_EQ(execute_query(t2, q), (Denotation{"Adam"}));
  q.agg = Aggregation::kMax;
  EXPECT_EQ(execute_query(t2, q), (Denotation{"John Long"}));
}

TEST(ExecuteQuery, NumericAggregates) {
  const Table t = Table::make({"name", "pts"}, {{"a", "10"}, {"b", "3"}, {"c", "1,000"}});
  EXPECT_EQ(execute_query(t, SqlQuery{1, Aggregation::kSum, {}}), (Denotation{"1013"}));
  EXPECT_EQ(execute_query(t, SqlQuery{1, Aggregation::kMean, {cond(1, CompareOp::kLt, 0, "11")}}),
            (Denotation{"6.5"}));
  EXPECT_EQ(execute_query(t, SqlQuery{1, Aggregation::kMax, {}}), (Denotation{"1,000"}));
  EXPECT_EQ(execute_query(t, SqlQuery{0, Aggregation::kNone, {cond(1, CompareOp::kGt, 0, "5")}}),
            (Denotation{"a", "c"}));
  // Lt on a text column fails every row.
  EXPECT_EQ(execute_query(t, SqlQuery{1, Aggregation::kCount, {cond(0, CompareOp::kLt, 0, "5")}}),
            (Denotation{"0"}));
  EXPECT_TRUE(execute_query(t, SqlQuery{1, Aggregation::kSum, {cond(0, CompareOp::kEq, 0, "zz")}})
                  .empty());
  EXPECT_THROW(execute_query(t, SqlQuery{0, Aggregation::kSum, {}}), AggregationTypeError);
  EXPECT_THROW(execute_query(t, SqlQuery{5, Aggregation::kNone, {}}), std::invalid_argument);
}

TEST(ExecuteQuery, MatchesRowScanOracle) {
  Rng rng(41);
  for (int k = 0; k < 300; ++k) {
    const Example ex = test::random_sql_example(rng, static_cast<int>(rng.below(6)),
                                                1 + static_cast<int>(rng.below(5)), 5);
    const SqlQuery q = test::random_query(rng, ex, 3);
    const auto expected = test::oracle_execute(ex.table().rows(), q);
    if (expected) {
      EXPECT_EQ(execute_query(ex.table(), q), *expected);
    } else {
      EXPECT_THROW(execute_query(ex.table(), q), AggregationTypeError);
    }
  }
}

TEST(EnumerateQueries, OneColumnExhaustiveCount) {
  const Example ex = sql_example({"zzz"}, {"n"}, {{"1"}, {"2"}}, {"1"});
  const QueryLimits limits{3, 8, Pruning::kExhaustive};
  // 6 aggregations times the condition subsets of {=, <, >} on the one span.
  EXPECT_EQ(enumerate_queries(ex.question, ex.table(), limits).size(), 6u * (1 + 3 + 3 + 1));
  const QueryLimits grounded{3, 8, Pruning::kColumnGrounded};
  EXPECT_EQ(enumerate_queries(ex.question, ex.table(), grounded).size(), 6u);
}

TEST(EnumerateQueries, TextColumnsSkipSumAndMean) {
  const Example ex = sql_example({"zzz"}, {"name"}, {{"a"}}, {"a"});
  EXPECT_EQ(enumerate_queries(ex.question, ex.table(), QueryLimits{0, 8, Pruning::kExhaustive}).size(),
            4u);
}

TEST(EnumerateQueries, CanonicalAndDeterministic) {
  Rng rng(42);
  const Example ex = test::random_sql_example(rng, 3, 3, 4);
  const QueryLimits limits{2, 2, Pruning::kExhaustive};
  const auto a = enumerate_queries(ex.question, ex.table(), limits);
  const auto b = enumerate_queries(ex.question, ex.table(), limits);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(compare(a[i], b[i]), std::strong_ordering::equal);
    if (i > 0) EXPECT_TRUE(compare(a[i - 1], a[i]) < 0);
  }
}

TEST(EnumerateQueries, GroundedIsSubsetOfExhaustive) {
  Rng rng(43);
  for (int k = 0; k < 10; ++k) {
    const Example ex = test::random_sql_example(rng, 3, 3, 4);
    const auto grounded =
        enumerate_queries(ex.question, ex.table(), QueryLimits{2, 3, Pruning::kColumnGrounded});
    std::vector<Solution> all;
    for (auto& q : enumerate_queries(ex.question, ex.table(), QueryLimits{2, 3, Pruning::kExhaustive})) {
      all.emplace_back(std::move(q));
    }
    for (const auto& q : grounded) EXPECT_GE(find_canonical(all, q), 0);
  }
}

TEST(CandidateConditions, DeduplicatesByNormalizedText) {
  const Example ex = sql_example({"the", "Guard", "guard"}, {"pos"}, {{"guard"}}, {"guard"});
  const auto pool = candidate_conditions(ex.question, ex.table(), QueryLimits{3, 8, Pruning::kExhaustive});
  // Articles normalize away: "the" is empty and dropped, "Guard" repeats
  // "the Guard", "Guard guard" repeats "the Guard guard". First span wins.
  std::vector<std::string> texts;
  for (const auto& c : pool) {
    if (c.op == CompareOp::kEq) texts.push_back(c.value_text);
  }
  EXPECT_EQ(texts, (std::vector<std::string>{"the Guard", "the Guard guard"}));
}

TEST(SqlSolutionSet, TorontoFixture) {
  const auto ex = parse_examples(read_file(HARDEM_TEST_DATA "/wikisql_toronto.jsonl"),
                                 TaskKind::kSqlGeneration)[0];
  const SolutionSet z = sql_solution_set(ex);
  ASSERT_EQ(z.solutions.size(), 5u);
  std::vector<std::string> rendered;
  for (const auto& s : z.solutions) rendered.push_back(describe(s));
  // Player=c0, Year in Toronto=c1, Position=c2. The question's "1996-97"
  // picks out the 1996-97 season rows.
  EXPECT_EQ(rendered, (std::vector<std::string>{
                          "SELECT c0 WHERE c1 = 1996-97 AND c2 = guard",
                          "SELECT max(c0) WHERE c1 = 1996-97 AND c2 = guard",
                          "SELECT min(c0) WHERE c1 = 1996-97",
                          "SELECT min(c0) WHERE c1 = 1996-97 AND c2 = guard",
                          "SELECT min(c0) WHERE c2 = guard"}))
      << ::testing::PrintToString(rendered);
}

TEST(SqlSolutionSet, EmptyTableCount) {
  const Example ex = sql_example({"how", "many"}, {"name"}, {}, {"0"});
  EXPECT_TRUE(contains(sql_solution_set(ex), SqlQuery{0, Aggregation::kCount, {}}));
}

TEST(SqlSolutionSet, MatchesBruteForce) {
  Rng rng(44);
  for (int k = 0; k < 12; ++k) {
    const int max_conditions = k < 8 ? 2 : 3;
    const int cols = k < 8 ? 1 + static_cast<int>(rng.below(4)) : 2;
    const Example ex = test::random_sql_example(rng, 1 + static_cast<int>(rng.below(4)), cols,
                                                k < 8 ? 4 : 3);
    std::uint64_t total = 0;
    const auto expected = test::brute_force_sql(ex, max_conditions, 8, &total);
    const SolutionSet z = sql_solution_set(ex, QueryLimits{max_conditions, 8, Pruning::kExhaustive});
    EXPECT_EQ(z.candidate_count, total);
    ASSERT_EQ(z.solutions.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_TRUE(same_solution(z.solutions[i], expected[i]));
    }
  }
}

TEST(SqlSolutionSet, GroundedWithinExhaustive) {
  Rng rng(45);
  for (int k = 0; k < 20; ++k) {
    const Example ex = test::random_sql_example(rng, 3, 3, 4);
    const SolutionSet g = sql_solution_set(ex, QueryLimits{2, 8, Pruning::kColumnGrounded});
    const SolutionSet e = sql_solution_set(ex, QueryLimits{2, 8, Pruning::kExhaustive});
    for (const auto& s : g.solutions) EXPECT_GE(find_canonical(e.solutions, s), 0);
    EXPECT_LE(g.candidate_count, e.candidate_count);
  }
}

TEST(SqlSolutionSet, GroundedEqualsExhaustiveWhenValuesAreVerbatim) {
  // Every cell is a distinct word and the question repeats cells verbatim; no
  // numbers, so Lt/Gt never fire and both modes agree on Z.
  const Example ex = sql_example({"which", "red", "Oslo"}, {"color", "city"},
                                 {{"red", "Oslo"}, {"blue", "Rome"}, {"green", "Oslo"}},
                                 {"red"});
  const SolutionSet g = sql_solution_set(ex, QueryLimits{3, 8, Pruning::kColumnGrounded});
  const SolutionSet e = sql_solution_set(ex, QueryLimits{3, 8, Pruning::kExhaustive});
  ASSERT_EQ(g.solutions.size(), e.solutions.size());
  for (std::size_t i = 0; i < g.solutions.size(); ++i) {
    EXPECT_TRUE(same_solution(g.solutions[i], e.solutions[i]));
  }
}

}  // namespace
}  // namespace hardem

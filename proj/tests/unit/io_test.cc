#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "hardem/config.h"
#include "hardem/error.h"
#include "hardem/io.h"
#include "hardem/pipeline.h"
#include "oracles.h"

namespace hardem {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("hardem_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(ExampleJson, RoundTripsAllTasks) {
  Rng rng(81);
  std::vector<Example> xs = {test::random_span_example(rng, 6),
                             test::random_arithmetic_example(rng, 4),
                             test::random_sql_example(rng, 3, 2, 4)};
  xs[0].answers.push_back("Second \"alias\"");
  for (const auto& ex : xs) {
    const std::string line = example_to_json(ex);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const Example back = parse_example(line, ex.task, 1);
    EXPECT_EQ(back.id, ex.id);
    EXPECT_EQ(back.question, ex.question);
    EXPECT_EQ(back.answers, ex.answers);
    EXPECT_EQ(back.context, ex.context);
    EXPECT_EQ(example_to_json(back), line);
  }
}

TEST(ExampleJson, SchemaErrorsCarryLineNumbers) {
  const std::string good = R"({"id":"a","question":"q?","document":"d","answers":["d"]})";
  const std::string text = good + "\n\n" + good + "\n" + R"({"id":"b","question":"q"})" + "\n";
  try {
    parse_examples(text, TaskKind::kSpanExtraction);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(parse_example("{not json", TaskKind::kSpanExtraction, 3), SchemaError);
  EXPECT_THROW(parse_example(R"({"id":"a","question":"q","document":"d","answers":[]})",
                             TaskKind::kSpanExtraction, 1),
               SchemaError);
  EXPECT_THROW(parse_example(R"({"id":"a","question":"q","document":"d","answers":["x"]})",
                             TaskKind::kSqlGeneration, 1),
               SchemaError);
  EXPECT_THROW(parse_example(R"({"id":"a","question":"q","table":{"header":["h"],"rows":[["1","2"]]},"answers":["1"]})",
                             TaskKind::kSqlGeneration, 1),
               SchemaError);
  EXPECT_TRUE(parse_examples("", TaskKind::kArithmetic).empty());
}

TEST(SolutionSetJson, RoundTripsEveryVariant) {
  SolutionSet spans{"s", {Span{0, 1}, Span{4, 4}}, 55};
  SolutionSet eqs{"e",
                  {Equation{Operator::kPlus, {41, NumberSource::kDocument, 31}, Operator::kMinus,
                            {37, NumberSource::kDocument, 68}},
                   Equation{Operator::kPercent, {2.5, NumberSource::kQuestion, 2}, Operator::kPlus,
                            {0, NumberSource::kZero, 0}},
                   Equation{Operator::kPercent, {2.5, NumberSource::kQuestion, 2}, Operator::kMinus,
                            {100, NumberSource::kSpecial, 8}}},
                  3420};
  canonicalize(eqs.solutions);
  SolutionSet sql{"q",
                  {SqlQuery{0, Aggregation::kMin, {{1, CompareOp::kEq, 7, 7, "1996-97"},
                                                   {2, CompareOp::kEq, 3, 3, "guard"}}},
                   SqlQuery{1, Aggregation::kCount, {}}},
                  15808};
  SolutionSet empty{"none", {}, 0};
  for (const auto& z : {spans, eqs, sql, empty}) {
    const std::string line = solution_set_to_json(z);
    const SolutionSet back = parse_solution_set(line, 1);
    EXPECT_EQ(back.example_id, z.example_id);
    EXPECT_EQ(back.candidate_count, z.candidate_count);
    ASSERT_EQ(back.solutions.size(), z.solutions.size());
    for (std::size_t i = 0; i < z.solutions.size(); ++i) {
      EXPECT_TRUE(same_solution(back.solutions[i], z.solutions[i]));
    }
    EXPECT_EQ(solution_set_to_json(back), line);
  }
}

TEST(SolutionSetJson, RejectsOutOfOrderAndMixedRecords) {
  EXPECT_THROW(parse_solution_set(
                   R"({"id":"a","candidate_count":3,"solutions":[{"type":"span","s":2,"e":2},{"type":"span","s":0,"e":0}]})",
                   5),
               SchemaError);
  EXPECT_THROW(parse_solution_set(R"({"id":"a","candidate_count":0,"solutions":[{"type":"span","s":0,"e":0}]})", 1),
               SchemaError);
  EXPECT_THROW(parse_solution_set(R"({"id":"a","candidate_count":9,"solutions":[{"type":"tree"}]})", 1),
               SchemaError);
}

TEST(EvalRecordJson, RoundTrip) {
  EvalRecord r;
  r.id = "x1";
  r.predicted = Span{3, 4};
  r.answer = "Robert Schumann";
  r.em = 1;
  r.f1 = 1;
  r.rouge_l = 1;
  r.z_size = 6;
  r.sparsity = {0.5, std::nullopt};
  const std::vector<double> eps = {1e-3, 1e-4};
  const std::string line = eval_record_to_json(r, eps);
  std::vector<double> eps_back;
  const EvalRecord back = parse_eval_record(line, 1, &eps_back);
  EXPECT_EQ(eps_back, eps);
  EXPECT_EQ(back.id, r.id);
  EXPECT_TRUE(same_solution(*back.predicted, *r.predicted));
  EXPECT_EQ(back.answer, r.answer);
  EXPECT_EQ(back.z_size, r.z_size);
  EXPECT_EQ(back.sparsity, r.sparsity);
  EXPECT_EQ(eval_record_to_json(back, eps), line);

  EvalRecord none;
  none.id = "x2";
  none.sparsity = {std::nullopt, std::nullopt};
  const EvalResult all = parse_eval_records(line + "\n" + eval_record_to_json(none, eps) + "\n");
  ASSERT_EQ(all.records.size(), 2u);
  EXPECT_FALSE(all.records[1].predicted);
  EXPECT_EQ(all.mean_em, 0.5);
}

TEST(Csv, Quoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  const std::vector<std::string> row = {"a", "b,c", ""};
  EXPECT_EQ(csv_row(row), "a,\"b,c\",\n");
}

TEST(Files, AtomicWriteLeavesNoTemporary) {
  const fs::path dir = scratch_dir("atomic");
  const fs::path target = dir / "out.txt";
  write_file_atomic(target, "first");
  write_file_atomic(target, "second\n");
  EXPECT_EQ(read_file(target), "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
  EXPECT_THROW(read_file(dir / "missing.txt"), Error);
}

Checkpoint sample_checkpoint() {
  Checkpoint c;
  c.task = TaskKind::kArithmetic;
  c.scorer = Scorer::factorized_tag(10);
  Rng rng(82);
  for (double& p : c.scorer.params) p = rng.uniform() * 2 - 1;
  c.scorer.params[0] = -0.0;
  c.scorer.params[1] = std::numeric_limits<double>::denorm_min();
  c.scorer.params[2] = 0.1 + 0.2;
  c.scorer.params[3] = -1e300;
  c.step = 1234;
  c.config_text = RunConfig::defaults(TaskKind::kArithmetic).to_text();
  c.config_hash = RunConfig::defaults(TaskKind::kArithmetic).hash();
  return c;
}

TEST(CheckpointFormat, BitExactRoundTrip) {
  const Checkpoint c = sample_checkpoint();
  const std::string bytes = serialize_checkpoint(c);
  const Checkpoint back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back.task, c.task);
  EXPECT_EQ(back.step, c.step);
  EXPECT_EQ(back.config_hash, c.config_hash);
  EXPECT_EQ(back.config_text, c.config_text);
  ASSERT_EQ(back.scorer.params.size(), c.scorer.params.size());
  for (std::size_t i = 0; i < c.scorer.params.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.scorer.params[i]),
              std::bit_cast<std::uint64_t>(c.scorer.params[i]));
  }
  EXPECT_EQ(serialize_checkpoint(back), bytes);
}

TEST(CheckpointFormat, LittleEndianPayload) {
  Checkpoint c;
  c.scorer = Scorer::tabular(1);
  c.scorer.params[0] = 1.0;  // 0x3FF0000000000000
  const std::string bytes = serialize_checkpoint(c);
  ASSERT_GE(bytes.size(), 8u);
  const std::string tail = bytes.substr(bytes.size() - 8);
  EXPECT_EQ(tail, std::string("\x00\x00\x00\x00\x00\x00\xF0\x3F", 8));
  EXPECT_EQ(bytes.substr(0, 1), "{");
}

TEST(CheckpointFormat, RejectsDamage) {
  const std::string bytes = serialize_checkpoint(sample_checkpoint());
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 3)), CheckpointError);
  EXPECT_THROW(deserialize_checkpoint(bytes + "x"), CheckpointError);
  EXPECT_THROW(deserialize_checkpoint("not a checkpoint"), CheckpointError);
  EXPECT_THROW(deserialize_checkpoint(""), CheckpointError);
}

}  // namespace
}  // namespace hardem

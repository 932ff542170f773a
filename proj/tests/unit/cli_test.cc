#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "hardem/config.h"
#include "hardem/io.h"
#include "hardem/pipeline.h"
#include "hardem_cli/cli.h"

namespace hardem {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("hardem_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& content) const {
    write_file_atomic(dir_ / name, content);
  }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

const std::string kData = HARDEM_TEST_DATA;

TEST_F(CliTest, PrecomputeEmptyInput) {
  write("empty.jsonl", "");
  ASSERT_EQ(run({"precompute", "--task", "span", "--in", path("empty.jsonl"), "--out", path("z.jsonl")}),
            cli::kOk)
      << err_.str();
  EXPECT_EQ(read_file(path("z.jsonl")), "");
  EXPECT_EQ(out_.str(), "examples 0\nempty_z 0\nmean_z 0\nmedian_z 0\n");
}

TEST_F(CliTest, PrecomputeFixturesAndSummary) {
  ASSERT_EQ(run({"precompute", "--task", "arithmetic", "--in", kData + "/drop_field_goals.jsonl", "--out",
                 path("z.jsonl")}),
            cli::kOk)
      << err_.str();
  EXPECT_NE(out_.str().find("mean_z 28\n"), std::string::npos) << out_.str();
  const auto sets = parse_solution_sets(read_file(path("z.jsonl")));
  ASSERT_EQ(sets.size(), 1u);
  std::vector<std::string> rendered;
  for (const auto& s : sets[0].solutions) rendered.push_back(describe(s));
  for (const char* want : {"41-37", "40-36", "10-6"}) {
    EXPECT_NE(std::find(rendered.begin(), rendered.end(), want), rendered.end()) << want;
  }

  ASSERT_EQ(run({"precompute", "--task", "sql", "--in", kData + "/wikisql_toronto.jsonl", "--out",
                 path("q.jsonl")}),
            cli::kOk);
  EXPECT_EQ(parse_solution_sets(read_file(path("q.jsonl")))[0].solutions.size(), 5u);
}

TEST_F(CliTest, PrecomputeSummaryMatchesOutputFile) {
  write("ex.jsonl",
        R"({"id":"a","question":"who","document":"x y x y x","answers":["x"]})" "\n"
        R"({"id":"b","question":"who","document":"p q","answers":["zzz"]})" "\n"
        R"({"id":"c","question":"who","document":"m n m","answers":["m","n"]})" "\n"
        R"({"id":"d","question":"who","document":"k","answers":["k"]})" "\n");
  ASSERT_EQ(run({"precompute", "--task", "span", "--in", path("ex.jsonl"), "--out", path("z.jsonl")}),
            cli::kOk);
  const auto sets = parse_solution_sets(read_file(path("z.jsonl")));
  const cli::PrecomputeSummary s = cli::summarize(sets);
  // Sizes 3, 0, 3, 1.
  EXPECT_EQ(s.examples, 4u);
  EXPECT_EQ(s.empty, 1u);
  EXPECT_EQ(s.mean_z, 7.0 / 4.0);
  EXPECT_EQ(s.median_z, 2.0);
  EXPECT_EQ(out_.str(), "examples 4\nempty_z 1\nmean_z 1.75\nmedian_z 2\n");
}

TEST_F(CliTest, SchemaErrorExitCodeAndNoPartialOutput) {
  write("bad.jsonl", R"({"id":"a","question":"q","document":"d","answers":["d"]})" "\n{oops}\n");
  EXPECT_EQ(run({"precompute", "--task", "span", "--in", path("bad.jsonl"), "--out", path("z.jsonl")}),
            cli::kSchemaError);
  EXPECT_NE(err_.str().find("line 2"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(path("z.jsonl")));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"--help"}), cli::kOk);
  EXPECT_EQ(run({"precompute"}), cli::kFailure);
  EXPECT_EQ(run({"frobnicate"}), cli::kFailure);
  write("c.cfg", "task = sql\n");
  write("e.jsonl", "");
  EXPECT_EQ(run({"precompute", "--task", "span", "--config", path("c.cfg"), "--in", path("e.jsonl"),
                 "--out", path("z.jsonl")}),
            cli::kFailure);
  EXPECT_EQ(run({"precompute", "--task", "span", "--set", "max_span_len=0", "--in", path("e.jsonl"),
                 "--out", path("z.jsonl")}),
            cli::kFailure);
}

TEST_F(CliTest, TrainZeroStepsKeepsInitialization) {
  const std::string in = kData + "/triviaqa_schumann.jsonl";
  ASSERT_EQ(run({"precompute", "--task", "span", "--in", in, "--out", path("z.jsonl")}), cli::kOk);
  ASSERT_EQ(run({"train", "--task", "span", "--in", in, "--solutions", path("z.jsonl"), "--set",
                 "max_steps=0", "--out", path("m.ckpt")}),
            cli::kOk)
      << err_.str();
  const Checkpoint c = deserialize_checkpoint(read_file(path("m.ckpt")));
  EXPECT_EQ(c.step, 0);
  EXPECT_EQ(c.scorer, Scorer::factorized_span());
  EXPECT_EQ(read_file(path("m.ckpt.steps.csv")), "step,objective,loss\n");
}

TEST_F(CliTest, TrainIsByteIdenticalForAFixedSeed) {
  const std::string in = kData + "/drop_field_goals.jsonl";
  ASSERT_EQ(run({"precompute", "--task", "arithmetic", "--in", in, "--out", path("z.jsonl")}), cli::kOk);
  for (const char* name : {"a.ckpt", "b.ckpt"}) {
    ASSERT_EQ(run({"train", "--task", "arithmetic", "--in", in, "--solutions", path("z.jsonl"),
                   "--objective", "annealed_hard", "--tau", "5", "--seed", "17", "--set",
                   "max_steps=12", "--set", "batch_size=1", "--out", path(name)}),
              cli::kOk)
        << err_.str();
  }
  EXPECT_EQ(read_file(path("a.ckpt")), read_file(path("b.ckpt")));
  EXPECT_EQ(read_file(path("a.ckpt.steps.csv")), read_file(path("b.ckpt.steps.csv")));
  const Checkpoint c = deserialize_checkpoint(read_file(path("a.ckpt")));
  EXPECT_EQ(c.step, 12);
  EXPECT_EQ(c.config_hash, config_from_text(c.config_text, TaskKind::kArithmetic).hash());
}

TEST_F(CliTest, TrainAbortsWithExitThree) {
  write("ex.jsonl", R"({"id":"a","question":"who","document":"p q","answers":["zzz"]})" "\n");
  ASSERT_EQ(run({"precompute", "--task", "span", "--in", path("ex.jsonl"), "--out", path("z.jsonl")}),
            cli::kOk);
  EXPECT_EQ(run({"train", "--task", "span", "--in", path("ex.jsonl"), "--solutions", path("z.jsonl"),
                 "--out", path("m.ckpt")}),
            cli::kTrainingAbort);
  EXPECT_FALSE(fs::exists(path("m.ckpt")));

  const std::string in = kData + "/triviaqa_schumann.jsonl";
  ASSERT_EQ(run({"precompute", "--task", "span", "--in", in, "--out", path("t.jsonl")}), cli::kOk);
  EXPECT_EQ(run({"train", "--task", "span", "--in", in, "--solutions", path("t.jsonl"), "--set",
                 "learning_rate=1e308", "--set", "gradient_clip=0", "--set", "max_steps=20",
                 "--out", path("m.ckpt")}),
            cli::kTrainingAbort)
      << out_.str() << err_.str();
  EXPECT_NE(err_.str().find("triviaqa-schumann"), std::string::npos) << err_.str();
}

TEST_F(CliTest, EvalPerfectScorer) {
  write("ex.jsonl", R"({"id":"one","question":"which","document":"a b answer c","answers":["answer"]})" "\n");
  const auto examples = parse_examples(read_file(path("ex.jsonl")), TaskKind::kSpanExtraction);
  RunConfig config = RunConfig::defaults(TaskKind::kSpanExtraction);
  const auto candidates = enumerate_candidates(examples[0], config.precompute);
  config.set("scorer", "tabular");
  config.set("tabular_size", std::to_string(candidates.size()));
  Checkpoint c;
  c.task = TaskKind::kSpanExtraction;
  c.scorer = config.make_scorer();
  c.scorer.params[static_cast<std::size_t>(find_canonical(candidates, Span{2, 2}))] = 10.0;
  c.config_text = config.to_text();
  c.config_hash = config.hash();
  write("p.ckpt", serialize_checkpoint(c));

  ASSERT_EQ(run({"eval", "--in", path("ex.jsonl"), "--checkpoint", path("p.ckpt"), "--out", path("ev")}),
            cli::kOk)
      << err_.str();
  const EvalResult r = parse_eval_records(read_file(path("ev/predictions.jsonl")));
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.mean_em, 1.0);
  EXPECT_EQ(r.records[0].answer, "answer");
  const std::string metrics = read_file(path("ev/metrics.csv"));
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')), "metric,value");
  EXPECT_NE(metrics.find("\nem,1\n"), std::string::npos) << metrics;
  EXPECT_NE(metrics.find("sparsity_mean_per_example@0.001,0\n"), std::string::npos) << metrics;
  EXPECT_EQ(read_file(path("ev/breakdown.csv")),
            "z_bucket,count,em\n0,0,0\n1,1,1\n2-3,0,0\n4-10,0,0\n11+,0,0\n");

  EXPECT_EQ(run({"eval", "--task", "sql", "--in", path("ex.jsonl"), "--checkpoint", path("p.ckpt"),
                 "--out", path("ev2")}),
            cli::kFailure);
}

TEST_F(CliTest, EvalUniformScorerPicksCanonicalFirstEquation) {
  // Zero parameters give a uniform distribution, so the prediction is the
  // canonical-first candidate: the first two operands added.
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"3 and 4 yards", "7"}, {"10 then 6", "4"}, {"2 2 9", "4"}, {"five 1 1", "6"}, {"8 1", "9.0"}};
  std::string text;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    text += R"({"id":"e)" + std::to_string(i) + R"(","question":"how many","document":")" +
            cases[i].first + R"(","answers":[")" + cases[i].second + "\"]}\n";
  }
  write("ex.jsonl", text);
  const auto examples = parse_examples(text, TaskKind::kArithmetic);
  double expected = 0;
  for (const auto& ex : examples) {
    std::vector<double> values;
    for (const auto& t : ex.document().tokens) {
      if (auto v = parse_number(t.text)) values.push_back(*v);
    }
    expected += (values[0] + values[1] == *parse_number(ex.answers[0])) ? 1 : 0;
  }
  expected /= static_cast<double>(examples.size());
  EXPECT_EQ(expected, 0.8);

  ASSERT_EQ(run({"precompute", "--task", "arithmetic", "--in", path("ex.jsonl"), "--out", path("z.jsonl")}),
            cli::kOk);
  ASSERT_EQ(run({"train", "--task", "arithmetic", "--in", path("ex.jsonl"), "--solutions",
                 path("z.jsonl"), "--set", "max_steps=0", "--out", path("m.ckpt")}),
            cli::kOk);
  ASSERT_EQ(run({"eval", "--in", path("ex.jsonl"), "--checkpoint", path("m.ckpt"), "--out", path("ev")}),
            cli::kOk)
      << err_.str();
  const EvalResult r = parse_eval_records(read_file(path("ev/predictions.jsonl")));
  EXPECT_EQ(r.records.size(), examples.size());
  EXPECT_NEAR(r.mean_em, expected, 1e-12);
}

TEST_F(CliTest, AnalyzeJoinsRunsSideBySide) {
  const std::vector<double> eps = {1e-3};
  auto eval_dir = [&](const std::string& name, std::vector<std::pair<std::size_t, double>> rows) {
    std::string text;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EvalRecord r;
      r.id = "x" + std::to_string(i);
      r.z_size = rows[i].first;
      r.em = rows[i].second;
      r.sparsity = {rows[i].first ? std::optional<double>(0.25) : std::nullopt};
      text += eval_record_to_json(r, eps) + "\n";
    }
    fs::create_directories(dir_ / name);
    write(name + "/predictions.jsonl", text);
  };
  eval_dir("mml", {{1, 1}, {1, 0}, {5, 0}, {5, 0}});
  eval_dir("hard", {{1, 1}, {1, 1}, {5, 1}, {5, 0}});

  ASSERT_EQ(run({"analyze", "--in", path("mml"), "--in", path("hard"), "--set", "z_buckets=0-3,4+",
                 "--out", path("an")}),
            cli::kOk)
      << err_.str();
  EXPECT_EQ(read_file(path("an/breakdown.csv")),
            "z_bucket,mml_count,mml_em,hard_count,hard_em\n0-3,2,0.5,2,1\n4+,2,0,2,0.5\n");
  EXPECT_EQ(read_file(path("an/sparsity.csv")), "epsilon,mml_sparsity,hard_sparsity\n0.001,0.25,0.25\n");

  ASSERT_EQ(run({"analyze", "--in", path("mml"), "--set", "z_buckets=0+", "--out", path("one")}),
            cli::kOk);
  EXPECT_EQ(read_file(path("one/breakdown.csv")), "z_bucket,mml_count,mml_em\n0+,4,0.25\n");
}

}  // namespace
}  // namespace hardem

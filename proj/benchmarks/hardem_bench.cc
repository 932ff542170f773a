// Throughput of the hot paths: span scanning, equation and query enumeration,
// and one training step.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "hardem/arithmetic.h"
#include "hardem/learning.h"
#include "hardem/span_match.h"
#include "hardem/sqlgen.h"
#include "hardem/table.h"
#include "hardem/text.h"

namespace {

using namespace hardem;

std::vector<std::string> words(int n, std::uint64_t seed) {
  static const char* vocab[] = {"the", "river", "flows", "north", "past", "old", "mill",
                                "town", "and", "into", "a", "wide", "lake", "near", "hills"};
  Rng rng(seed);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.emplace_back(vocab[rng.below(15)]);
  return out;
}

Example span_example(int doc_len) {
  Example ex;
  ex.id = "bench";
  ex.task = TaskKind::kSpanExtraction;
  ex.question = TokenSequence::from_tokens({"where", "does", "the", "river", "flow"});
  ex.context = TokenSequence::from_tokens(words(doc_len, 7));
  ex.answers = {"wide lake", "the lake"};
  return ex;
}

void BM_ExactMatchScan(benchmark::State& state) {
  const Example ex = span_example(static_cast<int>(state.range(0)));
  const MatcherKind m{MatchFunction::kExactMatch, 10, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(find_matching_spans(ex.document(), ex.answers, m));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExactMatchScan)->Arg(100)->Arg(400)->Arg(1600);

void BM_RougeLScan(benchmark::State& state) {
  const Example ex = span_example(static_cast<int>(state.range(0)));
  const MatcherKind m{MatchFunction::kRougeL, 10, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(find_matching_spans(ex.document(), ex.answers, m));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RougeLScan)->Arg(100)->Arg(400)->Arg(1600);

void BM_EquationEnumeration(benchmark::State& state) {
  std::vector<std::string> doc;
  Rng rng(11);
  for (int i = 0; i < state.range(0); ++i) {
    doc.push_back("yards");
    doc.push_back(std::to_string(1 + rng.below(60)));
  }
  Example ex;
  ex.id = "bench";
  ex.task = TaskKind::kArithmetic;
  ex.question = TokenSequence::from_tokens({"how", "many", "yards"});
  ex.context = TokenSequence::from_tokens(doc);
  ex.answers = {"4"};
  for (auto _ : state) benchmark::DoNotOptimize(arithmetic_solution_set(ex));
}
BENCHMARK(BM_EquationEnumeration)->Arg(10)->Arg(40)->Arg(160);

void BM_SqlSolutionSet(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  std::vector<std::vector<std::string>> cells;
  for (int r = 0; r < rows; ++r) {
    cells.push_back({"player" + std::to_string(r), std::to_string(1990 + r % 8),
                     r % 3 ? "guard" : "forward", std::to_string(r % 13)});
  }
  Example ex;
  ex.id = "bench";
  ex.task = TaskKind::kSqlGeneration;
  ex.question = TokenSequence::from_tokens(
      {"which", "guard", "played", "in", "1993", "with", "number", "7"});
  ex.context = Table::make({"player", "year", "position", "number"}, cells);
  ex.answers = {"player3"};
  const QueryLimits limits{static_cast<int>(state.range(2)), 4,
                           static_cast<Pruning>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(sql_solution_set(ex, limits));
}
BENCHMARK(BM_SqlSolutionSet)
    ->Args({20, static_cast<int>(Pruning::kColumnGrounded), 3})
    ->Args({200, static_cast<int>(Pruning::kColumnGrounded), 3})
    ->Args({20, static_cast<int>(Pruning::kExhaustive), 2});

void BM_TrainStep(benchmark::State& state) {
  const Scorer scorer = Scorer::log_linear("span", 1 << 16);
  const MatcherKind m{MatchFunction::kExactMatch, 5, std::nullopt};
  std::vector<TrainingInstance> data;
  for (int k = 0; k < 32; ++k) {
    Example ex = span_example(200);
    ex.context = TokenSequence::from_tokens(words(200, 100 + k));
    const auto z = find_matching_spans(ex.document(), ex.answers, m);
    if (z.solutions.empty()) continue;
    std::vector<Solution> cands;
    for (const auto& s : enumerate_spans(200, m.max_span_len)) cands.emplace_back(s);
    data.push_back(make_training_instance(scorer, ex, cands, z.solutions));
  }
  TrainConfig c;
  c.objective = static_cast<Objective>(state.range(0));
  c.batch_size = 8;
  c.max_steps = 1;
  c.learning_rate = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, scorer, c));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.batch_size));
}
BENCHMARK(BM_TrainStep)
    ->Arg(static_cast<int>(Objective::kMml))
    ->Arg(static_cast<int>(Objective::kHard));

}  // namespace

BENCHMARK_MAIN();

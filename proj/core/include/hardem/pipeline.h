#ifndef HARDEM_PIPELINE_H_
#define HARDEM_PIPELINE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hardem/arithmetic.h"
#include "hardem/example.h"
#include "hardem/learning.h"
#include "hardem/metrics.h"
#include "hardem/solution.h"
#include "hardem/span_match.h"
#include "hardem/sqlgen.h"

namespace hardem {

struct PrecomputeOptions {
  MatcherKind matcher;
  ArithmeticOptions arithmetic;
  QueryLimits sql;
};

// Z for any task. Span extraction uses the noisy rule when
// matcher.noisy_rank_k is set.
SolutionSet compute_solution_set(const Example& ex, const PrecomputeOptions& options);

// Z_tot in canonical order.
std::vector<Solution> enumerate_candidates(const Example& ex,
                                           const PrecomputeOptions& options);

// f(z) as answer text: the span's text, the equation's value, or the query's
// denotation joined with " | ".
std::string solution_answer(const Example& ex, const Solution& z);

// Does f(z) match the gold answers, under the same rule precompute uses.
bool solution_matches(const Example& ex, const Solution& z,
                      const PrecomputeOptions& options);

// Scores one example: predicts the argmax over Z_tot (not Z) and fills EM,
// F1, ROUGE-L, |Z| and sparsity of Z at each epsilon.
EvalRecord evaluate_example(const Scorer& scorer, const Example& ex,
                            const PrecomputeOptions& options,
                            std::span<const double> epsilons);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers write results
// by index, so output order never depends on scheduling. If any call throws,
// the exception of the lowest failing index is rethrown once all are done.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace hardem

#endif  // HARDEM_PIPELINE_H_

#include "hardem/pipeline.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "hardem/error.h"

namespace hardem {

SolutionSet compute_solution_set(const Example& ex, const PrecomputeOptions& options) {
  SolutionSet z;
  switch (ex.task) {
    case TaskKind::kSpanExtraction:
      z = options.matcher.noisy_rank_k
              ? find_noisy_spans(ex.document(), ex.answers, options.matcher)
              : find_matching_spans(ex.document(), ex.answers, options.matcher);
      break;
    case TaskKind::kArithmetic:
      z = arithmetic_solution_set(ex, options.arithmetic);
      break;
    case TaskKind::kSqlGeneration:
      z = sql_solution_set(ex, options.sql);
      break;
  }
  z.example_id = ex.id;
  return z;
}

std::vector<Solution> enumerate_candidates(const Example& ex,
                                           const PrecomputeOptions& options) {
  std::vector<Solution> out;
  switch (ex.task) {
    case TaskKind::kSpanExtraction:
      for (const Span& s : enumerate_spans(ex.document().size(), options.matcher.max_span_len)) {
        out.emplace_back(s);
      }
      break;
    case TaskKind::kArithmetic: {
      const auto mentions = extract_numbers(ex.question, ex.document());
      enumerate_equations(
          mentions, options.arithmetic.specials,
          [&out](const Equation& e) { out.emplace_back(e); },
          options.arithmetic.allow_copy);
      break;
    }
    case TaskKind::kSqlGeneration:
      enumerate_queries(ex.question, ex.table(), options.sql,
                        [&out](const SqlQuery& q) { out.emplace_back(q); });
      break;
  }
  return out;
}

std::string solution_answer(const Example& ex, const Solution& z) {
  struct Visitor {
    const Example& ex;
    std::string operator()(const Span& s) const { return ex.document().slice(s.start, s.end); }
    std::string operator()(const Equation& e) const { return format_number(execute_equation(e)); }
    std::string operator()(const SqlQuery& q) const {
      std::string out;
      for (const auto& cell : execute_query(ex.table(), q)) {
        if (!out.empty()) out += " | ";
        out += cell;
      }
      return out;
    }
  };
  return std::visit(Visitor{ex}, z);
}

bool solution_matches(const Example& ex, const Solution& z,
                      const PrecomputeOptions& options) {
  struct Visitor {
    const Example& ex;
    const PrecomputeOptions& options;
    bool operator()(const Span& s) const {
      return find_canonical(compute_solution_set(ex, options).solutions, s) >= 0;
    }
    bool operator()(const Equation& e) const {
      const double v = execute_equation(e);
      for (const auto& a : ex.answers) {
        if (auto g = parse_number(a); g && std::fabs(v - *g) <= options.arithmetic.tol) {
          return true;
        }
      }
      return false;
    }
    bool operator()(const SqlQuery& q) const {
      return denotation_matches(execute_query(ex.table(), q), ex.answers);
    }
  };
  return std::visit(Visitor{ex, options}, z);
}

EvalRecord evaluate_example(const Scorer& scorer, const Example& ex,
                            const PrecomputeOptions& options,
                            std::span<const double> epsilons) {
  EvalRecord rec;
  rec.id = ex.id;
  rec.sparsity.assign(epsilons.size(), std::nullopt);

  std::vector<Solution> candidates = enumerate_candidates(ex, options);
  SolutionSet z;
  try {
    z = compute_solution_set(ex, options);
  } catch (const NonNumericAnswer&) {
    z.example_id = ex.id;  // nothing can match; |Z| = 0
  }
  rec.z_size = z.solutions.size();
  if (candidates.empty()) return rec;

  const CandidateDistribution dist = score_candidates(scorer, ex, std::move(candidates));
  const std::size_t best = dist.argmax();
  rec.predicted = dist.candidates[best];
  rec.answer = solution_answer(ex, *rec.predicted);

  if (ex.task == TaskKind::kSqlGeneration) {
    rec.em = denotation_matches(execute_query(ex.table(), std::get<SqlQuery>(*rec.predicted)),
                                ex.answers)
                 ? 1.0
                 : 0.0;
  } else {
    rec.em = exact_match(rec.answer, ex.answers, ex.task == TaskKind::kArithmetic);
  }
  rec.f1 = token_f1(rec.answer, ex.answers);
  rec.rouge_l = answer_rouge_l(rec.answer, ex.answers);

  if (!z.solutions.empty()) {
    std::vector<double> z_probs;
    for (const auto& member : z.solutions) {
      const long i = find_canonical(dist.candidates, member);
      z_probs.push_back(i < 0 ? 0.0 : dist.probability(static_cast<std::size_t>(i)));
    }
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
      rec.sparsity[k] = sparsity(z_probs, epsilons[k]);
    }
  }
  return rec;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            // Keep the lowest failing index so reports do not depend on timing.
            std::lock_guard<std::mutex> lock(error_mu);
            if (i < error_index) {
              error_index = i;
              error = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace hardem

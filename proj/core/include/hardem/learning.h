#ifndef HARDEM_LEARNING_H_
#define HARDEM_LEARNING_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardem/example.h"
#include "hardem/solution.h"

namespace hardem {

enum class ScorerKind { kTabular, kLogLinear, kFactorizedSpan, kFactorizedTag };

std::string_view scorer_name(ScorerKind kind);
// "tabular", "log_linear", "factorized_span", "factorized_tag".
ScorerKind parse_scorer(std::string_view name);

// Parameterized model of P(z | x; theta). Parameter layouts:
//   Tabular         one score per candidate position
//   LogLinear       hashed weight vector, dot product with phi(x, z)
//   FactorizedSpan  [start weights | end weights], kTokenFeatureDim each
//   FactorizedTag   4 tag weight rows of kTokenFeatureDim (none, +, -, %),
//                   then 4 tag scores per special number
struct Scorer {
  ScorerKind kind = ScorerKind::kTabular;
  std::string extractor;          // LogLinear only
  std::size_t num_specials = 0;   // FactorizedTag only
  std::vector<double> params;

  static Scorer tabular(std::size_t candidates);
  static Scorer log_linear(std::string extractor, std::size_t dim);
  static Scorer factorized_span();
  static Scorer factorized_tag(std::size_t num_specials);

  bool operator==(const Scorer&) const = default;
};

// Tag index of an operator in the tagging model: + -> 1, - -> 2, % -> 3.
int operator_tag(Operator op);

struct CandidateDistribution {
  std::vector<Solution> candidates;
  std::vector<double> log_probs;

  double probability(std::size_t i) const;
  // Most probable candidate; ties go to the lowest index.
  std::size_t argmax() const;
};

std::vector<double> log_softmax(std::span<const double> scores);
double log_sum_exp(std::span<const double> values);

// Direct evaluation of P(z | x; theta) over `candidates`, in log space.
// Factorized scorers take per-position softmaxes over the whole input and
// renormalize the induced product over the candidate set.
// Throws FeatureDimensionMismatch when the parameters do not fit.
CandidateDistribution score_candidates(const Scorer& scorer, const Example& ex,
                                       std::vector<Solution> candidates);

// Candidate scores as a sparse linear map of the parameters, s = A * theta,
// such that log P(z_i) = s_i - logsumexp(s). For the factorized scorers s_i
// differs from the unnormalized log-probability by a candidate-independent
// constant, which renormalization removes.
class LinearScores {
 public:
  std::size_t num_candidates() const { return row_begin_.empty() ? 0 : row_begin_.size() - 1; }
  std::size_t num_params() const { return num_params_; }

  std::vector<double> evaluate(std::span<const double> params) const;
  // grad += weight * A[row, :]
  void accumulate(std::size_t row, double weight, std::span<double> grad) const;

 private:
  friend LinearScores compile_scores(const Scorer&, const Example&,
                                     std::span<const Solution>);
  std::size_t num_params_ = 0;
  std::vector<std::size_t> row_begin_;
  std::vector<std::uint32_t> index_;
  std::vector<double> value_;
};

LinearScores compile_scores(const Scorer& scorer, const Example& ex,
                            std::span<const Solution> candidates);

enum class Objective { kFirstOnly, kMml, kHard, kAnnealedHard };
enum class AnnealDirection { kPaperLiteral, kInverted };

std::string_view objective_name(Objective o);
// "first_only", "mml", "hard", "annealed_hard".
Objective parse_objective(std::string_view name);
std::string_view direction_name(AnnealDirection d);
// "paper_literal", "inverted".
AnnealDirection parse_direction(std::string_view name);

// Loss of a concrete objective on one distribution and its derivative with
// respect to the candidate scores. z_idx must be sorted ascending (the
// candidates are in canonical order, so the first entry is the First-Only
// target). `selected` is the supervised target for FirstOnly and Hard.
struct ObjectiveValue {
  double loss = 0.0;
  std::vector<double> dscores;
  std::size_t selected = 0;
};

// Throws EmptySolutionSet for an empty z_idx and std::invalid_argument for
// kAnnealedHard, which must be resolved per step first.
ObjectiveValue evaluate_objective(std::span<const double> log_probs,
                                  std::span<const std::size_t> z_idx,
                                  Objective objective);

// min(step / tau, 1)
double anneal_probability(long step, long tau);

// Portable seeded generator: results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform on [0, 1).
  double uniform();
  // Uniform on [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Picks the objective for one step. AnnealedHard draws u ~ U[0,1) and uses
// MML when u < min(t/tau, 1) (PaperLiteral) or u >= min(t/tau, 1) (Inverted),
// hard otherwise. Other objectives pass through without drawing.
Objective resolve_objective(Objective objective, AnnealDirection direction,
                            long tau, long step, Rng& rng);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
  std::size_t selected = 0;
};

// Exact gradient of a concrete objective with respect to all parameters.
LossAndGrad loss_and_grad(const Scorer& scorer, const LinearScores& scores,
                          std::span<const std::size_t> z_idx, Objective objective);

struct TrainConfig {
  Objective objective = Objective::kHard;
  long tau = 1;
  AnnealDirection direction = AnnealDirection::kPaperLiteral;
  double learning_rate = 0.1;
  std::size_t batch_size = 1;
  long max_steps = 0;
  std::uint64_t seed = 0;
  double gradient_clip = 0.0;  // global-norm bound, 0 disables

  // Throws ConfigError.
  void validate() const;
};

struct TrainingInstance {
  std::string id;
  LinearScores scores;
  std::vector<std::size_t> z_idx;  // ascending candidate indices
};

// Maps Z onto candidate indices. Both lists must be canonically sorted; a Z
// member missing from the candidates is a std::invalid_argument.
TrainingInstance make_training_instance(const Scorer& scorer, const Example& ex,
                                        std::span<const Solution> candidates,
                                        std::span<const Solution> z);

struct StepLog {
  long step = 0;
  Objective objective = Objective::kHard;
  double loss = 0.0;  // batch mean
};

struct TrainResult {
  Scorer scorer;
  std::vector<StepLog> log;
};

// Mini-batch SGD with global-norm clipping. Steps are numbered from 1. Every
// step draws batch_size instances from a reshuffled-per-epoch order, averages
// their gradients and updates theta <- theta - lr * g. Throws NonFiniteLoss
// naming the offending instance and EmptySolutionSet for an instance without
// Z members.
TrainResult train(std::span<const TrainingInstance> data, Scorer scorer,
                  const TrainConfig& config);

}  // namespace hardem

#endif  // HARDEM_LEARNING_H_

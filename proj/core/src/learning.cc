#include "hardem/learning.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hardem/error.h"
#include "hardem/features.h"

namespace hardem {
namespace {

constexpr int kNumTags = 4;
constexpr std::size_t kTokenDim = static_cast<std::size_t>(kTokenFeatureDim);

std::size_t tag_param_count(std::size_t num_specials) {
  return kNumTags * kTokenDim + kNumTags * num_specials;
}

double dot(std::span<const double> a, const double* b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_params(const Scorer& scorer, std::size_t num_candidates) {
  const std::size_t n = scorer.params.size();
  switch (scorer.kind) {
    case ScorerKind::kTabular:
      if (num_candidates > n) {
        throw FeatureDimensionMismatch("tabular scorer has " + std::to_string(n) +
                                       " parameters for " +
                                       std::to_string(num_candidates) + " candidates");
      }
      return;
    case ScorerKind::kLogLinear:
      if (n == 0) throw FeatureDimensionMismatch("log-linear scorer has no parameters");
      return;
    case ScorerKind::kFactorizedSpan:
      if (n != 2 * kTokenDim) {
        throw FeatureDimensionMismatch("factorized span scorer expects " +
                                       std::to_string(2 * kTokenDim) + " parameters, got " +
                                       std::to_string(n));
      }
      return;
    case ScorerKind::kFactorizedTag:
      if (n != tag_param_count(scorer.num_specials)) {
        throw FeatureDimensionMismatch(
            "factorized tag scorer expects " +
            std::to_string(tag_param_count(scorer.num_specials)) + " parameters, got " +
            std::to_string(n));
      }
      return;
  }
}

void check_candidates(const Example& ex, std::span<const Solution> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no candidates to score");
  const std::size_t want = ex.task == TaskKind::kSpanExtraction ? 0
                           : ex.task == TaskKind::kArithmetic   ? 1
                                                                : 2;
  for (const auto& z : candidates) {
    if (z.index() != want) {
      throw std::invalid_argument("candidate variant does not match the task of '" +
                                  ex.id + "'");
    }
  }
}

void check_special(const Scorer& scorer, const NumberMention& n) {
  if (n.source == NumberSource::kSpecial &&
      static_cast<std::size_t>(n.index) >= scorer.num_specials) {
    throw FeatureDimensionMismatch("special number index " + std::to_string(n.index) +
                                   " outside the scorer's " +
                                   std::to_string(scorer.num_specials) + " specials");
  }
}

std::vector<double> tag_log_probs(const Scorer& scorer, const TokenFeatures& tf,
                                  int position) {
  std::vector<double> scores(kNumTags);
  for (int k = 0; k < kNumTags; ++k) {
    scores[k] = dot(tf.row(position), scorer.params.data() + k * kTokenDim);
  }
  return log_softmax(scores);
}

std::vector<double> special_log_probs(const Scorer& scorer, std::size_t j) {
  const double* c = scorer.params.data() + kNumTags * kTokenDim + kNumTags * j;
  return log_softmax(std::span<const double>(c, kNumTags));
}

}  // namespace

std::string_view scorer_name(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::kTabular: return "tabular";
    case ScorerKind::kLogLinear: return "log_linear";
    case ScorerKind::kFactorizedSpan: return "factorized_span";
    case ScorerKind::kFactorizedTag: return "factorized_tag";
  }
  return "?";
}

ScorerKind parse_scorer(std::string_view name) {
  for (auto k : {ScorerKind::kTabular, ScorerKind::kLogLinear,
                 ScorerKind::kFactorizedSpan, ScorerKind::kFactorizedTag}) {
    if (scorer_name(k) == name) return k;
  }
  throw ConfigError("unknown scorer '" + std::string(name) + "'");
}

Scorer Scorer::tabular(std::size_t candidates) {
  return {ScorerKind::kTabular, "", 0, std::vector<double>(candidates, 0.0)};
}

Scorer Scorer::log_linear(std::string extractor, std::size_t dim) {
  return {ScorerKind::kLogLinear, std::move(extractor), 0, std::vector<double>(dim, 0.0)};
}

Scorer Scorer::factorized_span() {
  return {ScorerKind::kFactorizedSpan, "", 0, std::vector<double>(2 * kTokenDim, 0.0)};
}

Scorer Scorer::factorized_tag(std::size_t num_specials) {
  return {ScorerKind::kFactorizedTag, "", num_specials,
          std::vector<double>(tag_param_count(num_specials), 0.0)};
}

int operator_tag(Operator op) {
  switch (op) {
    case Operator::kPlus: return 1;
    case Operator::kMinus: return 2;
    case Operator::kPercent: return 3;
  }
  return 0;
}

double CandidateDistribution::probability(std::size_t i) const {
  return std::exp(log_probs[i]);
}

std::size_t CandidateDistribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_probs.size(); ++i) {
    if (log_probs[i] > log_probs[best]) best = i;
  }
  return best;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> log_softmax(std::span<const double> scores) {
  const double z = log_sum_exp(scores);
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] - z;
  return out;
}

CandidateDistribution score_candidates(const Scorer& scorer, const Example& ex,
                                       std::vector<Solution> candidates) {
  check_candidates(ex, candidates);
  check_params(scorer, candidates.size());
  std::vector<double> x(candidates.size());

  switch (scorer.kind) {
    case ScorerKind::kTabular:
      std::copy_n(scorer.params.begin(), candidates.size(), x.begin());
      break;
    case ScorerKind::kLogLinear: {
      auto featurizer = make_featurizer(scorer.extractor, ex, scorer.params.size());
      FeatureVector phi;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        phi.clear();
        featurizer->extract(candidates[i], phi);
        double s = 0.0;
        for (std::size_t k = 0; k < phi.index.size(); ++k) {
          s += scorer.params[phi.index[k]] * phi.value[k];
        }
        x[i] = s;
      }
      break;
    }
    case ScorerKind::kFactorizedSpan: {
      const TokenFeatures tf = document_token_features(ex);
      std::vector<double> start(tf.positions), end(tf.positions);
      for (int t = 0; t < tf.positions; ++t) {
        start[t] = dot(tf.row(t), scorer.params.data());
        end[t] = dot(tf.row(t), scorer.params.data() + kTokenDim);
      }
      const auto log_start = log_softmax(start);
      const auto log_end = log_softmax(end);
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Span& s = std::get<Span>(candidates[i]);
        x[i] = log_start[s.start] + log_end[s.end];
      }
      break;
    }
    case ScorerKind::kFactorizedTag: {
      const TokenFeatures tf = tagging_token_features(ex);
      std::vector<std::vector<double>> input(tf.positions);
      double base = 0.0;
      for (int p = 0; p < tf.positions; ++p) {
        input[p] = tag_log_probs(scorer, tf, p);
        base += input[p][0];
      }
      std::vector<std::vector<double>> special(scorer.num_specials);
      for (std::size_t j = 0; j < scorer.num_specials; ++j) {
        special[j] = special_log_probs(scorer, j);
        base += special[j][0];
      }
      // Every position carries tag 0 except the two operand positions.
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Equation& e = std::get<Equation>(candidates[i]);
        double v = base;
        for (const auto& [op, n] : {std::pair{e.o1, e.n1}, std::pair{e.o2, e.n2}}) {
          check_special(scorer, n);
          const int tag = operator_tag(op);
          if (n.source == NumberSource::kSpecial) {
            v += special[n.index][tag] - special[n.index][0];
          } else if (n.source != NumberSource::kZero) {
            const int p = tagging_position(ex, n);
            v += input[p][tag] - input[p][0];
          }
        }
        x[i] = v;
      }
      break;
    }
  }

  CandidateDistribution dist;
  dist.log_probs = log_softmax(x);
  dist.candidates = std::move(candidates);
  return dist;
}

std::vector<double> LinearScores::evaluate(std::span<const double> params) const {
  std::vector<double> s(num_candidates(), 0.0);
  for (std::size_t r = 0; r < s.size(); ++r) {
    double acc = 0.0;
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) {
      acc += params[index_[k]] * value_[k];
    }
    s[r] = acc;
  }
  return s;
}

void LinearScores::accumulate(std::size_t row, double weight,
                              std::span<double> grad) const {
  for (std::size_t k = row_begin_[row]; k < row_begin_[row + 1]; ++k) {
    grad[index_[k]] += weight * value_[k];
  }
}

LinearScores compile_scores(const Scorer& scorer, const Example& ex,
                            std::span<const Solution> candidates) {
  check_candidates(ex, candidates);
  check_params(scorer, candidates.size());
  LinearScores out;
  out.num_params_ = scorer.params.size();
  out.row_begin_.push_back(0);
  auto add = [&out](std::size_t idx, double v) {
    if (v == 0.0) return;
    out.index_.push_back(static_cast<std::uint32_t>(idx));
    out.value_.push_back(v);
  };
  auto end_row = [&out] { out.row_begin_.push_back(out.index_.size()); };

  switch (scorer.kind) {
    case ScorerKind::kTabular:
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        add(i, 1.0);
        end_row();
      }
      break;
    case ScorerKind::kLogLinear: {
      auto featurizer = make_featurizer(scorer.extractor, ex, scorer.params.size());
      FeatureVector phi;
      for (const auto& z : candidates) {
        phi.clear();
        featurizer->extract(z, phi);
        for (std::size_t k = 0; k < phi.index.size(); ++k) add(phi.index[k], phi.value[k]);
        end_row();
      }
      break;
    }
    case ScorerKind::kFactorizedSpan: {
      const TokenFeatures tf = document_token_features(ex);
      for (const auto& z : candidates) {
        const Span& s = std::get<Span>(z);
        const auto start = tf.row(s.start);
        const auto end = tf.row(s.end);
        for (std::size_t f = 0; f < kTokenDim; ++f) add(f, start[f]);
        for (std::size_t f = 0; f < kTokenDim; ++f) add(kTokenDim + f, end[f]);
        end_row();
      }
      break;
    }
    case ScorerKind::kFactorizedTag: {
      const TokenFeatures tf = tagging_token_features(ex);
      const std::size_t special_base = kNumTags * kTokenDim;
      for (const auto& z : candidates) {
        const Equation& e = std::get<Equation>(z);
        for (const auto& [op, n] : {std::pair{e.o1, e.n1}, std::pair{e.o2, e.n2}}) {
          check_special(scorer, n);
          const std::size_t tag = static_cast<std::size_t>(operator_tag(op));
          if (n.source == NumberSource::kSpecial) {
            const std::size_t j = static_cast<std::size_t>(n.index);
            add(special_base + kNumTags * j + tag, 1.0);
            add(special_base + kNumTags * j, -1.0);
          } else if (n.source != NumberSource::kZero) {
            const auto psi = tf.row(tagging_position(ex, n));
            for (std::size_t f = 0; f < kTokenDim; ++f) {
              add(tag * kTokenDim + f, psi[f]);
              add(f, -psi[f]);
            }
          }
        }
        end_row();
      }
      break;
    }
  }
  return out;
}

std::string_view objective_name(Objective o) {
  switch (o) {
    case Objective::kFirstOnly: return "first_only";
    case Objective::kMml: return "mml";
    case Objective::kHard: return "hard";
    case Objective::kAnnealedHard: return "annealed_hard";
  }
  return "?";
}

Objective parse_objective(std::string_view name) {
  for (auto o : {Objective::kFirstOnly, Objective::kMml, Objective::kHard,
                 Objective::kAnnealedHard}) {
    if (objective_name(o) == name) return o;
  }
  throw ConfigError("unknown objective '" + std::string(name) + "'");
}

std::string_view direction_name(AnnealDirection d) {
  return d == AnnealDirection::kPaperLiteral ? "paper_literal" : "inverted";
}

AnnealDirection parse_direction(std::string_view name) {
  if (name == "paper_literal") return AnnealDirection::kPaperLiteral;
  if (name == "inverted") return AnnealDirection::kInverted;
  throw ConfigError("unknown anneal direction '" + std::string(name) + "'");
}

ObjectiveValue evaluate_objective(std::span<const double> log_probs,
                                  std::span<const std::size_t> z_idx,
                                  Objective objective) {
  if (z_idx.empty()) throw EmptySolutionSet("solution set is empty");
  ObjectiveValue out;
  out.dscores.resize(log_probs.size());
  for (std::size_t i = 0; i < log_probs.size(); ++i) out.dscores[i] = std::exp(log_probs[i]);

  switch (objective) {
    case Objective::kFirstOnly:
    case Objective::kHard: {
      std::size_t pick = z_idx.front();
      if (objective == Objective::kHard) {
        for (std::size_t i : z_idx) {
          if (log_probs[i] > log_probs[pick]) pick = i;
        }
      }
      out.selected = pick;
      out.loss = -log_probs[pick];
      out.dscores[pick] -= 1.0;
      return out;
    }
    case Objective::kMml: {
      std::vector<double> z_logp;
      z_logp.reserve(z_idx.size());
      for (std::size_t i : z_idx) z_logp.push_back(log_probs[i]);
      const double log_mass = log_sum_exp(z_logp);
      out.loss = -log_mass;
      // d/ds_i = p_i - q_i, q the posterior restricted to Z.
      for (std::size_t i : z_idx) out.dscores[i] -= std::exp(log_probs[i] - log_mass);
      out.selected = z_idx.front();
      return out;
    }
    case Objective::kAnnealedHard:
      break;
  }
  throw std::invalid_argument("annealed_hard must be resolved to mml or hard per step");
}

double anneal_probability(long step, long tau) {
  if (tau < 1) throw std::invalid_argument("tau must be >= 1");
  if (step <= 0) return 0.0;
  if (step >= tau) return 1.0;
  return static_cast<double>(step) / static_cast<double>(tau);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % n;
  }
}

Objective resolve_objective(Objective objective, AnnealDirection direction,
                            long tau, long step, Rng& rng) {
  if (objective != Objective::kAnnealedHard) return objective;
  const double p = anneal_probability(step, tau);
  const double u = rng.uniform();
  const bool use_mml = direction == AnnealDirection::kPaperLiteral ? u < p : u >= p;
  return use_mml ? Objective::kMml : Objective::kHard;
}

LossAndGrad loss_and_grad(const Scorer& scorer, const LinearScores& scores,
                          std::span<const std::size_t> z_idx, Objective objective) {
  if (scores.num_params() != scorer.params.size()) {
    throw FeatureDimensionMismatch("compiled scores do not match the scorer");
  }
  const auto log_probs = log_softmax(scores.evaluate(scorer.params));
  ObjectiveValue v = evaluate_objective(log_probs, z_idx, objective);
  LossAndGrad out;
  out.loss = v.loss;
  out.selected = v.selected;
  out.grad.assign(scorer.params.size(), 0.0);
  for (std::size_t i = 0; i < v.dscores.size(); ++i) {
    if (v.dscores[i] != 0.0) scores.accumulate(i, v.dscores[i], out.grad);
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (objective == Objective::kAnnealedHard && tau < 1) {
    throw ConfigError("tau must be >= 1 for annealed_hard");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
  if (gradient_clip < 0.0) throw ConfigError("gradient_clip must be >= 0");
}

TrainingInstance make_training_instance(const Scorer& scorer, const Example& ex,
                                        std::span<const Solution> candidates,
                                        std::span<const Solution> z) {
  TrainingInstance inst;
  inst.id = ex.id;
  inst.scores = compile_scores(scorer, ex, candidates);
  for (const auto& member : z) {
    const long i = find_canonical(candidates, member);
    if (i < 0) {
      throw std::invalid_argument("example '" + ex.id + "': solution " + describe(member) +
                                  " is not among the candidates");
    }
    inst.z_idx.push_back(static_cast<std::size_t>(i));
  }
  std::sort(inst.z_idx.begin(), inst.z_idx.end());
  return inst;
}

TrainResult train(std::span<const TrainingInstance> data, Scorer scorer,
                  const TrainConfig& config) {
  config.validate();
  TrainResult result;
  if (config.max_steps == 0 || data.empty()) {
    result.scorer = std::move(scorer);
    return result;
  }
  for (const auto& inst : data) {
    if (inst.z_idx.empty()) throw EmptySolutionSet("example '" + inst.id + "' has empty Z");
    if (inst.scores.num_params() != scorer.params.size()) {
      throw FeatureDimensionMismatch("example '" + inst.id +
                                     "' was compiled for a different scorer");
    }
  }

  // Separate streams so annealing draws never perturb batch order.
  Rng batch_rng(config.seed);
  Rng anneal_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  batch_rng.shuffle(order);
  std::size_t cursor = 0;

  const std::size_t dim = scorer.params.size();
  std::vector<double> grad(dim);
  result.log.reserve(static_cast<std::size_t>(config.max_steps));

  for (long step = 1; step <= config.max_steps; ++step) {
    const Objective used =
        resolve_objective(config.objective, config.direction, config.tau, step, anneal_rng);
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < config.batch_size; ++b) {
      if (cursor == order.size()) {
        batch_rng.shuffle(order);
        cursor = 0;
      }
      const TrainingInstance& inst = data[order[cursor++]];
      const auto log_probs = log_softmax(inst.scores.evaluate(scorer.params));
      const ObjectiveValue v = evaluate_objective(log_probs, inst.z_idx, used);
      if (!std::isfinite(v.loss)) throw NonFiniteLoss(inst.id);
      loss_sum += v.loss;
      for (std::size_t i = 0; i < v.dscores.size(); ++i) {
        if (v.dscores[i] != 0.0) inst.scores.accumulate(i, v.dscores[i], grad);
      }
    }

    const double inv = 1.0 / static_cast<double>(config.batch_size);
    double norm_sq = 0.0;
    for (double& g : grad) {
      g *= inv;
      norm_sq += g * g;
    }
    double scale = config.learning_rate;
    if (config.gradient_clip > 0.0) {
      const double norm = std::sqrt(norm_sq);
      if (norm > config.gradient_clip) scale *= config.gradient_clip / norm;
    }
    for (std::size_t k = 0; k < dim; ++k) scorer.params[k] -= scale * grad[k];
    result.log.push_back({step, used, loss_sum * inv});
  }
  result.scorer = std::move(scorer);
  return result;
}

}  // namespace hardem

#ifndef HARDEM_SPAN_MATCH_H_
#define HARDEM_SPAN_MATCH_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardem/solution.h"
#include "hardem/text.h"

namespace hardem {

enum class MatchFunction { kExactMatch, kRougeL };

struct MatcherKind {
  MatchFunction function = MatchFunction::kExactMatch;
  int max_span_len = 10;
  std::optional<int> noisy_rank_k;
};

// Per-token normalize_text, dropping tokens that normalize to nothing.
std::vector<std::string> normalized_tokens(const TokenSequence& seq, int first,
                                           int last);
std::vector<std::string> normalized_tokens(const TokenSequence& seq);

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b);

// ROUGE-L F1 over pre-normalized token sequences. 0 when either side is empty
// or nothing is shared.
double rouge_l(std::span<const std::string> candidate,
               std::span<const std::string> reference);

// All spans with 1 <= length <= max_len, in canonical order.
std::vector<Span> enumerate_spans(int doc_len, int max_len);
std::size_t span_space_size(int doc_len, int max_len);

struct ScoredSpan {
  Span span;
  double score = 0.0;
};

// g for every span within m.max_span_len, in canonical order, maximized over
// the gold strings. ExactMatch scores 1 when the span has as many tokens as a
// gold string and the normalized texts agree.
std::vector<ScoredSpan> score_spans(const TokenSequence& doc,
                                    std::span<const std::string> answers,
                                    const MatcherKind& m);

// Z = spans attaining g_max, empty when g_max is 0.
SolutionSet find_matching_spans(const TokenSequence& doc,
                                std::span<const std::string> answers,
                                const MatcherKind& m);

// Spans scoring at least the k-th highest distinct positive score.
// Throws std::invalid_argument when m.noisy_rank_k is unset or < 1.
SolutionSet find_noisy_spans(const TokenSequence& doc,
                             std::span<const std::string> answers,
                             const MatcherKind& m);

}  // namespace hardem

#endif  // HARDEM_SPAN_MATCH_H_

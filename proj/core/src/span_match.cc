#include "hardem/span_match.h"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace hardem {
namespace {

struct Gold {
  std::string normalized;             // ExactMatch comparison key
  int token_count = 0;                // ExactMatch length constraint
  std::vector<std::string> tokens;    // RougeL reference
};

std::vector<Gold> prepare_golds(std::span<const std::string> answers) {
  std::vector<Gold> golds;
  for (const auto& a : answers) {
    TokenSequence seq = tokenize(a);
    golds.push_back({normalize_text(a), seq.size(), normalized_tokens(seq)});
  }
  return golds;
}

SolutionSet collect(const std::vector<ScoredSpan>& scored, double threshold,
                    std::size_t candidate_count) {
  SolutionSet out;
  out.candidate_count = candidate_count;
  if (threshold <= 0.0) return out;
  for (const auto& s : scored) {
    if (s.score >= threshold) out.solutions.emplace_back(s.span);
  }
  return out;
}

}  // namespace

std::vector<std::string> normalized_tokens(const TokenSequence& seq, int first,
                                           int last) {
  std::vector<std::string> out;
  for (int i = first; i <= last; ++i) {
    std::string t = normalize_text(seq[i].text);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> normalized_tokens(const TokenSequence& seq) {
  return seq.empty() ? std::vector<std::string>{}
                     : normalized_tokens(seq, 0, seq.size() - 1);
}

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

double rouge_from_lcs(std::size_t lcs, std::size_t cand_len, std::size_t ref_len) {
  if (lcs == 0 || cand_len == 0 || ref_len == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(cand_len);
  const double r = static_cast<double>(lcs) / static_cast<double>(ref_len);
  return 2.0 * p * r / (p + r);
}

}  // namespace

double rouge_l(std::span<const std::string> candidate,
               std::span<const std::string> reference) {
  return rouge_from_lcs(lcs_length(candidate, reference), candidate.size(),
                        reference.size());
}

std::vector<Span> enumerate_spans(int doc_len, int max_len) {
  std::vector<Span> out;
  for (int s = 0; s < doc_len; ++s) {
    for (int e = s; e < doc_len && e - s + 1 <= max_len; ++e) out.push_back({s, e});
  }
  return out;
}

std::size_t span_space_size(int doc_len, int max_len) {
  std::size_t n = 0;
  for (int s = 0; s < doc_len; ++s) {
    n += static_cast<std::size_t>(std::min(max_len, doc_len - s));
  }
  return n;
}

std::vector<ScoredSpan> score_spans(const TokenSequence& doc,
                                    std::span<const std::string> answers,
                                    const MatcherKind& m) {
  if (m.max_span_len < 1) throw std::invalid_argument("max_span_len must be >= 1");
  const std::vector<Gold> golds = prepare_golds(answers);
  const int n = doc.size();
  std::vector<ScoredSpan> out;
  out.reserve(span_space_size(n, m.max_span_len));

  if (m.function == MatchFunction::kExactMatch) {
    for (const Span& sp : enumerate_spans(n, m.max_span_len)) {
      double score = 0.0;
      for (const Gold& g : golds) {
        if (g.token_count == sp.length() &&
            normalize_text(doc.slice(sp.start, sp.end)) == g.normalized) {
          score = 1.0;
          break;
        }
      }
      out.push_back({sp, score});
    }
    return out;
  }

  // RougeL: extend each start one token at a time, growing one LCS table
  // row per token, so every span costs O(|reference|).
  std::vector<std::string> norm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) norm[i] = normalize_text(doc[i].text);
  for (int s = 0; s < n; ++s) {
    const int last = std::min(n - 1, s + m.max_span_len - 1);
    std::vector<double> best(static_cast<std::size_t>(last - s + 1), 0.0);
    for (const Gold& g : golds) {
      const std::size_t rl = g.tokens.size();
      std::vector<std::size_t> row(rl + 1, 0), next(rl + 1, 0);
      std::size_t cand_len = 0;
      for (int e = s; e <= last; ++e) {
        const std::string& tok = norm[e];
        if (!tok.empty()) {
          ++cand_len;
          next[0] = 0;
          for (std::size_t j = 1; j <= rl; ++j) {
            next[j] = tok == g.tokens[j - 1] ? row[j - 1] + 1
                                             : std::max(row[j], next[j - 1]);
          }
          std::swap(row, next);
        }
        double& b = best[static_cast<std::size_t>(e - s)];
        b = std::max(b, rouge_from_lcs(row[rl], cand_len, rl));
      }
    }
    for (int e = s; e <= last; ++e) {
      out.push_back({{s, e}, best[static_cast<std::size_t>(e - s)]});
    }
  }
  return out;
}

SolutionSet find_matching_spans(const TokenSequence& doc,
                                std::span<const std::string> answers,
                                const MatcherKind& m) {
  const auto scored = score_spans(doc, answers, m);
  double g_max = 0.0;
  for (const auto& s : scored) g_max = std::max(g_max, s.score);
  return collect(scored, g_max, scored.size());
}

SolutionSet find_noisy_spans(const TokenSequence& doc,
                             std::span<const std::string> answers,
                             const MatcherKind& m) {
  if (!m.noisy_rank_k || *m.noisy_rank_k < 1) {
    throw std::invalid_argument("find_noisy_spans requires noisy_rank_k >= 1");
  }
  const auto scored = score_spans(doc, answers, m);
  std::vector<double> distinct;
  for (const auto& s : scored) {
    if (s.score > 0.0) distinct.push_back(s.score);
  }
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.empty()) return collect(scored, 0.0, scored.size());
  const std::size_t k = static_cast<std::size_t>(*m.noisy_rank_k);
  const double threshold = k <= distinct.size() ? distinct[k - 1] : distinct.back();
  return collect(scored, threshold, scored.size());
}

}  // namespace hardem

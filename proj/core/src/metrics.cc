#include "hardem/metrics.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <stdexcept>

#include "hardem/error.h"
#include "hardem/span_match.h"
#include "hardem/text.h"

namespace hardem {
namespace {

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t j = s.find(' ', i);
    const std::size_t end = j == std::string::npos ? s.size() : j;
    if (end > i) out.push_back(s.substr(i, end - i));
    i = end + 1;
  }
  return out;
}

double f1_pair(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& w : gold) ++counts[w];
  int common = 0;
  for (const auto& w : pred) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double p = static_cast<double>(common) / static_cast<double>(pred.size());
  const double r = static_cast<double>(common) / static_cast<double>(gold.size());
  return 2.0 * p * r / (p + r);
}

std::size_t parse_size(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("bad bucket bound '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

int exact_match(std::string_view pred, std::span<const std::string> golds,
                bool numeric_equivalence) {
  const std::string p = normalize_text(pred);
  const auto p_num = numeric_equivalence ? parse_number(pred) : std::nullopt;
  for (const auto& g : golds) {
    if (normalize_text(g) == p) return 1;
    if (p_num) {
      if (auto g_num = parse_number(g); g_num && *g_num == *p_num) return 1;
    }
  }
  return 0;
}

double token_f1(std::string_view pred, std::span<const std::string> golds) {
  const auto p = split_words(normalize_text(pred));
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, f1_pair(p, split_words(normalize_text(g))));
  return best;
}

double answer_rouge_l(std::string_view pred, std::span<const std::string> golds) {
  const auto p = split_words(normalize_text(pred));
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, rouge_l(p, split_words(normalize_text(g))));
  return best;
}

double sparsity(std::span<const double> z_probs, double epsilon) {
  if (z_probs.empty()) throw std::invalid_argument("sparsity of an empty solution set");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const auto below = std::count_if(z_probs.begin(), z_probs.end(),
                                   [epsilon](double p) { return p < epsilon; });
  return static_cast<double>(below) / static_cast<double>(z_probs.size());
}

void EvalResult::finalize() {
  mean_em = mean_f1 = mean_rouge_l = 0.0;
  mean_sparsity.assign(epsilons.size(), std::nullopt);
  if (records.empty()) return;
  for (const auto& r : records) {
    mean_em += r.em;
    mean_f1 += r.f1;
    mean_rouge_l += r.rouge_l;
  }
  const double n = static_cast<double>(records.size());
  mean_em /= n;
  mean_f1 /= n;
  mean_rouge_l /= n;
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
      if (k < r.sparsity.size() && r.sparsity[k]) {
        sum += *r.sparsity[k];
        ++count;
      }
    }
    if (count > 0) mean_sparsity[k] = sum / static_cast<double>(count);
  }
}

std::string ZBucket::label() const {
  if (!hi) return std::to_string(lo) + "+";
  if (*hi == lo) return std::to_string(lo);
  return std::to_string(lo) + "-" + std::to_string(*hi);
}

std::vector<ZBucket> parse_buckets(std::string_view text) {
  std::vector<ZBucket> out;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find(',', i);
    if (j == std::string_view::npos) j = text.size();
    std::string_view item = text.substr(i, j - i);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) throw ConfigError("empty |Z| bucket in '" + std::string(text) + "'");
    ZBucket b;
    if (item.back() == '+') {
      b.lo = parse_size(item.substr(0, item.size() - 1));
    } else if (auto dash = item.find('-'); dash != std::string_view::npos) {
      b.lo = parse_size(item.substr(0, dash));
      b.hi = parse_size(item.substr(dash + 1));
      if (*b.hi < b.lo) throw ConfigError("inverted |Z| bucket '" + std::string(item) + "'");
    } else {
      b.lo = parse_size(item);
      b.hi = b.lo;
    }
    out.push_back(b);
    i = j + 1;
  }
  return out;
}

std::string format_buckets(std::span<const ZBucket> buckets) {
  std::string out;
  for (const auto& b : buckets) {
    if (!out.empty()) out += ",";
    out += b.label();
  }
  return out;
}

std::vector<BucketRow> breakdown_by_z(const EvalResult& result,
                                      std::span<const ZBucket> buckets) {
  std::vector<BucketRow> rows;
  for (const auto& b : buckets) rows.push_back({b, 0, 0.0});
  for (const auto& r : result.records) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&r](const BucketRow& row) { return row.bucket.contains(r.z_size); });
    if (it == rows.end()) {
      throw std::invalid_argument("|Z| = " + std::to_string(r.z_size) +
                                  " of '" + r.id + "' is not covered by any bucket");
    }
    ++it->count;
    it->mean_em += r.em;
  }
  for (auto& row : rows) {
    if (row.count > 0) row.mean_em /= static_cast<double>(row.count);
  }
  return rows;
}

}  // namespace hardem

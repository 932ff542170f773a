#ifndef HARDEM_METRICS_H_
#define HARDEM_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardem/solution.h"

namespace hardem {

// 1 iff normalize_text(pred) equals a normalized gold. With
// numeric_equivalence, two strings that both parse as numbers compare by
// value ("4.0" matches "4").
int exact_match(std::string_view pred, std::span<const std::string> golds,
                bool numeric_equivalence = false);

// Bag-of-tokens F1 over normalized tokens, maximized over golds. Both sides
// empty scores 1; exactly one side empty scores 0.
double token_f1(std::string_view pred, std::span<const std::string> golds);

// ROUGE-L F1 of normalized answer strings, maximized over golds. Same
// implementation as span matching.
double answer_rouge_l(std::string_view pred, std::span<const std::string> golds);

// Fraction of Z members whose model probability is below epsilon.
// Throws std::invalid_argument for an empty Z or epsilon <= 0.
double sparsity(std::span<const double> z_probs, double epsilon);

struct EvalRecord {
  std::string id;
  std::optional<Solution> predicted;
  std::string answer;  // f(predicted)
  double em = 0.0;
  double f1 = 0.0;
  double rouge_l = 0.0;
  std::size_t z_size = 0;
  std::vector<std::optional<double>> sparsity;  // per epsilon; unset when Z is empty
};

struct EvalResult {
  std::vector<double> epsilons;
  std::vector<EvalRecord> records;

  double mean_em = 0.0;
  double mean_f1 = 0.0;
  double mean_rouge_l = 0.0;
  // Per-example mean over records with a defined value, per epsilon.
  std::vector<std::optional<double>> mean_sparsity;

  // Recomputes the aggregate means from the records.
  void finalize();
};

// Inclusive |Z| range; hi unset means unbounded.
struct ZBucket {
  std::size_t lo = 0;
  std::optional<std::size_t> hi;

  bool contains(std::size_t z) const { return z >= lo && (!hi || z <= *hi); }
  std::string label() const;
};

// Parses "0,1,2-3,4-10,11+". Throws ConfigError on malformed input.
std::vector<ZBucket> parse_buckets(std::string_view text);
std::string format_buckets(std::span<const ZBucket> buckets);

struct BucketRow {
  ZBucket bucket;
  std::size_t count = 0;
  double mean_em = 0.0;  // 0 for an empty bucket
};

// Each record goes to the first bucket containing its |Z|. Throws
// std::invalid_argument when a record falls in no bucket.
std::vector<BucketRow> breakdown_by_z(const EvalResult& result,
                                      std::span<const ZBucket> buckets);

}  // namespace hardem

#endif  // HARDEM_METRICS_H_

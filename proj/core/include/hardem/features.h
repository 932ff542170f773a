#ifndef HARDEM_FEATURES_H_
#define HARDEM_FEATURES_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardem/example.h"
#include "hardem/solution.h"

namespace hardem {

// Hand features per token, standing in for an encoder's hidden state:
//   0      bias
//   1..8   position bucket (0, 1, 2, 3, 4-7, 8-15, 16-31, 32+) within segment
//   9      token belongs to the question segment
//   10-12  token / previous / next token appears in the question
//   13-15  token / previous / next token is a number
//   16     token starts with an uppercase letter
//   17     separator position
inline constexpr int kTokenFeatureDim = 18;

// Row-major [positions x kTokenFeatureDim] matrix.
struct TokenFeatures {
  int positions = 0;
  std::vector<double> values;

  std::span<const double> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * kTokenFeatureDim,
            static_cast<std::size_t>(kTokenFeatureDim)};
  }
};

// Features for each document token.
TokenFeatures document_token_features(const Example& ex);

// Features for each position of the tagging input [question ; SEP ; document].
TokenFeatures tagging_token_features(const Example& ex);

// Position of a document/question number in the tagging input, -1 for
// special numbers and the zero constant.
int tagging_position(const Example& ex, const NumberMention& n);

// Sparse feature vector; indices may repeat and are summed.
struct FeatureVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  void add(std::uint32_t i, double v = 1.0) {
    index.push_back(i);
    value.push_back(v);
  }
  void clear() {
    index.clear();
    value.clear();
  }
};

// Hashed indicator features phi(x, z) for the log-linear scorer. A featurizer
// is bound to one example so per-example preprocessing happens once.
class Featurizer {
 public:
  virtual ~Featurizer() = default;
  virtual void extract(const Solution& z, FeatureVector& out) const = 0;
};

// Known ids: "span", "equation", "sql". Throws ConfigError for unknown ids
// and std::invalid_argument when the extractor does not fit the task.
std::unique_ptr<Featurizer> make_featurizer(std::string_view id, const Example& ex,
                                            std::size_t dim);

std::vector<std::string> featurizer_names();

// FNV-1a, stable across platforms.
std::uint64_t stable_hash(std::string_view s);

}  // namespace hardem

#endif  // HARDEM_FEATURES_H_

#include "hardem/features.h"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "hardem/error.h"
#include "hardem/span_match.h"

namespace hardem {
namespace {

int position_bucket(int i) {
  if (i < 4) return i;
  if (i < 8) return 4;
  if (i < 16) return 5;
  if (i < 32) return 6;
  return 7;
}

bool is_capitalized(const std::string& t) {
  return !t.empty() && t[0] >= 'A' && t[0] <= 'Z';
}

std::unordered_set<std::string> question_words(const Example& ex) {
  std::unordered_set<std::string> words;
  for (const auto& t : ex.question.tokens) {
    std::string n = normalize_text(t.text);
    if (!n.empty()) words.insert(std::move(n));
  }
  return words;
}

// Writes the features of `seq` into rows [offset, offset + seq.size()).
void fill_segment(const TokenSequence& seq, bool question_segment,
                  const std::unordered_set<std::string>& qwords, int offset,
                  TokenFeatures& out) {
  const int n = seq.size();
  std::vector<char> overlap(static_cast<std::size_t>(n)), numeric(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    overlap[i] = qwords.count(normalize_text(seq[i].text)) > 0;
    numeric[i] = parse_number(seq[i].text).has_value();
  }
  for (int i = 0; i < n; ++i) {
    double* f = out.values.data() +
                static_cast<std::size_t>(offset + i) * kTokenFeatureDim;
    f[0] = 1.0;
    f[1 + position_bucket(i)] = 1.0;
    f[9] = question_segment ? 1.0 : 0.0;
    f[10] = overlap[i];
    f[11] = i > 0 && overlap[i - 1];
    f[12] = i + 1 < n && overlap[i + 1];
    f[13] = numeric[i];
    f[14] = i > 0 && numeric[i - 1];
    f[15] = i + 1 < n && numeric[i + 1];
    f[16] = is_capitalized(seq[i].text);
  }
}

std::uint32_t bucket_of(std::string_view key, std::size_t dim) {
  return static_cast<std::uint32_t>(stable_hash(key) % dim);
}

class HashedFeaturizer : public Featurizer {
 protected:
  explicit HashedFeaturizer(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw FeatureDimensionMismatch("log-linear feature dimension must be > 0");
  }
  void emit(FeatureVector& out, std::string_view key) const {
    out.add(bucket_of(key, dim_));
  }

 private:
  std::size_t dim_;
};

std::string flag(bool b) { return b ? "1" : "0"; }

class SpanFeaturizer final : public HashedFeaturizer {
 public:
  SpanFeaturizer(const Example& ex, std::size_t dim) : HashedFeaturizer(dim) {
    if (ex.task != TaskKind::kSpanExtraction) {
      throw std::invalid_argument("span featurizer needs a span extraction example");
    }
    const auto qwords = question_words(ex);
    const TokenSequence& doc = ex.document();
    for (const auto& t : doc.tokens) {
      words_.push_back(normalize_text(t.text));
      in_question_.push_back(qwords.count(words_.back()) > 0);
      capitalized_.push_back(is_capitalized(t.text));
    }
  }

  void extract(const Solution& z, FeatureVector& out) const override {
    const Span& s = std::get<Span>(z);
    const int n = static_cast<int>(words_.size());
    emit(out, "b");
    emit(out, "len=" + std::to_string(std::min(s.length(), 6)));
    emit(out, "pos=" + std::to_string(position_bucket(s.start)));
    const bool pq = s.start > 0 && in_question_[s.start - 1];
    const bool nq = s.end + 1 < n && in_question_[s.end + 1];
    emit(out, "pq=" + flag(pq));
    emit(out, "nq=" + flag(nq));
    bool inside = false;
    for (int i = s.start; i <= s.end; ++i) inside = inside || in_question_[i];
    emit(out, "inq=" + flag(inside));
    emit(out, "cap=" + flag(capitalized_[s.start]));
    emit(out, "pw=" + (s.start > 0 ? words_[s.start - 1] : std::string("<s>")));
    emit(out, "nw=" + (s.end + 1 < n ? words_[s.end + 1] : std::string("</s>")));
    emit(out, "fw=" + words_[s.start]);
    emit(out, "lw=" + words_[s.end]);
  }

 private:
  std::vector<std::string> words_;
  std::vector<char> in_question_;
  std::vector<char> capitalized_;
};

class EquationFeaturizer final : public HashedFeaturizer {
 public:
  EquationFeaturizer(const Example& ex, std::size_t dim)
      : HashedFeaturizer(dim), question_(ex.question), document_(ex.document()) {
    if (ex.task != TaskKind::kArithmetic) {
      throw std::invalid_argument("equation featurizer needs an arithmetic example");
    }
    qwords_ = question_words(ex);
  }

  void extract(const Solution& z, FeatureVector& out) const override {
    const Equation& e = std::get<Equation>(z);
    const std::string o1(operator_symbol(e.o1)), o2(operator_symbol(e.o2));
    const std::string s1(source_name(e.n1.source)), s2(source_name(e.n2.source));
    emit(out, "b");
    emit(out, "ops=" + o1 + o2);
    emit(out, "src=" + s1 + "," + s2);
    operand(out, "1", e.o1, e.n1);
    operand(out, "2", e.o2, e.n2);
    if (e.n1.source == e.n2.source && e.n1.source != NumberSource::kSpecial) {
      emit(out, "ord=" + flag(e.n1.index < e.n2.index) + o1 + o2);
    }
  }

 private:
  void operand(FeatureVector& out, const std::string& k, Operator op,
               const NumberMention& n) const {
    const std::string o(operator_symbol(op));
    emit(out, "o" + k + "=" + o + std::string(source_name(n.source)));
    if (n.source == NumberSource::kSpecial || n.source == NumberSource::kZero) {
      emit(out, "sp" + k + "=" + o + format_number(n.value));
      return;
    }
    const TokenSequence& seq =
        n.source == NumberSource::kDocument ? document_ : question_;
    const int i = n.index;
    const std::string prev = i > 0 ? normalize_text(seq[i - 1].text) : "<s>";
    const std::string next = i + 1 < seq.size() ? normalize_text(seq[i + 1].text) : "</s>";
    emit(out, "pw" + k + "=" + o + prev);
    emit(out, "nw" + k + "=" + o + next);
    emit(out, "pq" + k + "=" + o + flag(qwords_.count(prev) > 0));
    emit(out, "nq" + k + "=" + o + flag(qwords_.count(next) > 0));
  }

  const TokenSequence& question_;
  const TokenSequence& document_;
  std::unordered_set<std::string> qwords_;
};

class SqlFeaturizer final : public HashedFeaturizer {
 public:
  SqlFeaturizer(const Example& ex, std::size_t dim) : HashedFeaturizer(dim) {
    if (ex.task != TaskKind::kSqlGeneration) {
      throw std::invalid_argument("sql featurizer needs a SQL example");
    }
    const auto qwords = question_words(ex);
    for (const auto& h : ex.table().headers()) {
      auto words = normalized_tokens(h);
      bool overlap = false;
      for (const auto& w : words) overlap = overlap || qwords.count(w) > 0;
      header_words_.push_back(std::move(words));
      header_overlap_.push_back(overlap);
    }
  }

  void extract(const Solution& z, FeatureVector& out) const override {
    const SqlQuery& q = std::get<SqlQuery>(z);
    const std::string agg(aggregation_name(q.agg));
    emit(out, "b");
    emit(out, "agg=" + agg);
    emit(out, "selq=" + agg + flag(header_overlap_[q.sel]));
    for (const auto& w : header_words_[q.sel]) emit(out, "selw=" + agg + w);
    emit(out, "nc=" + std::to_string(q.conditions.size()));
    for (const auto& c : q.conditions) {
      const std::string op(compare_symbol(c.op));
      emit(out, "cop=" + op);
      emit(out, "ccq=" + op + flag(header_overlap_[c.column]));
      emit(out, "csel=" + flag(c.column == q.sel));
      emit(out, "cvl=" + std::to_string(std::min(c.value_end - c.value_start + 1, 4)));
      for (const auto& w : header_words_[c.column]) emit(out, "ccw=" + op + w);
    }
  }

 private:
  std::vector<std::vector<std::string>> header_words_;
  std::vector<char> header_overlap_;
};

}  // namespace

TokenFeatures document_token_features(const Example& ex) {
  const TokenSequence& doc = ex.document();
  TokenFeatures out;
  out.positions = doc.size();
  out.values.assign(static_cast<std::size_t>(out.positions) * kTokenFeatureDim, 0.0);
  fill_segment(doc, false, question_words(ex), 0, out);
  return out;
}

TokenFeatures tagging_token_features(const Example& ex) {
  const TokenSequence& doc = ex.document();
  const int m = ex.question.size();
  TokenFeatures out;
  out.positions = m + 1 + doc.size();
  out.values.assign(static_cast<std::size_t>(out.positions) * kTokenFeatureDim, 0.0);
  const auto qwords = question_words(ex);
  fill_segment(ex.question, true, qwords, 0, out);
  double* sep = out.values.data() + static_cast<std::size_t>(m) * kTokenFeatureDim;
  sep[0] = 1.0;
  sep[17] = 1.0;
  fill_segment(doc, false, qwords, m + 1, out);
  return out;
}

int tagging_position(const Example& ex, const NumberMention& n) {
  switch (n.source) {
    case NumberSource::kQuestion: return n.index;
    case NumberSource::kDocument: return ex.question.size() + 1 + n.index;
    default: return -1;
  }
}

std::unique_ptr<Featurizer> make_featurizer(std::string_view id, const Example& ex,
                                            std::size_t dim) {
  if (id == "span") return std::make_unique<SpanFeaturizer>(ex, dim);
  if (id == "equation") return std::make_unique<EquationFeaturizer>(ex, dim);
  if (id == "sql") return std::make_unique<SqlFeaturizer>(ex, dim);
  throw ConfigError("unknown feature extractor '" + std::string(id) + "'");
}

std::vector<std::string> featurizer_names() { return {"span", "equation", "sql"}; }

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace hardem

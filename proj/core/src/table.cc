#include "hardem/table.h"

#include <stdexcept>

namespace hardem {

Table Table::make(const std::vector<std::string>& headers,
                  std::vector<std::vector<std::string>> rows) {
  if (headers.empty()) throw std::invalid_argument("table has no columns");
  Table t;
  for (const auto& h : headers) {
    TokenSequence title = tokenize(h);
    if (title.empty()) throw std::invalid_argument("empty column title");
    t.headers_.push_back(std::move(title));
  }
  const std::size_t width = headers.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw std::invalid_argument("row " + std::to_string(r) + " has " +
                                  std::to_string(rows[r].size()) +
                                  " cells, expected " + std::to_string(width));
    }
  }
  t.rows_ = std::move(rows);
  t.kinds_.assign(width, t.rows_.empty() ? ColumnKind::kText : ColumnKind::kNumeric);
  for (const auto& row : t.rows_) {
    auto& norm = t.normalized_.emplace_back();
    auto& num = t.numeric_.emplace_back();
    for (std::size_t c = 0; c < width; ++c) {
      norm.push_back(normalize_text(row[c]));
      num.push_back(parse_number(row[c]));
      if (!num.back()) t.kinds_[c] = ColumnKind::kText;
    }
  }
  return t;
}

}  // namespace hardem

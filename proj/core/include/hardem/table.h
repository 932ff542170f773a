#ifndef HARDEM_TABLE_H_
#define HARDEM_TABLE_H_

#include <optional>
#include <string>
#include <vector>

#include "hardem/text.h"

namespace hardem {

enum class ColumnKind { kText, kNumeric };

// In-memory table: header titles, string cells, and the derived per-cell
// normalized text and numeric shadow values. Build with Table::make so the
// derived fields stay consistent.
class Table {
 public:
  // Throws std::invalid_argument when there are no columns, a header title
  // is empty, or a row has the wrong width.
  static Table make(const std::vector<std::string>& headers,
                    std::vector<std::vector<std::string>> rows);

  int num_columns() const { return static_cast<int>(headers_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  const std::vector<TokenSequence>& headers() const { return headers_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::string& cell(int row, int col) const { return rows_[row][col]; }
  const std::string& normalized(int row, int col) const {
    return normalized_[row][col];
  }
  const std::optional<double>& numeric(int row, int col) const {
    return numeric_[row][col];
  }
  ColumnKind kind(int col) const { return kinds_[col]; }

  bool operator==(const Table& other) const {
    return headers_ == other.headers_ && rows_ == other.rows_;
  }

 private:
  std::vector<TokenSequence> headers_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::vector<std::string>> normalized_;
  std::vector<std::vector<std::optional<double>>> numeric_;
  std::vector<ColumnKind> kinds_;
};

}  // namespace hardem

#endif  // HARDEM_TABLE_H_

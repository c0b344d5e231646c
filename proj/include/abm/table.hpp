#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "abm/value.hpp"

namespace abm {

/// Column-oriented results table. All columns have equal length.
class DataTable {
 public:
  DataTable() = default;
  explicit DataTable(std::vector<std::string> names);

  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] std::size_t columns() const noexcept { return names_.size(); }
  [[nodiscard]] std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }

  [[nodiscard]] const std::vector<Value>& column(std::string_view name) const;
  [[nodiscard]] const std::vector<Value>& column(std::size_t i) const { return columns_.at(i); }
  [[nodiscard]] bool has_column(std::string_view name) const;

  void append_row(std::vector<Value> row);
  [[nodiscard]] std::vector<Value> row(std::size_t i) const;

  friend bool operator==(const DataTable&, const DataTable&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<Value>> columns_;
};

/// CSV writer. Header row first, then one line per row, CRLF-free "\n" line endings.
/// Cells: missing -> empty field, bool -> true/false, int -> decimal, real -> shortest
/// round-trip decimal always carrying '.', 'e', "inf" or "nan", string -> always double-quoted
/// with embedded quotes doubled. Each `comments` entry is written first as "# <text>".
void write_csv(const DataTable& table, std::ostream& out, const std::vector<std::string>& comments = {});

/// Inverse of write_csv; lines starting with '#' before the header are skipped.
DataTable read_csv(std::istream& in);

std::string to_csv(const DataTable& table, const std::vector<std::string>& comments = {});

}  // namespace abm

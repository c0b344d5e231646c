#include "abm/table.hpp"

#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "abm/errors.hpp"

namespace abm {

DataTable::DataTable(std::vector<std::string> names) : names_(std::move(names)), columns_(names_.size()) {}

const std::vector<Value>& DataTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return columns_[i];
  throw NotFound("table has no column '" + std::string(name) + "'");
}

bool DataTable::has_column(std::string_view name) const {
  for (const auto& n : names_)
    if (n == name) return true;
  return false;
}

void DataTable::append_row(std::vector<Value> row) {
  if (row.size() != columns_.size()) throw ContractViolation("row arity does not match the table");
  for (std::size_t i = 0; i < row.size(); ++i) columns_[i].push_back(std::move(row[i]));
}

std::vector<Value> DataTable::row(std::size_t i) const {
  std::vector<Value> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.at(i));
  return out;
}

namespace {

void write_quoted(std::ostream& out, std::string_view s) {
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_cell(std::ostream& out, const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) write_quoted(out, *s);
  else out << to_string(v);
}

struct Field {
  std::string text;
  bool quoted = false;
};

// Splits one CSV record; quoted fields may span lines.
bool read_record(std::istream& in, std::vector<Field>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  Field cur;
  bool in_quotes = false;
  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cur.text += '"';
        } else {
          in_quotes = false;
        }
      } else {
        cur.text += c;
      }
    } else if (c == '"') {
      in_quotes = true;
      cur.quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur = {};
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur.text += c;
    }
  }
  if (in_quotes) throw Error("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return true;
}

Value parse_cell(const Field& f) {
  if (f.quoted) return f.text;
  if (f.text.empty()) return Missing{};
  if (f.text == "true") return true;
  if (f.text == "false") return false;
  if (f.text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (f.text == "inf") return std::numeric_limits<double>::infinity();
  if (f.text == "-inf") return -std::numeric_limits<double>::infinity();
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  if (f.text.find_first_of(".e") == std::string::npos) {
    std::int64_t i = 0;
    if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc{} && p == last) return i;
  } else {
    double d = 0;
    if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc{} && p == last) return d;
  }
  throw Error("unparseable CSV cell '" + f.text + "'");
}

}  // namespace

void write_csv(const DataTable& table, std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns(); ++i) {
    if (i) out << ',';
    out << table.names()[i];
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t i = 0; i < table.columns(); ++i) {
      if (i) out << ',';
      write_cell(out, table.column(i)[r]);
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing CSV output");
}

std::string to_csv(const DataTable& table, const std::vector<std::string>& comments) {
  std::ostringstream os;
  write_csv(table, os, comments);
  return os.str();
}

DataTable read_csv(std::istream& in) {
  std::string line;
  while (in.peek() == '#') std::getline(in, line);
  std::vector<Field> fields;
  if (!read_record(in, fields)) throw Error("CSV input has no header");
  std::vector<std::string> names;
  for (auto& f : fields) names.push_back(std::move(f.text));
  DataTable table(names);
  while (read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].text.empty() && !fields[0].quoted && names.size() != 1) continue;
    if (fields.size() != names.size()) throw Error("CSV row has " + std::to_string(fields.size()) + " fields, expected " + std::to_string(names.size()));
    std::vector<Value> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_cell(f));
    table.append_row(std::move(row));
  }
  return table;
}

}  // namespace abm

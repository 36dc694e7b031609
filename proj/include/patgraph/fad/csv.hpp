#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patgraph/error.hpp"

namespace patgraph::csv {

using Record = std::vector<std::string>;

// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line
// breaks. A UTF-8 BOM and CRLF line ends are accepted. Row numbers in
// errors are 1-based physical records (the header is row 1).
inline std::vector<Record> parse(std::string_view text, const std::string& sheet = "csv") {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<Record> rows;
  Record row;
  std::string field;
  bool in_quotes = false;
  bool quoted_field = false;
  bool row_has_data = false;
  std::size_t row_no = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    quoted_field = false;
  };
  auto end_row = [&] {
    end_field();
    if (row_has_data || row.size() > 1 || !row.front().empty()) rows.push_back(std::move(row));
    row.clear();
    row_has_data = false;
    ++row_no;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || quoted_field) {
          throw CsvError(sheet, row_no, "unexpected quote inside an unquoted field");
        }
        in_quotes = true;
        quoted_field = true;
        row_has_data = true;
        break;
      case ',':
        end_field();
        row_has_data = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        if (quoted_field) throw CsvError(sheet, row_no, "text after a closing quote");
        field += c;
        row_has_data = true;
    }
  }
  if (in_quotes) throw CsvError(sheet, row_no, "unterminated quoted field");
  if (!field.empty() || !row.empty() || row_has_data) end_row();
  return rows;
}

inline std::string escape(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string write(const std::vector<Record>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

// Splits a ';'-separated list cell, trimming blanks and dropping empties.
inline std::vector<std::string> split_list(std::string_view cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    std::size_t end = cell.find(';', start);
    if (end == std::string_view::npos) end = cell.size();
    std::string_view item = cell.substr(start, end - start);
    while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.remove_prefix(1);
    while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

inline std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ';';
    out += items[i];
  }
  return out;
}

// A parsed sheet addressed by header name.
class Table {
 public:
  Table(std::string sheet, std::string_view text) : sheet_(std::move(sheet)) {
    auto rows = parse(text, sheet_);
    if (rows.empty()) throw CsvError(sheet_, 1, "missing header row");
    header_ = std::move(rows.front());
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (header_[i].empty()) throw CsvError(sheet_, 1, "empty column header");
      if (!columns_.emplace(header_[i], i).second) {
        throw CsvError(sheet_, 1, "duplicate column '" + header_[i] + "'");
      }
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() != header_.size()) {
        throw CsvError(sheet_, r + 1,
                       "expected " + std::to_string(header_.size()) + " fields, found " +
                           std::to_string(rows[r].size()));
      }
      rows_.push_back(std::move(rows[r]));
    }
  }

  void require(std::initializer_list<std::string_view> names) const {
    for (auto n : names) {
      if (!columns_.count(std::string(n))) {
        throw CsvError(sheet_, 1, "missing required column '" + std::string(n) + "'");
      }
    }
  }

  const std::string& sheet() const { return sheet_; }
  const Record& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  const Record& row(std::size_t i) const { return rows_.at(i); }
  // 1-based record number of data row i, counting the header.
  std::size_t row_number(std::size_t i) const { return i + 2; }

  bool has(std::string_view column) const { return columns_.count(std::string(column)) != 0; }

  const std::string& cell(std::size_t i, std::string_view column) const {
    static const std::string empty;
    auto it = columns_.find(std::string(column));
    return it == columns_.end() ? empty : rows_.at(i)[it->second];
  }

  // Columns outside `known`, in header order.
  std::vector<std::string> extra_columns(std::initializer_list<std::string_view> known) const {
    std::vector<std::string> out;
    for (const auto& h : header_) {
      if (std::find(known.begin(), known.end(), std::string_view(h)) == known.end()) out.push_back(h);
    }
    return out;
  }

 private:
  std::string sheet_;
  Record header_;
  std::map<std::string, std::size_t> columns_;
  std::vector<Record> rows_;
};

}  // namespace patgraph::csv

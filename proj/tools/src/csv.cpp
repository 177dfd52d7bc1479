#include "chiralwg_cli/csv.hpp"

#include <cstdio>
#include <utility>

#include "chiralwg/errors.hpp"

namespace chiralwg::cli {

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ResultTable::ResultTable(std::string command, std::string hash)
    : command_(std::move(command)), hash_(std::move(hash)) {}

void ResultTable::comment(std::string line) { comments_.push_back(std::move(line)); }

void ResultTable::columns(std::vector<std::string> names) {
  columns_ = std::move(names);
}

ResultTable& ResultTable::cell(double value) {
  pending_.push_back(format_real(value));
  return *this;
}

ResultTable& ResultTable::cell(const std::string& value) {
  pending_.push_back(value);
  return *this;
}

ResultTable& ResultTable::cell(Complex value) {
  cell(value.real());
  cell(value.imag());
  return *this;
}

void ResultTable::end_row() {
  if (pending_.size() != columns_.size())
    throw Error("result table: row width " + std::to_string(pending_.size()) +
                " does not match " + std::to_string(columns_.size()) + " columns");
  rows_.push_back(std::move(pending_));
  pending_.clear();
}

void ResultTable::write(std::ostream& out) const {
  out << "# chiralwg " << command_ << "\n";
  out << "# config-hash: " << hash_ << "\n";
  for (const auto& c : comments_) out << "# " << c << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i)
    out << columns_[i] << (i + 1 == columns_.size() ? "\n" : ",");
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 == row.size() ? "\n" : ",");
  }
}

}  // namespace chiralwg::cli

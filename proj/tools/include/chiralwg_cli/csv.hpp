#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "chiralwg/types.hpp"

namespace chiralwg::cli {

// Fixed 17-significant-digit formatting so identical configs reproduce
// byte-identical files.
std::string format_real(double value);

class ResultTable {
 public:
  ResultTable(std::string command, std::string hash);

  void comment(std::string line);                 // extra provenance
  void columns(std::vector<std::string> names);   // once, before rows
  ResultTable& cell(double value);
  ResultTable& cell(const std::string& value);
  ResultTable& cell(Complex value);  // two adjacent cells, _re then _im
  void end_row();

  std::size_t n_rows() const { return rows_.size(); }
  void write(std::ostream& out) const;

 private:
  std::string command_;
  std::string hash_;
  std::vector<std::string> comments_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> pending_;
};

}  // namespace chiralwg::cli

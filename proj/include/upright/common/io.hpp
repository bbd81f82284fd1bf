#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace upright {

/// Column-oriented CSV writer. Doubles are printed with max_digits10 so that
/// equal values compare bitwise equal across runs.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
    cols_ = header.size();
  }

  void row(const std::vector<double>& values) {
    if (values.size() != cols_)
      throw std::runtime_error("CSV row width mismatch");
    out_ << std::setprecision(17);
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << values[i];
    }
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  size_t cols_ = 0;
};

/// Reads a CSV written by CsvWriter. Returns header + numeric rows.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::runtime_error("CSV column not found: " + name);
  }
};

inline CsvData readCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvData data;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      while (std::getline(ss, cell, ',')) data.header.push_back(cell);
      first = false;
    } else {
      std::vector<double> row;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      data.rows.push_back(std::move(row));
    }
  }
  return data;
}

/// Line-per-record JSON log (append mode).
class JsonlLogger {
 public:
  explicit JsonlLogger(const std::string& path) : out_(path, std::ios::app) {
    if (!out_) throw std::runtime_error("cannot open " + path);
  }
  void line(const std::string& jsonLine) {
    out_ << jsonLine << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

}  // namespace upright

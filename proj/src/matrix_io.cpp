// SPDX-License-Identifier: Apache-2.0

#include "lrsdoa/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lrsdoa {

namespace {

constexpr const char* kMagic = "lrsdoa-matrix 1";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

void write_matrix(std::ostream& os, const CMatrix& x) {
  os << kMagic << '\n' << x.rows() << ' ' << x.cols() << '\n';
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) os << ' ';
      os << format_double(x(i, j).real()) << ' ' << format_double(x(i, j).imag());
    }
    os << '\n';
  }
}

CMatrix read_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_matrix: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMagic) throw std::runtime_error("read_matrix: missing '" + std::string(kMagic) + "' header");
  if (!next_content_line(is, line)) throw std::runtime_error("read_matrix: missing dimensions");
  std::istringstream dims(line);
  long rows = -1, cols = -1;
  if (!(dims >> rows >> cols) || rows < 0 || cols < 0) {
    throw std::runtime_error("read_matrix: bad dimension line '" + line + "'");
  }
  CMatrix x(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!next_content_line(is, line)) {
      throw std::runtime_error("read_matrix: expected " + std::to_string(rows) + " rows, got " +
                               std::to_string(i));
    }
    std::istringstream row(line);
    for (long j = 0; j < cols; ++j) {
      double re = 0.0, im = 0.0;
      if (!(row >> re >> im)) {
        throw std::runtime_error("read_matrix: row " + std::to_string(i) + " has fewer than " +
                                 std::to_string(cols) + " complex entries");
      }
      x(i, j) = Complex(re, im);
    }
    std::string extra;
    if (row >> extra) throw std::runtime_error("read_matrix: row " + std::to_string(i) + " is too long");
  }
  return x;
}

void save_matrix(const std::string& path, const CMatrix& x) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_matrix(os, x);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

CMatrix load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_matrix(is);
}

}  // namespace lrsdoa

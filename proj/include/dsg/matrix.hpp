// Dense row-major matrix of 64-bit reals plus the plain-text .dmat format.
// The matrix is the universal carrier for weights, signals and transforms;
// entries must be finite, serialization round-trips bit-exactly.
#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dsg {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// File-level problems.
struct parse_error : error { using error::error; };
struct structure_error : error { using error::error; };
// Contract violations between operands / configuration.
struct shape_error : error { using error::error; };
struct size_error : error { using error::error; };
struct domain_error : error { using error::error; };
struct config_error : error { using error::error; };
struct design_error : error { using error::error; };
struct divergence_error : error { using error::error; };

class DenseMatrix {
public:
  DenseMatrix() = default;

  // Zero-filled.
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0)
      throw size_error("DenseMatrix: dimensions must be positive");
  }

  // Takes ownership of a row-major buffer; rejects NaN/Inf.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0)
      throw size_error("DenseMatrix: dimensions must be positive");
    if (data_.size() != rows * cols)
      throw structure_error("DenseMatrix: data length does not match rows*cols");
    for (double v : data_)
      if (!std::isfinite(v))
        throw domain_error("DenseMatrix: non-finite entry");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const DenseMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Shortest decimal string that parses back to the same 64-bit value.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view tok, std::size_t line_no) {
  double v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw parse_error("line " + std::to_string(line_no) +
                      ": cannot parse number '" + std::string(tok) + "'");
  return v;
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

// .dmat format: line 1 = "<rows> <cols>", then one line per row with cols
// space-separated values.
inline void save_matrix(const DenseMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw error("cannot open for writing: " + path.string());
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out)
    throw error("write failure: " + path.string());
}

inline DenseMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw parse_error("line 1: missing header in " + path.string());
  auto header = detail::split_ws(line);
  if (header.size() != 2)
    throw parse_error("line 1: header must be '<rows> <cols>' in " + path.string());
  std::size_t rows = 0, cols = 0;
  for (int k = 0; k < 2; ++k) {
    std::size_t* dst = k == 0 ? &rows : &cols;
    auto tok = header[k];
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), *dst);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
      throw parse_error("line 1: bad dimension '" + std::string(tok) + "'");
  }
  if (rows == 0 || cols == 0)
    throw structure_error("line 1: dimensions must be positive");

  std::vector<double> data;
  data.reserve(rows * cols);
  std::size_t line_no = 1;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;  // tolerate blank lines
    if (row >= rows)
      throw structure_error("line " + std::to_string(line_no) +
                            ": more rows than header declares");
    if (toks.size() != cols)
      throw structure_error("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(cols) + " values, got " +
                            std::to_string(toks.size()));
    for (auto t : toks) {
      double v = parse_double(t, line_no);
      if (!std::isfinite(v))
        throw parse_error("line " + std::to_string(line_no) +
                          ": non-finite entry '" + std::string(t) + "'");
      data.push_back(v);
    }
    ++row;
  }
  if (row != rows)
    throw structure_error("expected " + std::to_string(rows) +
                          " rows, file has " + std::to_string(row));
  return DenseMatrix(rows, cols, std::move(data));
}

}  // namespace dsg

#include "core/data_matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <vector>

namespace vesd {

namespace {

void check_little_endian() {
  const std::uint32_t probe = 1;
  unsigned char b;
  std::memcpy(&b, &probe, 1);
  require(b == 1, ErrorClass::invalid_input,
          "binary matrix IO requires a little-endian host");
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t line) {
  const char* s = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  while (end && *end == ' ') ++end;
  if (end == s || (end && *end != '\0') || !std::isfinite(v)) {
    fail(ErrorClass::invalid_input,
         path + ":" + std::to_string(line) + ": not a finite number: '" + cell + "'");
  }
  return v;
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path, bool has_header) {
  std::ifstream in(path);
  require(in.good(), ErrorClass::invalid_input, "cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (has_header && lineno == 1) continue;
    if (line.empty()) {
      // allow blank trailing lines only
      std::string rest;
      while (std::getline(in, rest)) {
        if (!rest.empty() && rest != "\r")
          fail(ErrorClass::invalid_input,
               path + ":" + std::to_string(lineno) + ": blank line inside data");
      }
      break;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string cell = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      // trim leading spaces; trailing handled by parse_cell
      std::size_t b = cell.find_first_not_of(' ');
      cell = (b == std::string::npos) ? std::string() : cell.substr(b);
      row.push_back(parse_cell(cell, path, lineno));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorClass::invalid_input,
           path + ":" + std::to_string(lineno) + ": ragged row (expected " +
               std::to_string(rows.front().size()) + " cells, got " +
               std::to_string(row.size()) + ")");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorClass::invalid_input, path + ": no data rows");
  return rows;
}

}  // namespace

DataMatrix read_csv_matrix(const std::string& path, bool has_header) {
  auto rows = read_csv_rows(path, has_header);
  DataMatrix m;
  m.x.resize(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.x.rows(); ++i)
    for (Eigen::Index j = 0; j < m.x.cols(); ++j)
      m.x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

DataMatrix read_bin_matrix(const std::string& path) {
  check_little_endian();
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorClass::invalid_input, "cannot open file: " + path);
  std::uint32_t n = 0, p = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&p), 4);
  require(in.good() && n > 0 && p > 0, ErrorClass::invalid_input,
          path + ": bad binary header");
  DataMatrix m;
  m.x.resize(n, p);  // Eigen default storage is column-major
  in.read(reinterpret_cast<char*>(m.x.data()),
          static_cast<std::streamsize>(sizeof(double) * n * p));
  require(in.gcount() == static_cast<std::streamsize>(sizeof(double) * n * p),
          ErrorClass::invalid_input, path + ": truncated binary payload");
  char extra;
  in.read(&extra, 1);
  require(in.eof(), ErrorClass::invalid_input, path + ": trailing bytes after payload");
  require(m.x.allFinite(), ErrorClass::invalid_input, path + ": non-finite values");
  return m;
}

void write_bin_matrix(const DataMatrix& m, const std::string& path) {
  check_little_endian();
  require(m.n() > 0 && m.p() > 0, ErrorClass::invalid_input, "empty matrix");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorClass::invalid_input, "cannot write file: " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(m.n());
  const std::uint32_t p = static_cast<std::uint32_t>(m.p());
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&p), 4);
  out.write(reinterpret_cast<const char*>(m.x.data()),
            static_cast<std::streamsize>(sizeof(double) * m.x.size()));
  require(out.good(), ErrorClass::invalid_input, "short write: " + path);
}

Eigen::VectorXd read_csv_vector(const std::string& path) {
  auto rows = read_csv_rows(path, false);
  const std::size_t r = rows.size();
  const std::size_t c = rows.front().size();
  require(r == 1 || c == 1, ErrorClass::invalid_input,
          path + ": vector file must be a single row or single column");
  Eigen::VectorXd v(static_cast<Eigen::Index>(r == 1 ? c : r));
  if (r == 1)
    for (std::size_t j = 0; j < c; ++j) v(static_cast<Eigen::Index>(j)) = rows[0][j];
  else
    for (std::size_t i = 0; i < r; ++i) v(static_cast<Eigen::Index>(i)) = rows[i][0];
  return v;
}

}  // namespace vesd

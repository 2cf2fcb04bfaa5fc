// Observation matrix (rows = observations) plus strict CSV / binary ingestion.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "core/common.hpp"

namespace vesd {

struct DataMatrix {
  Eigen::MatrixXd x;  // n x p, one observation per row

  std::int64_t n() const { return x.rows(); }
  std::int64_t p() const { return x.cols(); }
};

// CSV: comma separated numeric cells, every row the same width.  Parsing is
// strict: a cell that is not a complete finite number is an input error, as is
// a ragged row.  `has_header` skips the first line.
DataMatrix read_csv_matrix(const std::string& path, bool has_header);

// Binary layout: uint32 n, uint32 p (little endian), then n*p float64 values
// in column-major order.
DataMatrix read_bin_matrix(const std::string& path);
void write_bin_matrix(const DataMatrix& m, const std::string& path);

// A vector file is a CSV with a single row or a single column.
Eigen::VectorXd read_csv_vector(const std::string& path);

}  // namespace vesd

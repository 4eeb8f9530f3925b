#pragma once

#include <Eigen/Dense>
#include <optional>

#include "ltm/common.hpp"

namespace ltm {

// Row-major throughout the pipeline: clients are rows and the hot kernels
// consume contiguous rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Client-held input: n rows of d features, entries bounded by eta in absolute
// value; optional per-row regression target (bounded by eta as well when the
// bound is enforced).
struct DataMatrix {
  Matrix rows;                   // n x d
  double eta = 1.0;              // declared entry bound
  std::optional<Vector> target;  // length n

  i64 n() const { return rows.rows(); }
  i64 d() const { return rows.cols(); }
};

}  // namespace ltm

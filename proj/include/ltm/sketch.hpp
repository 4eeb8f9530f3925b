#pragma once

#include <string>
#include <vector>

#include "ltm/data.hpp"
#include "ltm/rng.hpp"

namespace ltm {

enum class SketchMode { kSparseOsnap, kDenseRademacher };

struct SketchSpec {
  i64 n = 0;
  i64 m = 0;
  i64 s = 0;  // dense mode requires s == m
  SketchMode mode = SketchMode::kSparseOsnap;
  u64 seed = 0;
  // Ablation: sample each column's row indices with replacement instead of
  // the default distinct-rows sampling.
  bool with_replacement = false;
};

// S = sum_i S_i with each piece S_i holding exactly one signed nonzero per
// column; the sketch operator applied to data carries the 1/sqrt(s) factor.
// Piece-major storage: rows[i][j] / signs[i][j] give the nonzero of column j
// in piece i.
struct SketchDecomposition {
  i64 n = 0;
  i64 m = 0;
  i64 s = 0;
  SketchMode mode = SketchMode::kSparseOsnap;
  std::vector<std::vector<u32>> rows;
  std::vector<std::vector<i8>> signs;

  double scale() const;  // 1/sqrt(s)
};

// Deterministic in (spec contents, spec.seed).
SketchDecomposition sample_sketch(const SketchSpec& spec);

struct OsnapParams {
  i64 k = 1;
  double alpha_s = 0.5;
  double beta = 0.01;
  double c_m = 1.0;
  double c_s = 1.0;
};

struct SketchDims {
  i64 m = 0;
  i64 s = 0;
};

// m = ceil(c_m * k * ln(k/beta) / alpha_s^2), s = ceil(c_s * ln(k/beta) / alpha_s).
SketchDims cohen_params(const OsnapParams& p);

// (1/sqrt(s)) * sum_i S_i * A (every piece reads the same input). Per-piece
// accumulation uses a fixed deterministic order; pieces are combined by
// pairwise tree summation.
Matrix apply_sketch(const SketchDecomposition& dec, const Matrix& a);

// (1/sqrt(s)) * sum_i S_i * blocks[i]; blocks.size() must equal s.
Matrix apply_sketch_blocks(const SketchDecomposition& dec,
                           const std::vector<Matrix>& blocks);

// Assembled m x n piece (entries in {-1, 0, +1}), or the full S = sum S_i.
// Test/tool use; dense in n.
Matrix assemble_piece(const SketchDecomposition& dec, i64 piece);
Matrix assemble(const SketchDecomposition& dec);

// Nonzero count per row within one piece / across all pieces.
std::vector<i64> row_loads(const SketchDecomposition& dec, i64 piece);
std::vector<i64> total_row_loads(const SketchDecomposition& dec);

// Max over `trials` random rank-k projections X of
// | ||S'(A - A X X^T)||_F^2 / ||A - A X X^T||_F^2 - 1 |  with S' the scaled
// operator. Residuals with negligible mass (< 1e-12 * ||A||_F^2) are skipped.
double embedding_distortion_test(const SketchDecomposition& dec,
                                 const Matrix& a, i64 k, i64 trials,
                                 RandomStream& stream);

// Zero-pad rows so the dense mode's m | n precondition can be met explicitly.
Matrix pad_rows_to_multiple(const Matrix& a, i64 m);

std::string sketch_spec_to_json(const SketchSpec& spec);
SketchSpec sketch_spec_from_json(const std::string& text);

}  // namespace ltm

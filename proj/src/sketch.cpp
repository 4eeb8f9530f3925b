#include "ltm/sketch.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ltm/kernels.hpp"

namespace ltm {
namespace {

void validate(const SketchSpec& spec) {
  if (spec.n < 1) throw ConfigError("sketch: n must be >= 1");
  if (spec.m < 1) throw ConfigError("sketch: m must be >= 1");
  if (spec.mode == SketchMode::kDenseRademacher) {
    if (spec.s != spec.m)
      throw ConfigError("sketch: dense mode requires s == m");
    if (spec.n % spec.m != 0)
      throw ConfigError(
          "sketch: dense mode requires m | n (zero-pad the input via "
          "pad_rows_to_multiple to satisfy this)");
  } else {
    if (spec.s < 1) throw ConfigError("sketch: s must be >= 1");
    if (spec.s > spec.m && !spec.with_replacement)
      throw ConfigError("sketch: s distinct rows per column need s <= m");
  }
}

// One uniformly random permutation of [count] via Fisher-Yates.
void fill_permutation(std::vector<u32>& perm, u64 count, RandomStream& stream) {
  perm.resize(count);
  for (u64 i = 0; i < count; ++i) perm[i] = static_cast<u32>(i);
  for (u64 i = count; i > 1; --i) {
    u64 j = stream.uniform_below(i);
    std::swap(perm[i - 1], perm[j]);
  }
}

void sample_sparse(const SketchSpec& spec, SketchDecomposition& dec,
                   RandomStream& stream) {
  const u64 m = static_cast<u64>(spec.m);
  const i64 s = spec.s;
  std::vector<u32> picks(static_cast<std::size_t>(s));
  for (i64 j = 0; j < spec.n; ++j) {
    if (spec.with_replacement) {
      for (i64 i = 0; i < s; ++i)
        picks[i] = static_cast<u32>(stream.uniform_below(m));
    } else {
      // Floyd's sampling: s distinct rows, uniform over subsets.
      std::size_t filled = 0;
      for (u64 t = m - static_cast<u64>(s); t < m; ++t) {
        u32 r = static_cast<u32>(stream.uniform_below(t + 1));
        bool seen = false;
        for (std::size_t q = 0; q < filled; ++q)
          if (picks[q] == r) { seen = true; break; }
        picks[filled++] = seen ? static_cast<u32>(t) : r;
      }
    }
    // Uniform assignment of picks to pieces.
    for (i64 i = s; i > 1; --i) {
      u64 q = stream.uniform_below(static_cast<u64>(i));
      std::swap(picks[i - 1], picks[q]);
    }
    for (i64 i = 0; i < s; ++i) {
      dec.rows[i][j] = picks[i];
      dec.signs[i][j] = static_cast<i8>(stream.rademacher());
    }
  }
}

// Dense mode: columns are permuted into n/m groups of m; within a group,
// piece i takes row tau((i + t) mod m) for slot t, tau a fresh uniform
// permutation. Per column the pieces hit all m rows bijectively, and each
// piece carries exactly n/m nonzeros per row. Signs are i.i.d., so the
// assembled S is a uniformly random dense +-1 matrix.
void sample_dense(const SketchSpec& spec, SketchDecomposition& dec,
                  RandomStream& stream) {
  const i64 m = spec.m;
  const i64 groups = spec.n / m;
  std::vector<u32> col_perm;
  fill_permutation(col_perm, static_cast<u64>(spec.n), stream);
  std::vector<u32> tau;
  for (i64 g = 0; g < groups; ++g) {
    fill_permutation(tau, static_cast<u64>(m), stream);
    for (i64 t = 0; t < m; ++t) {
      const u32 col = col_perm[g * m + t];
      for (i64 i = 0; i < m; ++i) {
        dec.rows[i][col] = tau[(i + t) % m];
        dec.signs[i][col] = static_cast<i8>(stream.rademacher());
      }
    }
  }
}

}  // namespace

double SketchDecomposition::scale() const {
  return 1.0 / std::sqrt(static_cast<double>(s));
}

SketchDecomposition sample_sketch(const SketchSpec& spec) {
  validate(spec);
  SketchDecomposition dec;
  dec.n = spec.n;
  dec.m = spec.m;
  dec.s = spec.s;
  dec.mode = spec.mode;
  dec.rows.assign(static_cast<std::size_t>(spec.s),
                  std::vector<u32>(static_cast<std::size_t>(spec.n)));
  dec.signs.assign(static_cast<std::size_t>(spec.s),
                   std::vector<i8>(static_cast<std::size_t>(spec.n)));
  RandomStream stream(spec.seed, StreamDomain::kSketch, 0);
  if (spec.mode == SketchMode::kDenseRademacher)
    sample_dense(spec, dec, stream);
  else
    sample_sparse(spec, dec, stream);
  return dec;
}

SketchDims cohen_params(const OsnapParams& p) {
  if (p.k < 1) throw ConfigError("cohen_params: k must be >= 1");
  if (!(p.alpha_s > 0.0) || p.alpha_s > 1.0)
    throw ConfigError("cohen_params: alpha_s must be in (0, 1]");
  if (!(p.beta > 0.0) || !(p.beta < 1.0))
    throw ConfigError("cohen_params: beta must be in (0, 1)");
  if (!(p.c_m > 0.0) || !(p.c_s > 0.0))
    throw ConfigError("cohen_params: constants must be positive");
  const double lg = std::log(static_cast<double>(p.k) / p.beta);
  SketchDims dims;
  dims.m = static_cast<i64>(
      std::ceil(p.c_m * static_cast<double>(p.k) * lg / (p.alpha_s * p.alpha_s)));
  dims.s = static_cast<i64>(std::ceil(p.c_s * lg / p.alpha_s));
  dims.m = std::max<i64>(dims.m, 1);
  dims.s = std::max<i64>(dims.s, 1);
  return dims;
}

namespace {

// Scatter one piece into out (m x d row-major), reading rows of a with the
// given stride. Deterministic column order.
void scatter_piece(const SketchDecomposition& dec, i64 piece, const double* src,
                   std::size_t src_stride, std::size_t d, double* out) {
  kernels::ops().scatter_accum_f64(src, src_stride, dec.rows[piece].data(),
                                   dec.signs[piece].data(),
                                   static_cast<std::size_t>(dec.n), d, out);
}

// Pairwise tree sum of the per-piece buffers, then scale.
Matrix combine_pieces(std::vector<Matrix>& pieces, double scale) {
  std::size_t width = pieces.size();
  while (width > 1) {
    std::size_t half = width / 2;
    for (std::size_t i = 0; i < half; ++i)
      pieces[i] += pieces[width - 1 - i];
    width -= half;
  }
  return scale * pieces[0];
}

}  // namespace

Matrix apply_sketch(const SketchDecomposition& dec, const Matrix& a) {
  if (a.rows() != dec.n) throw ConfigError("apply_sketch: row count mismatch");
  const std::size_t d = static_cast<std::size_t>(a.cols());
  std::vector<Matrix> pieces(static_cast<std::size_t>(dec.s));
  for (i64 i = 0; i < dec.s; ++i) {
    pieces[i] = Matrix::Zero(dec.m, a.cols());
    scatter_piece(dec, i, a.data(), d, d, pieces[i].data());
  }
  return combine_pieces(pieces, dec.scale());
}

Matrix apply_sketch_blocks(const SketchDecomposition& dec,
                           const std::vector<Matrix>& blocks) {
  if (static_cast<i64>(blocks.size()) != dec.s)
    throw ConfigError("apply_sketch_blocks: need exactly s blocks");
  for (const Matrix& b : blocks)
    if (b.rows() != dec.n || b.cols() != blocks[0].cols())
      throw ConfigError("apply_sketch_blocks: block shape mismatch");
  const std::size_t d = static_cast<std::size_t>(blocks[0].cols());
  std::vector<Matrix> pieces(static_cast<std::size_t>(dec.s));
  for (i64 i = 0; i < dec.s; ++i) {
    pieces[i] = Matrix::Zero(dec.m, blocks[i].cols());
    scatter_piece(dec, i, blocks[i].data(), d, d, pieces[i].data());
  }
  return combine_pieces(pieces, dec.scale());
}

Matrix assemble_piece(const SketchDecomposition& dec, i64 piece) {
  if (piece < 0 || piece >= dec.s)
    throw ConfigError("assemble_piece: piece out of range");
  Matrix s = Matrix::Zero(dec.m, dec.n);
  for (i64 j = 0; j < dec.n; ++j)
    s(dec.rows[piece][j], j) += static_cast<double>(dec.signs[piece][j]);
  return s;
}

Matrix assemble(const SketchDecomposition& dec) {
  Matrix s = Matrix::Zero(dec.m, dec.n);
  for (i64 i = 0; i < dec.s; ++i)
    for (i64 j = 0; j < dec.n; ++j)
      s(dec.rows[i][j], j) += static_cast<double>(dec.signs[i][j]);
  return s;
}

std::vector<i64> row_loads(const SketchDecomposition& dec, i64 piece) {
  if (piece < 0 || piece >= dec.s)
    throw ConfigError("row_loads: piece out of range");
  std::vector<i64> loads(static_cast<std::size_t>(dec.m), 0);
  for (i64 j = 0; j < dec.n; ++j) loads[dec.rows[piece][j]]++;
  return loads;
}

std::vector<i64> total_row_loads(const SketchDecomposition& dec) {
  std::vector<i64> loads(static_cast<std::size_t>(dec.m), 0);
  for (i64 i = 0; i < dec.s; ++i)
    for (i64 j = 0; j < dec.n; ++j) loads[dec.rows[i][j]]++;
  return loads;
}

double embedding_distortion_test(const SketchDecomposition& dec,
                                 const Matrix& a, i64 k, i64 trials,
                                 RandomStream& stream) {
  if (k < 1 || k > a.cols())
    throw ConfigError("embedding_distortion_test: k out of range");
  const double total = a.squaredNorm();
  double worst = 0.0;
  Matrix g(a.cols(), k);
  for (i64 t = 0; t < trials; ++t) {
    for (i64 r = 0; r < g.rows(); ++r)
      for (i64 c = 0; c < g.cols(); ++c) g(r, c) = stream.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd x =
        qr.householderQ() * Eigen::MatrixXd::Identity(a.cols(), k);
    Matrix resid = a - (a * x) * x.transpose();
    const double mass = resid.squaredNorm();
    if (mass < 1e-12 * total) continue;
    const double sketched = apply_sketch(dec, resid).squaredNorm();
    worst = std::max(worst, std::abs(sketched / mass - 1.0));
  }
  return worst;
}

Matrix pad_rows_to_multiple(const Matrix& a, i64 m) {
  if (m < 1) throw ConfigError("pad_rows_to_multiple: m must be >= 1");
  const i64 rem = a.rows() % m;
  if (rem == 0) return a;
  Matrix padded = Matrix::Zero(a.rows() + (m - rem), a.cols());
  padded.topRows(a.rows()) = a;
  return padded;
}

std::string sketch_spec_to_json(const SketchSpec& spec) {
  nlohmann::json j{
      {"n", spec.n},
      {"m", spec.m},
      {"s", spec.s},
      {"mode", spec.mode == SketchMode::kDenseRademacher ? "dense" : "sparse"},
      {"seed", spec.seed},
      {"with_replacement", spec.with_replacement},
  };
  return j.dump(2);
}

SketchSpec sketch_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sketch spec: invalid JSON: ") + e.what());
  }
  SketchSpec spec;
  try {
    spec.n = j.at("n").get<i64>();
    spec.m = j.at("m").get<i64>();
    spec.s = j.at("s").get<i64>();
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "dense")
      spec.mode = SketchMode::kDenseRademacher;
    else if (mode == "sparse")
      spec.mode = SketchMode::kSparseOsnap;
    else
      throw ConfigError("sketch spec: mode must be \"sparse\" or \"dense\"");
    spec.seed = j.at("seed").get<u64>();
    spec.with_replacement = j.value("with_replacement", false);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sketch spec: missing or mistyped field: ") +
                      e.what());
  }
  return spec;
}

}  // namespace ltm

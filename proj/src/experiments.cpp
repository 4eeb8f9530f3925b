#include "ltm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace ltm {

namespace {

using ColMajor = Eigen::MatrixXd;
using nlohmann::json;

constexpr u64 kCanonicalNanBits = 0x7ff8000000000000ull;

double quiet_nan() {
  double v;
  std::memcpy(&v, &kCanonicalNanBits, sizeof v);
  return v;
}

u64 double_bits(double v) {
  if (std::isnan(v)) return kCanonicalNanBits;
  u64 b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

u64 fnv1a(const std::string& s) {
  u64 h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Haar-distributed orthonormal columns: i.i.d. Gaussians filled column by
// column, then modified Gram-Schmidt with one re-orthogonalization pass.
ColMajor mgs_orthonormal(i64 n, i64 d, RandomStream& stream) {
  ColMajor q(n, d);
  for (i64 c = 0; c < d; ++c)
    for (i64 r = 0; r < n; ++r) q(r, c) = stream.normal();
  for (i64 c = 0; c < d; ++c) {
    auto col = q.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (i64 j = 0; j < c; ++j) col -= q.col(j).dot(col) * q.col(j);
    const double norm = col.norm();
    if (norm < 1e-9) throw InternalError("gen: degenerate random column");
    col /= norm;
  }
  return q;
}

struct LowrankFactors {
  ColMajor q;     // n x d orthonormal
  Matrix factor;  // d x d, Sigma V^T
};

LowrankFactors make_lowrank_factors(i64 n, i64 d, i64 k, RandomStream& stream) {
  LowrankFactors f;
  f.q = mgs_orthonormal(n, d, stream);
  const ColMajor v = mgs_orthonormal(d, d, stream);
  Vector sigmas(d);
  const double head = std::sqrt(static_cast<double>(n) / static_cast<double>(k));
  const double tail = 1.0 / static_cast<double>(n);
  for (i64 i = 0; i < d; ++i) sigmas(i) = i < k ? head : tail;
  f.factor = sigmas.asDiagonal() * v.transpose();
  return f;
}

void validate_synthetic(const SyntheticSpec& spec, bool lowrank) {
  if (spec.n < 1 || spec.d < 1)
    throw ConfigError("synthetic spec: need n >= 1 and d >= 1");
  if (spec.d > spec.n) throw ConfigError("synthetic spec: need d <= n");
  if (lowrank && (spec.k < 1 || spec.k > spec.d))
    throw ConfigError("synthetic spec: need 1 <= k <= d");
  if (!lowrank && spec.mu2 <= 0.0)
    throw ConfigError("synthetic spec: need mu2 > 0");
}

}  // namespace

DataMatrix gen_lowrank(const SyntheticSpec& spec) {
  if (!spec.kind.empty() && spec.kind != "lowrank-gap" && spec.kind != "lowrank")
    throw ConfigError("gen_lowrank: kind must be lowrank-gap");
  validate_synthetic(spec, true);
  RandomStream stream(derive_seed(spec.seed, StreamDomain::kData, 0));
  const LowrankFactors f = make_lowrank_factors(spec.n, spec.d, spec.k, stream);
  DataMatrix out;
  out.rows = Matrix(spec.n, spec.d);
  constexpr i64 kBlock = 8192;
  for (i64 r0 = 0; r0 < spec.n; r0 += kBlock) {
    const i64 len = std::min<i64>(kBlock, spec.n - r0);
    out.rows.middleRows(r0, len) = f.q.middleRows(r0, len) * f.factor;
  }
  out.eta = out.rows.cwiseAbs().maxCoeff();
  return out;
}

RegressionInstance gen_regression_full(const SyntheticSpec& spec) {
  if (!spec.kind.empty() && spec.kind != "regression")
    throw ConfigError("gen_regression: kind must be regression");
  validate_synthetic(spec, false);
  RandomStream stream(derive_seed(spec.seed, StreamDomain::kData, 0));
  RegressionInstance inst;
  inst.data.rows = Matrix(spec.n, spec.d);
  for (i64 r = 0; r < spec.n; ++r)
    for (i64 c = 0; c < spec.d; ++c) inst.data.rows(r, c) = stream.normal();
  inst.planted = Vector(spec.d);
  const double mu = std::sqrt(spec.mu2);
  for (i64 c = 0; c < spec.d; ++c) inst.planted(c) = mu * stream.normal();
  Vector b = inst.data.rows * inst.planted;
  inst.data.eta = std::max(inst.data.rows.cwiseAbs().maxCoeff(),
                           b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  inst.data.target = std::move(b);
  return inst;
}

DataMatrix gen_regression(const SyntheticSpec& spec) {
  return gen_regression_full(spec).data;
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_line(const std::string& line, char delim,
                                    bool collapse) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == delim) {
      std::string tok = line.substr(start, i - start);
      start = i + 1;
      if (collapse && tok.empty() && i != line.size()) continue;
      tokens.push_back(std::move(tok));
    }
  }
  if (collapse && !tokens.empty() && tokens.back().empty()) tokens.pop_back();
  return tokens;
}

bool parse_double(const std::string& tok, double* out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last;
}

i64 resolve_column(const std::vector<std::string>& header,
                   const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == name) return static_cast<i64>(i);
  throw ConfigError("ingest: unknown column name: " + name);
}

}  // namespace

IngestResult ingest_csv(const CsvDatasetConfig& cfg) {
  std::ifstream in(cfg.path);
  if (!in) throw DataError("ingest: cannot open: " + cfg.path);

  std::string line;
  std::vector<i64> feat_idx;
  i64 target_idx = -1;

  if (cfg.has_header) {
    if (!std::getline(in, line)) throw DataError("ingest: empty file");
    const auto header = split_line(line, cfg.delimiter, cfg.collapse_delimiters);
    if (!cfg.feature_names.empty()) {
      for (const auto& name : cfg.feature_names)
        feat_idx.push_back(resolve_column(header, name));
    } else {
      feat_idx = cfg.feature_indices;
    }
    if (!cfg.target_name.empty())
      target_idx = resolve_column(header, cfg.target_name);
    else
      target_idx = cfg.target_index;
  } else {
    if (!cfg.feature_names.empty() || !cfg.target_name.empty())
      throw ConfigError("ingest: column names require a header row");
    feat_idx = cfg.feature_indices;
    target_idx = cfg.target_index;
  }
  if (feat_idx.empty()) throw ConfigError("ingest: no feature columns selected");
  for (i64 idx : feat_idx)
    if (idx < 0) throw ConfigError("ingest: negative feature column index");
  const bool has_target = target_idx >= 0;
  const i64 d = static_cast<i64>(feat_idx.size());

  IngestResult out;
  std::vector<double> values;  // row-major features
  std::vector<double> targets;
  auto diagnose = [&](i64 line_no, const std::string& why) {
    out.dropped_rows++;
    if (out.diagnostics.size() < 10) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "line %lld: ", static_cast<long long>(line_no));
      out.diagnostics.push_back(buf + why);
    }
  };

  i64 line_no = cfg.has_header ? 1 : 0;
  std::vector<double> row(static_cast<std::size_t>(d) + 1);
  while (std::getline(in, line)) {
    ++line_no;
    if (cfg.max_rows > 0 && out.parsed_rows >= cfg.max_rows) break;
    if (trim(line).empty()) continue;
    const auto tokens = split_line(line, cfg.delimiter, cfg.collapse_delimiters);
    bool bad = false;
    std::string why;
    for (i64 c = 0; c <= (has_target ? d : d - 1) && !bad; ++c) {
      const i64 idx = c < d ? feat_idx[static_cast<std::size_t>(c)] : target_idx;
      if (idx >= static_cast<i64>(tokens.size())) {
        bad = true;
        why = "too few columns";
        break;
      }
      const std::string tok = trim(tokens[static_cast<std::size_t>(idx)]);
      bool missing = false;
      for (const auto& mv : cfg.missing_values)
        if (tok == mv) {
          missing = true;
          break;
        }
      double v = 0.0;
      if (missing) {
        bad = true;
        why = "missing value";
      } else if (!parse_double(tok, &v)) {
        bad = true;
        why = "non-numeric cell: " + tok;
      } else {
        row[static_cast<std::size_t>(c)] = v;
      }
    }
    if (bad) {
      if (!cfg.drop_missing) throw DataError("ingest: " + why);
      diagnose(line_no, why);
      continue;
    }
    values.insert(values.end(), row.begin(), row.begin() + d);
    if (has_target) targets.push_back(row[static_cast<std::size_t>(d)]);
    out.parsed_rows++;
  }
  if (out.parsed_rows == 0) throw DataError("ingest: no usable rows");

  const i64 n = out.parsed_rows;
  out.feature_ranges.assign(static_cast<std::size_t>(d),
                            {std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity()});
  for (i64 r = 0; r < n; ++r)
    for (i64 c = 0; c < d; ++c) {
      const double v = values[static_cast<std::size_t>(r * d + c)];
      auto& range = out.feature_ranges[static_cast<std::size_t>(c)];
      range.first = std::min(range.first, v);
      range.second = std::max(range.second, v);
    }
  out.data.rows = Matrix(n, d);
  for (i64 r = 0; r < n; ++r)
    for (i64 c = 0; c < d; ++c) {
      const auto& range = out.feature_ranges[static_cast<std::size_t>(c)];
      const double v = values[static_cast<std::size_t>(r * d + c)];
      const double span = range.second - range.first;
      out.data.rows(r, c) =
          span > 0.0 ? 2.0 * (v - range.first) / span - 1.0 : 0.0;
    }
  out.data.eta = 1.0;
  if (has_target) {
    out.target_range = {*std::min_element(targets.begin(), targets.end()),
                        *std::max_element(targets.begin(), targets.end())};
    Vector t(n);
    const double span = out.target_range.second - out.target_range.first;
    for (i64 r = 0; r < n; ++r)
      t(r) = span > 0.0
                 ? 2.0 * (targets[static_cast<std::size_t>(r)] -
                          out.target_range.first) / span - 1.0
                 : 0.0;
    out.data.target = std::move(t);
  }
  return out;
}

DataMatrix subsample_rows(const DataMatrix& data, i64 n, u64 seed) {
  if (n < 1 || n > data.n())
    throw ConfigError("subsample: need 1 <= n <= dataset rows");
  DataMatrix out;
  out.eta = data.eta;
  if (n == data.n()) {
    out.rows = data.rows;
    out.target = data.target;
    return out;
  }
  std::vector<i64> idx(static_cast<std::size_t>(data.n()));
  for (i64 i = 0; i < data.n(); ++i) idx[static_cast<std::size_t>(i)] = i;
  RandomStream stream(seed);
  for (i64 i = 0; i < n; ++i) {
    const i64 j =
        i + static_cast<i64>(stream.uniform_below(static_cast<u64>(data.n() - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(n));
  std::sort(idx.begin(), idx.end());
  out.rows = Matrix(n, data.d());
  if (data.target) {
    Vector t(n);
    for (i64 i = 0; i < n; ++i) t(i) = (*data.target)(idx[static_cast<std::size_t>(i)]);
    out.target = std::move(t);
  }
  for (i64 i = 0; i < n; ++i)
    out.rows.row(i) = data.rows.row(idx[static_cast<std::size_t>(i)]);
  return out;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double metric_psi(const Matrix& a, const Matrix& x_hat, const Matrix& x_opt) {
  if (x_hat.rows() != a.cols() || x_opt.rows() != a.cols() ||
      x_hat.cols() != x_opt.cols())
    throw ConfigError("metric_psi: shape mismatch");
  const double res_hat = (a - a * x_hat * x_hat.transpose()).squaredNorm();
  const double res_opt = (a - a * x_opt * x_opt.transpose()).squaredNorm();
  return (res_hat - res_opt) / static_cast<double>(a.rows());
}

double metric_psi_gram(const Matrix& gram, i64 n, const Matrix& x_hat,
                       const Matrix& x_opt) {
  if (x_hat.rows() != gram.rows() || x_opt.rows() != gram.rows())
    throw ConfigError("metric_psi: shape mismatch");
  // Orthonormal bases: ||A - A X X^T||_F^2 = tr(G) - tr(X^T G X).
  const double t_hat = (x_hat.transpose() * gram * x_hat).trace();
  const double t_opt = (x_opt.transpose() * gram * x_opt).trace();
  return (t_opt - t_hat) / static_cast<double>(n);
}

namespace {

double ridge_objective(const Matrix& gram, const Vector& atb, double b_sq,
                       const Vector& x, double lambda) {
  const double val = x.dot(gram * x) - 2.0 * x.dot(atb) + b_sq +
                     lambda * x.squaredNorm();
  return std::max(val, 0.0);
}

double phi_from_objectives(double num, double den) {
  if (den == 0.0) {
    if (num == 0.0) return 1.0;
    throw DataError("metric_phi: zero optimal objective with nonzero candidate");
  }
  return num / den;
}

}  // namespace

double metric_phi(const Matrix& a, const Vector& b, const Vector& x_hat,
                  const Vector& x_opt, double lambda) {
  if (a.rows() != b.size() || a.cols() != x_hat.size() ||
      a.cols() != x_opt.size())
    throw ConfigError("metric_phi: shape mismatch");
  const double num = (a * x_hat - b).squaredNorm() + lambda * x_hat.squaredNorm();
  const double den = (a * x_opt - b).squaredNorm() + lambda * x_opt.squaredNorm();
  return phi_from_objectives(num, den);
}

double metric_phi_gram(const Matrix& gram, const Vector& atb, double b_sq,
                       const Vector& x_hat, const Vector& x_opt, double lambda) {
  return phi_from_objectives(ridge_objective(gram, atb, b_sq, x_hat, lambda),
                             ridge_objective(gram, atb, b_sq, x_opt, lambda));
}

// ---------------------------------------------------------------------------
// Exact release-level samplers
// ---------------------------------------------------------------------------

void add_release_noise_gaussian(Matrix& sketch, Vector* target,
                                const std::vector<i64>& loads, double sigma2,
                                i64 s, RandomStream& stream) {
  if (static_cast<i64>(loads.size()) != sketch.rows())
    throw ConfigError("release noise: load vector shape mismatch");
  if (sigma2 < 0.0 || s < 1) throw ConfigError("release noise: bad parameters");
  for (i64 r = 0; r < sketch.rows(); ++r) {
    const double std_r =
        std::sqrt(static_cast<double>(loads[static_cast<std::size_t>(r)]) *
                  sigma2 / static_cast<double>(s));
    for (i64 c = 0; c < sketch.cols(); ++c)
      sketch(r, c) += std_r * stream.normal();
    if (target != nullptr) (*target)(r) += std_r * stream.normal();
  }
}

void add_release_noise_laplace(Matrix& sketch, Vector* target, i64 m_samples,
                               double per_sample_scale, RandomStream& stream) {
  if (m_samples < 1 || per_sample_scale < 0.0)
    throw ConfigError("release noise: bad parameters");
  auto draw = [&] {
    double sum = 0.0;
    for (i64 i = 0; i < m_samples; ++i) sum += stream.laplace(per_sample_scale);
    return sum;
  };
  for (i64 r = 0; r < sketch.rows(); ++r) {
    for (i64 c = 0; c < sketch.cols(); ++c) sketch(r, c) += draw();
    if (target != nullptr) (*target)(r) += draw();
  }
}

Matrix gram_sqrt_factor(const Matrix& gram, i64* rank_out) {
  if (gram.rows() != gram.cols())
    throw ConfigError("gram_sqrt_factor: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success)
    throw InternalError("gram_sqrt_factor: eigendecomposition failed");
  const i64 d = gram.rows();
  const double max_eig = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  const double tol = 1e-12 * max_eig;
  i64 rank = 0;
  for (i64 i = 0; i < d; ++i)
    if (eig.eigenvalues()(i) > tol) ++rank;
  Matrix r(rank, d);
  // Descending eigenvalue order for stable row layout.
  i64 row = 0;
  for (i64 i = d - 1; i >= 0 && row < rank; --i) {
    const double lam = eig.eigenvalues()(i);
    if (lam <= tol) continue;
    r.row(row++) = std::sqrt(lam) * eig.eigenvectors().col(i).transpose();
  }
  if (rank_out != nullptr) *rank_out = rank;
  return r;
}

Matrix sample_wishart(i64 dim, i64 dof, double sigma2, RandomStream& stream) {
  if (dim < 1 || dof < dim)
    throw ConfigError("wishart: need dim >= 1 and dof >= dim");
  if (sigma2 < 0.0) throw ConfigError("wishart: variance must be >= 0");
  const double sigma = std::sqrt(sigma2);
  Matrix l = Matrix::Zero(dim, dim);
  for (i64 i = 0; i < dim; ++i) {
    for (i64 j = 0; j < i; ++j) l(i, j) = sigma * stream.normal();
    const double chi2 =
        stream.gamma(static_cast<double>(dof - i) / 2.0, 2.0);
    l(i, i) = sigma * std::sqrt(chi2);
  }
  return l * l.transpose();
}

Matrix simulate_local_gram(const Matrix& r_factor, const Matrix& gram, i64 n,
                           double sigma2, RandomStream& stream) {
  if (r_factor.cols() != gram.rows() || gram.rows() != gram.cols())
    throw ConfigError("local sim: shape mismatch");
  if (sigma2 < 0.0) throw ConfigError("local sim: variance must be >= 0");
  if (sigma2 == 0.0) return gram;
  const i64 w = gram.rows();
  const i64 rank = r_factor.rows();
  if (n - rank < w)
    throw ConfigError("local sim: n too small for the exact simulation");
  const double sigma = std::sqrt(sigma2);
  Matrix noise(rank, w);
  for (i64 r = 0; r < rank; ++r)
    for (i64 c = 0; c < w; ++c) noise(r, c) = sigma * stream.normal();
  Matrix out = gram + r_factor.transpose() * noise +
               noise.transpose() * r_factor + noise.transpose() * noise +
               sample_wishart(w, n - rank, sigma2, stream);
  out = ((out + out.transpose()) * 0.5).eval();
  return out;
}

// ---------------------------------------------------------------------------
// Sweep configuration
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kKnownMechanisms{"central", "ltm-gaussian",
                                                "ltm-laplace", "local"};

void check_known_keys(const json& j, const std::vector<std::string>& known,
                      const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("config: unknown key in " + where + ": " + it.key());
  }
}

json dataset_to_json_obj(const CsvDatasetConfig& cfg) {
  json j;
  j["path"] = cfg.path;
  j["has_header"] = cfg.has_header;
  j["delimiter"] = std::string(1, cfg.delimiter);
  j["collapse_delimiters"] = cfg.collapse_delimiters;
  j["feature_names"] = cfg.feature_names;
  j["feature_indices"] = cfg.feature_indices;
  j["target_name"] = cfg.target_name;
  j["target_index"] = cfg.target_index;
  j["drop_missing"] = cfg.drop_missing;
  j["missing_values"] = cfg.missing_values;
  j["max_rows"] = cfg.max_rows;
  return j;
}

CsvDatasetConfig dataset_from_json_obj(const json& j) {
  check_known_keys(j,
                   {"path", "has_header", "delimiter", "collapse_delimiters",
                    "feature_names", "feature_indices", "target_name",
                    "target_index", "drop_missing", "missing_values",
                    "max_rows"},
                   "dataset");
  CsvDatasetConfig cfg;
  cfg.path = j.value("path", std::string());
  if (cfg.path.empty()) throw ConfigError("dataset config: path is required");
  cfg.has_header = j.value("has_header", true);
  const std::string delim = j.value("delimiter", std::string(","));
  if (delim.size() != 1)
    throw ConfigError("dataset config: delimiter must be one character");
  cfg.delimiter = delim[0];
  cfg.collapse_delimiters = j.value("collapse_delimiters", false);
  cfg.feature_names = j.value("feature_names", std::vector<std::string>());
  cfg.feature_indices = j.value("feature_indices", std::vector<i64>());
  cfg.target_name = j.value("target_name", std::string());
  cfg.target_index = j.value("target_index", i64{-1});
  cfg.drop_missing = j.value("drop_missing", true);
  cfg.missing_values =
      j.value("missing_values", std::vector<std::string>{"", "?", "NA"});
  cfg.max_rows = j.value("max_rows", i64{0});
  if (cfg.feature_names.empty() && cfg.feature_indices.empty())
    throw ConfigError("dataset config: no feature columns selected");
  return cfg;
}

}  // namespace

CsvDatasetConfig dataset_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dataset config: invalid JSON: ") + e.what());
  }
  return dataset_from_json_obj(j);
}

std::string dataset_config_to_json(const CsvDatasetConfig& cfg) {
  return dataset_to_json_obj(cfg).dump(2);
}

SweepConfig sweep_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("sweep config: expected a JSON object");
  check_known_keys(
      j,
      {"experiment", "ns", "n0", "n_ratio", "n_count", "d", "k", "lambda",
       "mu2", "epsilons", "delta", "ps", "mechanisms", "runs", "master_seed",
       "noise_scale", "alpha_s", "beta", "c_m", "c_s", "force_m", "force_s",
       "laplace_m", "t_clients", "eta_override", "threads", "dataset"},
      "sweep config");
  SweepConfig cfg;
  try {
    cfg.experiment = j.value("experiment", std::string("lowrank"));
    if (cfg.experiment == "lowrank-gap") cfg.experiment = "lowrank";
    if (j.contains("ns")) {
      if (j.contains("n0") || j.contains("n_count"))
        throw ConfigError("sweep config: give either ns or n0/n_ratio/n_count");
      cfg.ns = j.at("ns").get<std::vector<i64>>();
    } else if (j.contains("n0")) {
      const double n0 = j.at("n0").get<double>();
      const double ratio = j.value("n_ratio", std::sqrt(10.0));
      const i64 count = j.value("n_count", i64{4});
      if (n0 < 1.0 || ratio <= 1.0 || count < 1)
        throw ConfigError("sweep config: need n0 >= 1, n_ratio > 1, n_count >= 1");
      double v = n0;
      for (i64 i = 0; i < count; ++i) {
        cfg.ns.push_back(static_cast<i64>(std::llround(v)));
        v *= ratio;
      }
    }
    cfg.d = j.value("d", i64{0});
    cfg.k = j.value("k", i64{0});
    cfg.lambda = j.value("lambda", 10.0);
    if (j.contains("mu2")) {
      if (j.at("mu2").is_string()) {
        if (j.at("mu2").get<std::string>() != "n")
          throw ConfigError("sweep config: mu2 must be a number or \"n\"");
        cfg.mu2_is_n = true;
      } else {
        cfg.mu2 = j.at("mu2").get<double>();
      }
    }
    if (j.contains("epsilons"))
      cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
    cfg.delta = j.value("delta", 0.01);
    if (j.contains("ps")) cfg.ps = j.at("ps").get<std::vector<double>>();
    if (j.contains("mechanisms"))
      cfg.mechanisms = j.at("mechanisms").get<std::vector<std::string>>();
    cfg.runs = j.value("runs", i64{20});
    cfg.master_seed = j.value("master_seed", kDefaultMasterSeed);
    cfg.noise_scale = j.value("noise_scale", 1.0);
    cfg.alpha_s = j.value("alpha_s", 0.5);
    cfg.beta = j.value("beta", 0.01);
    cfg.c_m = j.value("c_m", 1.0);
    cfg.c_s = j.value("c_s", 1.0);
    cfg.force_m = j.value("force_m", i64{0});
    cfg.force_s = j.value("force_s", i64{0});
    cfg.laplace_m = j.value("laplace_m", i64{25});
    cfg.t_clients = j.value("t_clients", i64{0});
    cfg.eta_override = j.value("eta_override", 0.0);
    cfg.threads = j.value("threads", i64{0});
    if (j.contains("dataset")) cfg.dataset = dataset_from_json_obj(j.at("dataset"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
  return cfg;
}

std::string sweep_config_to_json(const SweepConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["ns"] = cfg.ns;
  j["d"] = cfg.d;
  j["k"] = cfg.k;
  j["lambda"] = cfg.lambda;
  if (cfg.mu2_is_n)
    j["mu2"] = "n";
  else
    j["mu2"] = cfg.mu2;
  j["epsilons"] = cfg.epsilons;
  j["delta"] = cfg.delta;
  j["ps"] = cfg.ps;
  j["mechanisms"] = cfg.mechanisms;
  j["runs"] = cfg.runs;
  j["master_seed"] = cfg.master_seed;
  j["noise_scale"] = cfg.noise_scale;
  j["alpha_s"] = cfg.alpha_s;
  j["beta"] = cfg.beta;
  j["c_m"] = cfg.c_m;
  j["c_s"] = cfg.c_s;
  j["force_m"] = cfg.force_m;
  j["force_s"] = cfg.force_s;
  j["laplace_m"] = cfg.laplace_m;
  j["t_clients"] = cfg.t_clients;
  j["eta_override"] = cfg.eta_override;
  j["threads"] = cfg.threads;
  if (cfg.dataset) j["dataset"] = dataset_to_json_obj(*cfg.dataset);
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

namespace {

struct SweepData {
  Matrix basis;   // n x w row-major; A (or [A b]) itself, or orthonormal Q
  Matrix factor;  // d x d spectrum factor; empty => basis is materialized
  Matrix gram;    // exact feature Gram
  Vector atb;     // regression
  double b_sq = 0.0;
  double zeta = 0.0;
  double eta = 1.0;
  double rho = 0.0;
  Matrix x_opt_basis;  // lowrank
  double opt_trace = 0.0;
  Vector x_opt;  // regression
  double opt_obj = 0.0;
  Matrix r_feat;       // R^T R = gram
  Matrix r_joint;      // R^T R = gram_joint
  Matrix gram_joint;   // (d+1)^2, regression
  i64 n = 0;
  i64 d = 0;
  bool regression = false;
};

struct CellSpec {
  std::string mechanism;
  double p = 0.0;
  double epsilon = 0.0;
  i64 n = 0;
  std::size_t n_index = 0;
  std::string metric;
  u64 cell_seed = 0;
};

void validate_sweep(const SweepConfig& cfg) {
  if (cfg.experiment != "lowrank" && cfg.experiment != "regression")
    throw ConfigError("sweep: experiment must be lowrank or regression");
  if (cfg.ns.empty()) throw ConfigError("sweep: empty n grid");
  for (i64 n : cfg.ns)
    if (n < 2) throw ConfigError("sweep: every n must be >= 2");
  if (cfg.runs < 1) throw ConfigError("sweep: runs must be >= 1");
  if (cfg.epsilons.empty()) throw ConfigError("sweep: empty epsilon grid");
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) throw ConfigError("sweep: epsilon must be > 0");
  if (cfg.mechanisms.empty()) throw ConfigError("sweep: no mechanisms");
  for (const auto& m : cfg.mechanisms)
    if (std::find(kKnownMechanisms.begin(), kKnownMechanisms.end(), m) ==
        kKnownMechanisms.end())
      throw ConfigError("sweep: unknown mechanism: " + m);
  for (double p : cfg.ps)
    if (p < 0.0 || p > 1.0) throw ConfigError("sweep: p must be in [0, 1]");
  if (cfg.ps.empty() &&
      std::find(cfg.mechanisms.begin(), cfg.mechanisms.end(), "ltm-gaussian") !=
          cfg.mechanisms.end())
    throw ConfigError("sweep: empty p grid with ltm-gaussian requested");
  if (!(cfg.noise_scale >= 0.0))
    throw ConfigError("sweep: noise_scale must be >= 0");
  if (cfg.experiment == "regression") {
    if (!(cfg.lambda > 0.0)) throw ConfigError("sweep: lambda must be > 0");
    if (!cfg.mu2_is_n && !(cfg.mu2 > 0.0))
      throw ConfigError("sweep: mu2 must be > 0");
  }
  if (cfg.force_m < 0 || cfg.force_s < 0 || cfg.t_clients < 0 ||
      cfg.threads < 0 || cfg.eta_override < 0.0)
    throw ConfigError("sweep: negative parameter");
  if (!cfg.dataset && cfg.d < 1)
    throw ConfigError("sweep: d must be >= 1 for synthetic data");
  if (std::find(cfg.mechanisms.begin(), cfg.mechanisms.end(), "ltm-laplace") !=
      cfg.mechanisms.end()) {
    if (cfg.laplace_m < 1)
      throw ConfigError("sweep: laplace_m must be >= 1");
    for (i64 n : cfg.ns) {
      if (n % cfg.laplace_m != 0)
        throw ConfigError(
            "sweep: the pure-DP Laplace arm uses a dense sketch, so every n "
            "must be a multiple of laplace_m");
      if (n / cfg.laplace_m <= cfg.t_clients)
        throw ConfigError("sweep: laplace arm needs n / laplace_m > t_clients");
    }
  }
}

u64 dataset_seed_for(const SweepConfig& cfg, i64 n, i64 k) {
  const double mu2_eff =
      cfg.mu2_is_n ? static_cast<double>(n) : cfg.mu2;
  char buf[256];
  std::snprintf(buf, sizeof buf, "data|%s|%lld|%lld|%lld|%016llx|%s",
                cfg.experiment.c_str(), static_cast<long long>(n),
                static_cast<long long>(cfg.d),
                static_cast<long long>(cfg.experiment == "lowrank" ? k : 0),
                static_cast<unsigned long long>(double_bits(mu2_eff)),
                cfg.dataset ? cfg.dataset->path.c_str() : "");
  return derive_seed(cfg.master_seed, StreamDomain::kData, fnv1a(buf));
}

u64 cell_seed_for(const SweepConfig& cfg, const CellSpec& cell, i64 k, i64 m,
                  i64 s) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "cell|%s|%s|%lld|%016llx|%016llx|%lld|%lld|%lld|%lld",
                cell.mechanism.c_str(), cell.metric.c_str(),
                static_cast<long long>(cell.n),
                static_cast<unsigned long long>(double_bits(cell.epsilon)),
                static_cast<unsigned long long>(double_bits(cell.p)),
                static_cast<long long>(k), static_cast<long long>(cfg.d),
                static_cast<long long>(m), static_cast<long long>(s));
  return derive_seed(cfg.master_seed, StreamDomain::kExperiment, fnv1a(buf));
}

// Feature stats (max |entry|, max row norm) of the represented matrix.
void feature_stats(const Matrix& basis, const Matrix& factor, i64 d,
                   double* eta, double* rho) {
  *eta = 0.0;
  *rho = 0.0;
  constexpr i64 kBlock = 8192;
  if (factor.size() > 0) {
    for (i64 r0 = 0; r0 < basis.rows(); r0 += kBlock) {
      const i64 len = std::min<i64>(kBlock, basis.rows() - r0);
      const Matrix block = basis.middleRows(r0, len) * factor;
      *eta = std::max(*eta, block.cwiseAbs().maxCoeff());
      for (i64 r = 0; r < len; ++r)
        *rho = std::max(*rho, block.row(r).norm());
    }
  } else {
    for (i64 r = 0; r < basis.rows(); ++r) {
      const auto row = basis.row(r).head(d);
      *eta = std::max(*eta, row.cwiseAbs().maxCoeff());
      *rho = std::max(*rho, row.norm());
    }
  }
}

SweepData build_sweep_data(const SweepConfig& cfg, i64 n, i64 k,
                           const IngestResult* ingested) {
  SweepData data;
  data.n = n;
  data.d = cfg.d;
  data.regression = cfg.experiment == "regression";
  const u64 seed = dataset_seed_for(cfg, n, k);

  if (ingested != nullptr) {
    DataMatrix sub = subsample_rows(ingested->data, n, seed);
    if (data.regression) {
      if (!sub.target) throw ConfigError("sweep: dataset has no target column");
      data.basis = Matrix(n, cfg.d + 1);
      data.basis.leftCols(cfg.d) = sub.rows;
      data.basis.col(cfg.d) = *sub.target;
    } else {
      data.basis = std::move(sub.rows);
    }
  } else if (data.regression) {
    SyntheticSpec spec;
    spec.kind = "regression";
    spec.n = n;
    spec.d = cfg.d;
    spec.mu2 = cfg.mu2_is_n ? static_cast<double>(n) : cfg.mu2;
    spec.seed = seed;
    RegressionInstance inst = gen_regression_full(spec);
    data.basis = Matrix(n, cfg.d + 1);
    data.basis.leftCols(cfg.d) = inst.data.rows;
    data.basis.col(cfg.d) = *inst.data.target;
  } else {
    RandomStream stream(derive_seed(seed, StreamDomain::kData, 0));
    LowrankFactors f = make_lowrank_factors(n, cfg.d, k, stream);
    data.basis = f.q;  // column-major to row-major copy
    data.factor = std::move(f.factor);
  }

  feature_stats(data.basis, data.factor, cfg.d, &data.eta, &data.rho);

  if (data.factor.size() > 0) {
    data.gram = data.factor.transpose() * data.factor;
  } else if (data.regression) {
    data.gram_joint = data.basis.transpose() * data.basis;
    data.gram_joint = ((data.gram_joint + data.gram_joint.transpose()) * 0.5).eval();
    data.gram = data.gram_joint.topLeftCorner(cfg.d, cfg.d);
    data.atb = data.gram_joint.col(cfg.d).head(cfg.d);
    data.b_sq = data.gram_joint(cfg.d, cfg.d);
    data.zeta = data.basis.col(cfg.d).cwiseAbs().maxCoeff();
  } else {
    data.gram = data.basis.transpose() * data.basis;
  }
  data.gram = ((data.gram + data.gram.transpose()) * 0.5).eval();

  if (data.regression) {
    data.x_opt = ridge_solve_gram(data.gram, data.atb, cfg.lambda).x;
    data.opt_obj =
        ridge_objective(data.gram, data.atb, data.b_sq, data.x_opt, cfg.lambda);
    data.r_joint = gram_sqrt_factor(data.gram_joint);
  } else {
    data.x_opt_basis = top_eigenvectors(data.gram, k);
    data.opt_trace =
        (data.x_opt_basis.transpose() * data.gram * data.x_opt_basis).trace();
    data.r_feat = gram_sqrt_factor(data.gram);
  }
  return data;
}

double run_cell_once(const SweepConfig& cfg, const SweepData& data,
                     const CellSpec& cell, i64 k, i64 m, i64 s,
                     double sigma2_ltm, u64 run_seed) {
  const PrivacyBudget budget{cell.epsilon, cfg.delta};
  const double kappa = cfg.noise_scale;

  if (cell.mechanism == "central") {
    if (!data.regression) {
      const double std_dev =
          std::sqrt(kappa) * static_cast<double>(data.n) * data.rho * data.rho *
          modsulq_beta(data.n, data.d, budget);
      const Matrix noisy =
          modsulq_gram(data.gram, data.n, data.rho, budget, run_seed, std_dev);
      const Matrix x_hat = top_eigenvectors(noisy, k);
      return std::max(
          (data.opt_trace - (x_hat.transpose() * data.gram * x_hat).trace()) /
              static_cast<double>(data.n),
          0.0);
    }
    const auto stds = ssp_noise_stds(data.rho, data.zeta, budget);
    const SspSolution ssp = ssp_from_stats(
        data.gram, data.atb, data.rho, data.zeta, cfg.lambda, budget, run_seed,
        std::sqrt(kappa) * stds.first, std::sqrt(kappa) * stds.second);
    return std::max(metric_phi_gram(data.gram, data.atb, data.b_sq, ssp.sol.x,
                                    data.x_opt, cfg.lambda),
                    1.0);
  }

  if (cell.mechanism == "local") {
    const double sigma2_local =
        kappa * interpolated_sigma(sigma2_ltm, data.n, 0.0);
    RandomStream stream(run_seed, StreamDomain::kAnalysis, 2);
    if (!data.regression) {
      const Matrix noisy = simulate_local_gram(data.r_feat, data.gram, data.n,
                                               sigma2_local, stream);
      const Matrix x_hat = top_eigenvectors(noisy, k);
      return std::max(
          (data.opt_trace - (x_hat.transpose() * data.gram * x_hat).trace()) /
              static_cast<double>(data.n),
          0.0);
    }
    const Matrix noisy = simulate_local_gram(data.r_joint, data.gram_joint,
                                             data.n, sigma2_local, stream);
    const Matrix gram_hat = noisy.topLeftCorner(data.d, data.d);
    const Vector q_hat = noisy.col(data.d).head(data.d);
    const Vector x_hat = ridge_solve_gram(gram_hat, q_hat, cfg.lambda).x;
    return std::max(metric_phi_gram(data.gram, data.atb, data.b_sq, x_hat,
                                    data.x_opt, cfg.lambda),
                    1.0);
  }

  // Sketch-based mechanisms. The Gaussian arm uses the sparse OSNAP sketch;
  // the pure-DP Laplace arm uses a dense sketch of width laplace_m, the only
  // shape the gamma-difference calibration covers.
  const bool laplace = cell.mechanism == "ltm-laplace";
  SketchSpec spec;
  spec.n = data.n;
  spec.m = laplace ? cfg.laplace_m : m;
  spec.s = laplace ? cfg.laplace_m : s;
  spec.mode = laplace ? SketchMode::kDenseRademacher : SketchMode::kSparseOsnap;
  spec.seed = derive_seed(run_seed, StreamDomain::kSketch, 0);
  const SketchDecomposition dec = sample_sketch(spec);
  Matrix y = apply_sketch(dec, data.basis);
  if (data.factor.size() > 0) y = (y * data.factor).eval();

  RandomStream stream(run_seed, StreamDomain::kClientNoise, 0);
  if (cell.mechanism == "ltm-gaussian") {
    const double sigma2_p =
        kappa * interpolated_sigma(sigma2_ltm, data.n, cell.p);
    const std::vector<i64> loads = total_row_loads(dec);
    add_release_noise_gaussian(y, nullptr, loads, sigma2_p, s, stream);
  } else {
    // Released entry = (1/sqrt(m_d)) * sum over the m_d decomposition pieces;
    // each piece row aggregates its clients' gamma differences into one
    // Laplace(0, b) draw, so the release noise is a sum of m_d Laplace
    // samples. noise_scale multiplies the variance, hence sqrt on the scale.
    LtmParams lap_params;
    lap_params.n = data.n;
    lap_params.m = cfg.laplace_m;
    lap_params.d = data.regression ? data.d + 1 : data.d;
    lap_params.s = cfg.laplace_m;
    lap_params.t_clients = cfg.t_clients;
    lap_params.eta = cfg.eta_override > 0.0 ? cfg.eta_override : data.eta;
    const double b = gamma_params(budget, lap_params).scale;
    add_release_noise_laplace(
        y, nullptr, cfg.laplace_m,
        b * std::sqrt(kappa / static_cast<double>(cfg.laplace_m)), stream);
  }

  if (!data.regression) {
    const Matrix x_hat = lowrank_project(y, k).basis;
    return std::max(
        (data.opt_trace - (x_hat.transpose() * data.gram * x_hat).trace()) /
            static_cast<double>(data.n),
        0.0);
  }
  const Matrix y_features = y.leftCols(data.d);
  const Vector y_target = y.col(data.d);
  const Vector x_hat = ridge_solve(y_features, y_target, cfg.lambda).x;
  return std::max(metric_phi_gram(data.gram, data.atb, data.b_sq, x_hat,
                                  data.x_opt, cfg.lambda),
                  1.0);
}

void parallel_cells(std::size_t count, i64 threads_cfg,
                    const std::function<void(std::size_t)>& fn) {
  i64 hw = static_cast<i64>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  i64 threads = threads_cfg > 0 ? threads_cfg : hw;
  threads = std::min<i64>(threads, static_cast<i64>(count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (i64 t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepConfig& cfg_in) {
  SweepConfig cfg = cfg_in;
  validate_sweep(cfg);

  IngestResult ingested;
  const IngestResult* ingested_ptr = nullptr;
  if (cfg.dataset) {
    ingested = ingest_csv(*cfg.dataset);
    const i64 data_d = ingested.data.d();
    if (cfg.d == 0)
      cfg.d = data_d;
    else if (cfg.d != data_d)
      throw ConfigError("sweep: config d does not match dataset feature count");
    for (i64 n : cfg.ns)
      if (n > ingested.data.n())
        throw ConfigError("sweep: n exceeds dataset rows after ingestion");
    ingested_ptr = &ingested;
  }
  const i64 k = cfg.k == 0 ? cfg.d : cfg.k;
  if (k < 1 || k > cfg.d) throw ConfigError("sweep: need 1 <= k <= d");
  for (i64 n : cfg.ns)
    if (n <= cfg.d + 1)
      throw ConfigError("sweep: every n must exceed d + 1");
  if (cfg.experiment == "lowrank" && cfg.laplace_m < k &&
      std::find(cfg.mechanisms.begin(), cfg.mechanisms.end(), "ltm-laplace") !=
          cfg.mechanisms.end())
    throw ConfigError("sweep: laplace_m must be >= k for rank-k recovery");

  OsnapParams osnap;
  osnap.k = k;
  osnap.alpha_s = cfg.alpha_s;
  osnap.beta = cfg.beta;
  osnap.c_m = cfg.c_m;
  osnap.c_s = cfg.c_s;
  SketchDims dims = cohen_params(osnap);
  if (cfg.force_m > 0) dims.m = cfg.force_m;
  if (cfg.force_s > 0) dims.s = cfg.force_s;
  if (dims.s > dims.m)
    throw ConfigError("sweep: sketch sparsity exceeds row count");

  const std::string metric = cfg.experiment == "lowrank" ? "psi" : "phi";
  std::vector<CellSpec> cells;
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    for (const auto& mech : cfg.mechanisms) {
      for (double eps : cfg.epsilons) {
        std::vector<double> p_values;
        if (mech == "ltm-gaussian")
          p_values = cfg.ps;
        else if (mech == "local")
          p_values = {0.0};
        else
          p_values = {quiet_nan()};
        for (double p : p_values) {
          CellSpec cell;
          cell.mechanism = mech;
          cell.p = p;
          cell.epsilon = eps;
          cell.n = cfg.ns[ni];
          cell.n_index = ni;
          cell.metric = metric;
          cell.cell_seed = cell_seed_for(cfg, cell, k, dims.m, dims.s);
          cells.push_back(std::move(cell));
        }
      }
    }
  }

  std::vector<ResultRow> rows(cells.size());
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const SweepData data = build_sweep_data(cfg, cfg.ns[ni], k, ingested_ptr);
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].n_index == ni) group.push_back(i);

    parallel_cells(group.size(), cfg.threads, [&](std::size_t gi) {
      const CellSpec& cell = cells[group[gi]];
      ResultRow row;
      row.mechanism = cell.mechanism;
      row.p = cell.p;
      row.epsilon = cell.epsilon;
      row.n = cell.n;
      row.metric = cell.metric;
      row.runs = cfg.runs;
      row.seed = cell.cell_seed;

      const i64 width = data.regression ? cfg.d + 1 : cfg.d;
      LtmParams params;
      params.n = data.n;
      params.m = dims.m;
      params.d = width;
      params.s = dims.s;
      params.t_clients = cfg.t_clients;
      params.eta = cfg.eta_override > 0.0 ? cfg.eta_override : data.eta;
      const PrivacyBudget budget{cell.epsilon, cfg.delta};

      double sigma2_ltm = 0.0;
      const bool needs_ltm_sigma =
          cell.mechanism == "ltm-gaussian" || cell.mechanism == "local";
      if (needs_ltm_sigma) {
        bool infeasible = zero_output_regime(budget, params);
        if (!infeasible) {
          try {
            sigma2_ltm = gaussian_sigma2(budget, params);
          } catch (const ThresholdRegime&) {
            infeasible = true;
          }
        }
        if (infeasible) {
          row.status = "threshold_regime";
          row.mean = quiet_nan();
          row.std_dev = quiet_nan();
          rows[group[gi]] = std::move(row);
          return;
        }
      }

      double sum = 0.0, sum_sq = 0.0;
      for (i64 r = 0; r < cfg.runs; ++r) {
        const u64 run_seed =
            derive_seed(cell.cell_seed, StreamDomain::kExperiment,
                        static_cast<u64>(r) + 1);
        const double value = run_cell_once(cfg, data, cell, k, dims.m, dims.s,
                                           sigma2_ltm, run_seed);
        sum += value;
        sum_sq += value * value;
      }
      const double runs_d = static_cast<double>(cfg.runs);
      row.mean = sum / runs_d;
      row.std_dev =
          cfg.runs > 1
              ? std::sqrt(std::max(
                    (sum_sq - sum * sum / runs_d) / (runs_d - 1.0), 0.0))
              : 0.0;
      rows[group[gi]] = std::move(row);
    });
  }

  sort_rows_canonical(rows);
  return rows;
}

// ---------------------------------------------------------------------------
// Result output
// ---------------------------------------------------------------------------

void sort_rows_canonical(std::vector<ResultRow>& rows) {
  auto double_less = [](double a, double b) {
    const bool an = std::isnan(a), bn = std::isnan(b);
    if (an != bn) return an;  // NaN sorts first
    if (an && bn) return false;
    return a < b;
  };
  std::sort(rows.begin(), rows.end(),
            [&](const ResultRow& a, const ResultRow& b) {
              if (a.mechanism != b.mechanism) return a.mechanism < b.mechanism;
              if (double_bits(a.p) != double_bits(b.p))
                return double_less(a.p, b.p);
              if (a.epsilon != b.epsilon)
                return double_less(a.epsilon, b.epsilon);
              if (a.n != b.n) return a.n < b.n;
              if (a.metric != b.metric) return a.metric < b.metric;
              return a.seed < b.seed;
            });
}

std::string results_csv_text(std::vector<ResultRow> rows) {
  sort_rows_canonical(rows);
  std::string out = "mechanism,p,epsilon,n,metric,mean,std,runs,seed,status\n";
  char buf[512];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%lld,%s,%.17g,%.17g,%lld,%llu,%s\n",
                  row.mechanism.c_str(), row.p, row.epsilon,
                  static_cast<long long>(row.n), row.metric.c_str(), row.mean,
                  row.std_dev, static_cast<long long>(row.runs),
                  static_cast<unsigned long long>(row.seed),
                  row.status.c_str());
    out += buf;
  }
  return out;
}

void write_results_csv(const std::string& path, std::vector<ResultRow> rows) {
  const std::string text = results_csv_text(std::move(rows));
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw DataError("results: cannot open for write: " + path);
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok)
    throw DataError("results: write failed: " + path);
}

void write_manifest(const std::string& path, const SweepConfig& cfg) {
  const std::string text = sweep_config_to_json(cfg) + "\n";
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw DataError("manifest: cannot open for write: " + path);
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok)
    throw DataError("manifest: write failed: " + path);
}

}  // namespace ltm

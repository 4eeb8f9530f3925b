#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ltm/analysis.hpp"
#include "ltm/data.hpp"
#include "ltm/noise.hpp"
#include "ltm/sketch.hpp"

namespace ltm {

// Documented fixed default so seedless runs are reproducible.
inline constexpr u64 kDefaultMasterSeed = 271828;

struct SyntheticSpec {
  std::string kind;  // "lowrank-gap" | "regression"
  i64 n = 0;
  i64 d = 0;
  i64 k = 0;         // spectral plateau width (lowrank-gap)
  double mu2 = 1.0;  // planted-coefficient prior variance (regression)
  u64 seed = 0;
};

// A = Q Sigma V^T with Haar-distributed orthonormal factors and the gapped
// spectrum: k values sqrt(n/k), the remaining d-k values 1/n. Consequently
// ||A||_F^2 = n + (d-k)/n^2 and the optimal rank-k residual is (d-k)/n^2.
DataMatrix gen_lowrank(const SyntheticSpec& spec);

struct RegressionInstance {
  DataMatrix data;  // i.i.d. N(0,1) features, target = features * planted
  Vector planted;   // x* ~ N(0, mu2) per coordinate
};

RegressionInstance gen_regression_full(const SyntheticSpec& spec);
DataMatrix gen_regression(const SyntheticSpec& spec);

struct CsvDatasetConfig {
  std::string path;
  bool has_header = true;
  char delimiter = ',';
  // Treat runs of consecutive delimiters as one (whitespace-style tables).
  bool collapse_delimiters = false;
  std::vector<std::string> feature_names;  // with header
  std::vector<i64> feature_indices;        // without header
  std::string target_name;                 // empty = no target
  i64 target_index = -1;
  bool drop_missing = true;  // false: missing/unparseable cells are DataError
  std::vector<std::string> missing_values{"", "?", "NA"};
  i64 max_rows = 0;  // 0 = unlimited
};

struct IngestResult {
  DataMatrix data;  // features affinely mapped to [-1, 1] per column; eta = 1
  std::vector<std::pair<double, double>> feature_ranges;  // pre-map min/max
  std::pair<double, double> target_range{0.0, 0.0};
  i64 parsed_rows = 0;
  i64 dropped_rows = 0;
  std::vector<std::string> diagnostics;  // first few drop reasons
};

IngestResult ingest_csv(const CsvDatasetConfig& cfg);
CsvDatasetConfig dataset_config_from_json(const std::string& text);
std::string dataset_config_to_json(const CsvDatasetConfig& cfg);

// Uniform without-replacement row subsample, deterministic in seed.
DataMatrix subsample_rows(const DataMatrix& data, i64 n, u64 seed);

// psi = (||A - A X'X'^T||_F^2 - ||A - A X*X*^T||_F^2) / n, bases orthonormal.
double metric_psi(const Matrix& a, const Matrix& x_hat, const Matrix& x_opt);
double metric_psi_gram(const Matrix& gram, i64 n, const Matrix& x_hat,
                       const Matrix& x_opt);

// phi = (||A x' - b||^2 + lambda ||x'||^2) / (same at x*); 0/0 defined as 1.
double metric_phi(const Matrix& a, const Vector& b, const Vector& x_hat,
                  const Vector& x_opt, double lambda);
double metric_phi_gram(const Matrix& gram, const Vector& atb, double b_sq,
                       const Vector& x_hat, const Vector& x_opt, double lambda);

// ---------------------------------------------------------------------------
// Sweep harness
// ---------------------------------------------------------------------------

// Mechanism tags: "central" (Gram perturbation for psi, statistics
// perturbation for phi), "ltm-gaussian" (sketch pipeline, per-client variance
// interpolated at exponent p), "ltm-laplace" (sketch pipeline with the
// aggregated-Laplace recipe), "local" (per-client noise at the p=0 anchor,
// no sketch). All simulated at release level with the exact aggregate
// distribution of the client-level pipeline.
struct SweepConfig {
  std::string experiment = "lowrank";  // "lowrank" | "regression"
  std::vector<i64> ns;
  i64 d = 0;
  i64 k = 0;  // lowrank rank / sketch embedding dimension (0 = d)
  double lambda = 10.0;
  double mu2 = 1.0;
  bool mu2_is_n = false;  // JSON "mu2": "n" scales the prior with n
  std::vector<double> epsilons{1.0};
  double delta = 0.01;
  std::vector<double> ps{1.0};  // ltm-gaussian interpolation exponents
  std::vector<std::string> mechanisms{"central", "ltm-gaussian", "ltm-laplace",
                                      "local"};
  i64 runs = 20;
  u64 master_seed = kDefaultMasterSeed;
  // Multiplies every mechanism's noise VARIANCE (1.0 = the faithful
  // calibrations). The utility-vs-n orderings are scale-consistent because
  // all mechanisms share the factor.
  double noise_scale = 1.0;
  double alpha_s = 0.5;
  double beta = 0.01;
  double c_m = 1.0;
  double c_s = 1.0;
  i64 force_m = 0;  // 0 = derive from the embedding-dimension formula
  i64 force_s = 0;
  // Dense-sketch width for the pure-DP Laplace arm. The gamma-difference
  // calibration only exists for dense sketches, so this arm carries its own
  // (small) row count; every n in the grid must be a multiple of it.
  i64 laplace_m = 25;
  i64 t_clients = 0;
  double eta_override = 0.0;  // 0 = measured from the feature matrix
  i64 threads = 0;            // 0 = hardware concurrency
  std::optional<CsvDatasetConfig> dataset;  // subsampled per grid point
};

SweepConfig sweep_config_from_json(const std::string& text);
std::string sweep_config_to_json(const SweepConfig& cfg);  // manifest body

struct ResultRow {
  std::string mechanism;
  double p = 0.0;  // NaN when the mechanism has no interpolation exponent
  double epsilon = 0.0;
  i64 n = 0;
  std::string metric;  // "psi" | "phi" | "freq_err"
  double mean = 0.0;
  double std_dev = 0.0;
  i64 runs = 0;
  u64 seed = 0;               // per-cell derived seed
  std::string status = "ok";  // "ok" | "threshold_regime"
};

// Every requested (mechanism, p, epsilon, n) cell appears exactly once;
// infeasible calibrations become status = "threshold_regime" rows with NaN
// statistics. Deterministic in (config, master_seed) regardless of threads.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg);

void sort_rows_canonical(std::vector<ResultRow>& rows);
std::string results_csv_text(std::vector<ResultRow> rows);
void write_results_csv(const std::string& path, std::vector<ResultRow> rows);
void write_manifest(const std::string& path, const SweepConfig& cfg);

// ---------------------------------------------------------------------------
// Exact release-level samplers (exposed for equivalence tests)
// ---------------------------------------------------------------------------

// Adds the sketch-propagated client noise to a released sketch: row r of
// (1/sqrt(s)) S E has i.i.d. N(0, total_load(r) sigma2 / s) entries (fresh
// per-piece client noise makes cross-row covariances vanish exactly).
// Row-major consumption; `target` rides along as a final column when given.
void add_release_noise_gaussian(Matrix& sketch, Vector* target,
                                const std::vector<i64>& loads, double sigma2,
                                i64 s, RandomStream& stream);

// The aggregated-Laplace release recipe: each released entry receives the sum
// of m_samples i.i.d. Laplace(0, per_sample_scale) draws.
void add_release_noise_laplace(Matrix& sketch, Vector* target, i64 m_samples,
                               double per_sample_scale, RandomStream& stream);

// R with R^T R = gram (rank rows, via eigendecomposition with relative
// threshold 1e-12); rank_out receives the detected rank.
Matrix gram_sqrt_factor(const Matrix& gram, i64* rank_out = nullptr);

// Wishart(sigma2 * I_dim, dof) via the Bartlett construction. Per row i
// (0-based): subdiagonal N(0, sigma2) entries left to right, then the
// diagonal sqrt(sigma2 * chi2_{dof-i}).
Matrix sample_wishart(i64 dim, i64 dof, double sigma2, RandomStream& stream);

// Exact Gram of A + E (E i.i.d. N(0, sigma2)) without materializing either:
// gram + R^T W + W^T R + W^T W + Wishart(n - rank(R)), with A = Q R. W is
// consumed row-major before the Wishart draw. sigma2 = 0 returns gram.
Matrix simulate_local_gram(const Matrix& r_factor, const Matrix& gram, i64 n,
                           double sigma2, RandomStream& stream);

}  // namespace ltm

#include "ltm/analysis.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace ltm {

namespace {

// Largest-magnitude entry (first index on ties) made positive, per column.
void canonical_sign(Matrix& basis) {
  for (i64 c = 0; c < basis.cols(); ++c) {
    i64 arg = 0;
    double best = -1.0;
    for (i64 r = 0; r < basis.rows(); ++r) {
      const double mag = std::abs(basis(r, c));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (basis(arg, c) < 0.0) basis.col(c) = -basis.col(c);
  }
}

}  // namespace

RankKProjection lowrank_project(const Matrix& y, i64 k) {
  if (k < 1 || k > std::min(y.rows(), y.cols()))
    throw ConfigError("lowrank_project: k must be in [1, min(rows, cols)]");
  Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinV);
  RankKProjection proj;
  proj.basis = svd.matrixV().leftCols(k);
  canonical_sign(proj.basis);
  return proj;
}

Matrix top_eigenvectors(const Matrix& sym, i64 k) {
  if (sym.rows() != sym.cols())
    throw ConfigError("top_eigenvectors: matrix must be square");
  if (k < 1 || k > sym.rows())
    throw ConfigError("top_eigenvectors: k must be in [1, d]");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw InternalError("top_eigenvectors: eigendecomposition failed");
  const i64 d = sym.rows();
  Matrix basis(d, k);
  // Eigen returns ascending eigenvalues; take the top k in descending order.
  for (i64 c = 0; c < k; ++c) basis.col(c) = eig.eigenvectors().col(d - 1 - c);
  canonical_sign(basis);
  return basis;
}

RidgeSolution ridge_solve_gram(const Matrix& gram, const Vector& q,
                               double lambda) {
  if (lambda <= 0.0) throw ConfigError("ridge_solve: lambda must be > 0");
  if (gram.rows() != gram.cols() || gram.rows() != q.size())
    throw ConfigError("ridge_solve: shape mismatch");
  Matrix regularized = gram;
  regularized.diagonal().array() += lambda;
  Eigen::LDLT<Matrix> ldlt(regularized);
  Vector x = ldlt.solve(q);
  x += ldlt.solve(q - regularized * x);
  const double residual = (regularized * x - q).norm();
  if (residual > 1e-8 * q.norm())
    throw InternalError("ridge_solve: normal-equations residual too large");
  return RidgeSolution{std::move(x), lambda};
}

RidgeSolution ridge_solve(const Matrix& y_features, const Vector& y_target,
                          double lambda) {
  if (y_features.rows() != y_target.size())
    throw ConfigError("ridge_solve: feature/target row mismatch");
  const Matrix gram = y_features.transpose() * y_features;
  const Vector q = y_features.transpose() * y_target;
  return ridge_solve_gram(gram, q, lambda);
}

double modsulq_beta(i64 n, i64 d, const PrivacyBudget& budget) {
  if (n < 1 || d < 1)
    throw ConfigError("modsulq_beta: need n >= 1 and d >= 1");
  if (budget.epsilon <= 0.0 || budget.delta <= 0.0 || budget.delta >= 1.0)
    throw ConfigError("modsulq_beta: need eps > 0 and delta in (0, 1)");
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  const double log_arg =
      (dd * dd + dd) / (2.0 * budget.delta * std::sqrt(2.0 * M_PI));
  if (log_arg <= 1.0)
    throw ConfigError("modsulq_beta: delta too large for this dimension");
  return (dd + 1.0) / (nn * budget.epsilon) * std::sqrt(2.0 * std::log(log_arg)) +
         1.0 / (nn * std::sqrt(budget.epsilon));
}

Matrix modsulq_gram(const Matrix& gram, i64 n, double rho,
                    const PrivacyBudget& budget, u64 seed,
                    double noise_std_override) {
  if (gram.rows() != gram.cols())
    throw ConfigError("modsulq_gram: matrix must be square");
  const i64 d = gram.rows();
  double std_dev = noise_std_override;
  if (std_dev < 0.0) {
    if (rho <= 0.0) throw ConfigError("modsulq_gram: rho must be > 0");
    std_dev = static_cast<double>(n) * rho * rho * modsulq_beta(n, d, budget);
  }
  RandomStream stream(derive_seed(seed, StreamDomain::kAnalysis, 0));
  Matrix noisy = gram;
  for (i64 r = 0; r < d; ++r)
    for (i64 c = r; c < d; ++c) {
      const double z = std_dev * stream.normal();
      noisy(r, c) += z;
      if (c != r) noisy(c, r) += z;
    }
  return noisy;
}

RankKProjection central_modsulq(const Matrix& a, i64 k,
                                const PrivacyBudget& budget, u64 seed,
                                double noise_std_override) {
  if (k < 1 || k > a.cols())
    throw ConfigError("central_modsulq: k must be in [1, d]");
  const Matrix gram = a.transpose() * a;
  double rho = 0.0;
  for (i64 r = 0; r < a.rows(); ++r) rho = std::max(rho, a.row(r).norm());
  const Matrix noisy =
      modsulq_gram(gram, a.rows(), rho, budget, seed, noise_std_override);
  return RankKProjection{top_eigenvectors(noisy, k)};
}

std::pair<double, double> ssp_noise_stds(double rho, double zeta,
                                         const PrivacyBudget& budget) {
  if (budget.epsilon <= 0.0 || budget.delta <= 0.0 || budget.delta >= 1.0)
    throw ConfigError("ssp: need eps > 0 and delta in (0, 1)");
  if (rho <= 0.0 || zeta < 0.0)
    throw ConfigError("ssp: need rho > 0 and zeta >= 0");
  // Half the budget per statistic; Gaussian mechanism at the replacement
  // sensitivities Delta_P = 2 rho^2, Delta_q = 2 rho zeta.
  const double eps_half = budget.epsilon / 2.0;
  const double delta_half = budget.delta / 2.0;
  const double factor = std::sqrt(2.0 * std::log(1.25 / delta_half)) / eps_half;
  return {2.0 * rho * rho * factor, 2.0 * rho * zeta * factor};
}

SspSolution ssp_from_stats(const Matrix& gram, const Vector& q, double rho,
                           double zeta, double lambda,
                           const PrivacyBudget& budget, u64 seed,
                           double std_p_override, double std_q_override) {
  if (gram.rows() != gram.cols() || gram.rows() != q.size())
    throw ConfigError("ssp: shape mismatch");
  const i64 d = gram.rows();
  double std_p = std_p_override;
  double std_q = std_q_override;
  if (std_p < 0.0 || std_q < 0.0) {
    const auto stds = ssp_noise_stds(rho, zeta, budget);
    if (std_p < 0.0) std_p = stds.first;
    if (std_q < 0.0) std_q = stds.second;
  }
  RandomStream stream(derive_seed(seed, StreamDomain::kAnalysis, 1));
  SspSolution out;
  out.gram_noisy = gram;
  for (i64 r = 0; r < d; ++r)
    for (i64 c = r; c < d; ++c) {
      const double z = std_p * stream.normal();
      out.gram_noisy(r, c) += z;
      if (c != r) out.gram_noisy(c, r) += z;
    }
  out.q_noisy = q;
  for (i64 r = 0; r < d; ++r) out.q_noisy(r) += std_q * stream.normal();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.gram_noisy);
  if (eig.info() != Eigen::Success)
    throw InternalError("ssp: eigendecomposition failed");
  Vector clamped = eig.eigenvalues();
  for (i64 i = 0; i < d; ++i)
    if (clamped(i) < 0.0) {
      clamped(i) = 0.0;
      out.clamped_eigenvalues++;
    }
  const Matrix psd = eig.eigenvectors() * clamped.asDiagonal() *
                     eig.eigenvectors().transpose();
  out.sol = ridge_solve_gram(psd, out.q_noisy, lambda);
  return out;
}

SspSolution central_ssp(const Matrix& a, const Vector& b, double lambda,
                        const PrivacyBudget& budget, u64 seed,
                        double std_p_override, double std_q_override) {
  if (a.rows() != b.size()) throw ConfigError("ssp: feature/target mismatch");
  const Matrix gram = a.transpose() * a;
  const Vector q = a.transpose() * b;
  double rho = 0.0;
  for (i64 r = 0; r < a.rows(); ++r) rho = std::max(rho, a.row(r).norm());
  const double zeta = b.size() == 0 ? 0.0 : b.cwiseAbs().maxCoeff();
  return ssp_from_stats(gram, q, rho, zeta, lambda, budget, seed,
                        std_p_override, std_q_override);
}

double interpolated_sigma(double sigma2_ltm, i64 n, double p) {
  if (n < 1) throw ConfigError("interpolated_sigma: n must be >= 1");
  if (p < 0.0 || p > 1.0)
    throw ConfigError("interpolated_sigma: p must be in [0, 1]");
  if (sigma2_ltm < 0.0)
    throw ConfigError("interpolated_sigma: variance must be >= 0");
  if (p == 1.0) return sigma2_ltm;
  const double nn = static_cast<double>(n);
  if (p == 0.0) return nn * sigma2_ltm;
  return sigma2_ltm * std::pow(nn, 1.0 - p);
}

std::string projection_to_json(const RankKProjection& proj) {
  nlohmann::json j;
  j["rows"] = proj.basis.rows();
  j["cols"] = proj.basis.cols();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(proj.basis.size()));
  for (i64 r = 0; r < proj.basis.rows(); ++r)
    for (i64 c = 0; c < proj.basis.cols(); ++c) flat.push_back(proj.basis(r, c));
  j["basis_row_major"] = flat;
  return j.dump(2);
}

std::string ridge_to_json(const RidgeSolution& sol) {
  nlohmann::json j;
  j["lambda"] = sol.lambda;
  j["x"] = std::vector<double>(sol.x.data(), sol.x.data() + sol.x.size());
  return j.dump(2);
}

}  // namespace ltm

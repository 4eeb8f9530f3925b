#pragma once

#include <string>
#include <utility>

#include "ltm/data.hpp"
#include "ltm/noise.hpp"
#include "ltm/rng.hpp"

namespace ltm {

struct RankKProjection {
  Matrix basis;  // d x k, orthonormal columns
};

struct RidgeSolution {
  Vector x;
  double lambda = 0.0;
};

// Top-k right singular vectors of y. Deterministic sign convention: each
// column is flipped so its largest-magnitude entry (first index on ties) is
// positive. Requires 1 <= k <= min(rows, cols).
RankKProjection lowrank_project(const Matrix& y, i64 k);

// Top-k eigenvectors (descending eigenvalue) of a symmetric matrix, same
// sign convention as lowrank_project.
Matrix top_eigenvectors(const Matrix& sym, i64 k);

// x = (Y^T Y + lambda I)^{-1} Y^T y via LDLT normal equations plus one
// iterative-refinement pass. Postcondition (checked, InternalError):
// ||(Y^T Y + lambda I) x - Y^T y|| <= 1e-8 * ||Y^T y||. Requires lambda > 0.
RidgeSolution ridge_solve(const Matrix& y_features, const Vector& y_target,
                          double lambda);
RidgeSolution ridge_solve_gram(const Matrix& gram, const Vector& q,
                               double lambda);

// Per-entry noise std of the Gram perturbation for rows normalized to unit
// norm:
//   beta0 = (d+1)/(n eps) * sqrt(2 ln((d^2+d) / (2 delta sqrt(2 pi))))
//           + 1/(n sqrt(eps))
// The calibration is a config default (the underlying formula is cited, not
// restated, by the reproduced source); callers may override the std.
double modsulq_beta(i64 n, i64 d, const PrivacyBudget& budget);

// Gram-perturbation release: gram + symmetric Gaussian noise with per-entry
// std n * rho^2 * beta0 (rho = max row norm), or noise_std_override when
// >= 0. Upper triangle (including diagonal) sampled row-major, mirrored.
Matrix modsulq_gram(const Matrix& gram, i64 n, double rho,
                    const PrivacyBudget& budget, u64 seed,
                    double noise_std_override = -1.0);

// Convenience: noisy Gram of a materialized matrix, then top-k eigenvectors.
RankKProjection central_modsulq(const Matrix& a, i64 k,
                                const PrivacyBudget& budget, u64 seed,
                                double noise_std_override = -1.0);

struct SspSolution {
  RidgeSolution sol;
  i64 clamped_eigenvalues = 0;  // negative eigenvalues zeroed before solving
  Matrix gram_noisy;            // released A^T A + N1 (pre-clamp)
  Vector q_noisy;               // released A^T b + n2
};

// Derived per-entry noise stds {std_P, std_q} of the sufficient-statistics
// release: Gaussian mechanism at (eps/2, delta/2) on each statistic, with
// sensitivities Delta_P = 2 rho^2 and Delta_q = 2 rho zeta.
std::pair<double, double> ssp_noise_stds(double rho, double zeta,
                                         const PrivacyBudget& budget);

// Sufficient-statistics perturbation: Gaussian mechanism at (eps/2, delta/2)
// on each statistic, sensitivities Delta_P = 2 rho^2 (row norms <= rho) and
// Delta_q = 2 rho zeta (|target| <= zeta) under row replacement. Negative
// eigenvalues of the perturbed Gram are clamped to zero (counted) before the
// ridge solve. Overrides (>= 0) replace the derived stds.
SspSolution ssp_from_stats(const Matrix& gram, const Vector& q, double rho,
                           double zeta, double lambda,
                           const PrivacyBudget& budget, u64 seed,
                           double std_p_override = -1.0,
                           double std_q_override = -1.0);

SspSolution central_ssp(const Matrix& a, const Vector& b, double lambda,
                        const PrivacyBudget& budget, u64 seed,
                        double std_p_override = -1.0,
                        double std_q_override = -1.0);

// Interpolated per-client variance sigma^2_p = C n^{-p} with C anchored so
// p=1 recovers sigma2_ltm and p=0 gives n * sigma2_ltm (the local model).
// Exact at the endpoints. Requires p in [0, 1].
double interpolated_sigma(double sigma2_ltm, i64 n, double p);

std::string projection_to_json(const RankKProjection& proj);
std::string ridge_to_json(const RidgeSolution& sol);

}  // namespace ltm

#pragma once

#include <cstddef>

#include "ltm/common.hpp"
#include "ltm/rng.hpp"

namespace ltm {

enum class NoiseFamily { kGaussian, kGammaDifference };

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.01;  // ignored by the gamma-difference family
};

// Public parameters the client-side calibration depends on.
struct LtmParams {
  i64 n = 0;          // clients
  i64 m = 0;          // sketch rows
  i64 d = 0;          // message width (features, +1 when a target rides along)
  i64 s = 0;          // nonzeros per column / pieces
  i64 t_clients = 0;  // corrupted clients t'
  double eta = 1.0;   // entry bound
};

// Signals that the privacy guarantee is infeasible at these public parameters
// and the mechanism must release zeros. The CLI maps this to exit code 3.
class ThresholdRegime : public std::runtime_error {
 public:
  explicit ThresholdRegime(const std::string& what) : std::runtime_error(what) {}
};

// True when the zero-output branch applies. Two guards, either fires:
//   n < 8 m ln(d m / delta) + t'            (participation threshold)
//   delta/d <= m exp(-(n - s - t')/(8 m))   (calibration feasibility)
// Computed once from public parameters; every client takes the same branch.
bool zero_output_regime(const PrivacyBudget& budget, const LtmParams& p);

// Per-entry Gaussian variance for the replicated message:
//   sigma^2 = 4 s^3 eta^2 ln(1.25 s / (delta/d - m e^{-(n-s-t')/(8m)}))
//             * m d^2 / (eps^2 (n - s - t'))
// Throws ThresholdRegime when the feasibility guard fails (callers that want
// the zero branch should consult zero_output_regime first).
double gaussian_sigma2(const PrivacyBudget& budget, const LtmParams& p);

struct GammaParams {
  double shape = 0.0;
  double scale = 0.0;
};

// Infinitely divisible Laplace: each client adds the difference of two
// Gamma(1/(n/m - t'), 2 eta m^2 d / eps) samples per entry; the sum of
// (n/m - t') such differences is Laplace(0, 2 eta m^2 d / eps).
GammaParams gamma_params(const PrivacyBudget& budget, const LtmParams& p);

struct NoiseCalibration {
  NoiseFamily family = NoiseFamily::kGaussian;
  double sigma2 = 0.0;  // Gaussian
  GammaParams gamma;    // GammaDifference
};

NoiseCalibration calibrate_ltm_noise(NoiseFamily family,
                                     const PrivacyBudget& budget,
                                     const LtmParams& p);

// One client's additive noise for `count` message entries.
void sample_client_noise(const NoiseCalibration& cal, RandomStream& stream,
                         double* out, std::size_t count);

// Scalar frequency-moment estimation of F_k = sum |x_i|^k with per-client
// contributions bounded by Delta^k.
struct FrequencyCalibration {
  NoiseFamily family = NoiseFamily::kGaussian;
  double sigma2 = 0.0;  // per client; aggregate variance = n * sigma2
  GammaParams gamma;    // per client; aggregate is Laplace(0, gamma.scale)
};

// Gaussian: sigma^2 = 2 Delta^k ln(1.25/delta) / (n eps^2).
// GammaDifference: Gamma(1/n, 2 Delta^k / eps).
// The Delta exponent defaults to k (the verbatim scaling); pass
// sensitivity_exponent >= 0 to override it (e.g. 2k).
FrequencyCalibration frequency_noise(NoiseFamily family, double delta_bound,
                                     i64 k_power, i64 n,
                                     const PrivacyBudget& budget,
                                     double sensitivity_exponent = -1.0);

}  // namespace ltm

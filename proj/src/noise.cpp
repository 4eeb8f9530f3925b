#include "ltm/noise.hpp"

#include <cmath>

namespace ltm {
namespace {

void validate_params(const PrivacyBudget& budget, const LtmParams& p,
                     bool need_delta) {
  if (!(budget.epsilon > 0.0))
    throw ConfigError("noise: epsilon must be positive");
  if (need_delta && !(budget.delta > 0.0 && budget.delta < 1.0))
    throw ConfigError("noise: delta must be in (0, 1)");
  if (p.n < 1 || p.m < 1 || p.d < 1 || p.s < 1)
    throw ConfigError("noise: n, m, d, s must be >= 1");
  if (p.t_clients < 0) throw ConfigError("noise: t_clients must be >= 0");
  if (!(p.eta > 0.0)) throw ConfigError("noise: eta must be positive");
}

}  // namespace

bool zero_output_regime(const PrivacyBudget& budget, const LtmParams& p) {
  validate_params(budget, p, /*need_delta=*/true);
  const double n = static_cast<double>(p.n);
  const double m = static_cast<double>(p.m);
  const double d = static_cast<double>(p.d);
  const double t = static_cast<double>(p.t_clients);
  const double s = static_cast<double>(p.s);
  const bool participation =
      n < 8.0 * m * std::log(d * m / budget.delta) + t;
  const double leak = m * std::exp(-(n - s - t) / (8.0 * m));
  const bool feasibility = budget.delta / d <= leak;
  return participation || feasibility;
}

double gaussian_sigma2(const PrivacyBudget& budget, const LtmParams& p) {
  validate_params(budget, p, /*need_delta=*/true);
  const double n = static_cast<double>(p.n);
  const double m = static_cast<double>(p.m);
  const double d = static_cast<double>(p.d);
  const double s = static_cast<double>(p.s);
  const double t = static_cast<double>(p.t_clients);
  const double honest = n - s - t;
  if (!(honest > 0.0))
    throw ConfigError("gaussian_sigma2: need n > s + t_clients");
  const double leak = m * std::exp(-honest / (8.0 * m));
  const double gap = budget.delta / d - leak;
  if (!(gap > 0.0))
    throw ThresholdRegime(
        "gaussian_sigma2: delta/d <= m exp(-(n-s-t')/(8m)); release must be "
        "zeros");
  const double lg = std::log(1.25 * s / gap);
  if (!(lg > 0.0))
    throw ConfigError("gaussian_sigma2: degenerate log argument");
  return 4.0 * s * s * s * p.eta * p.eta * lg * m * d * d /
         (budget.epsilon * budget.epsilon * honest);
}

GammaParams gamma_params(const PrivacyBudget& budget, const LtmParams& p) {
  validate_params(budget, p, /*need_delta=*/false);
  const double pieces = static_cast<double>(p.n) / static_cast<double>(p.m) -
                        static_cast<double>(p.t_clients);
  if (!(pieces > 0.0))
    throw ConfigError("gamma_params: need n/m > t_clients");
  GammaParams g;
  g.shape = 1.0 / pieces;
  g.scale = 2.0 * p.eta * static_cast<double>(p.m) * static_cast<double>(p.m) *
            static_cast<double>(p.d) / budget.epsilon;
  return g;
}

NoiseCalibration calibrate_ltm_noise(NoiseFamily family,
                                     const PrivacyBudget& budget,
                                     const LtmParams& p) {
  NoiseCalibration cal;
  cal.family = family;
  if (family == NoiseFamily::kGaussian)
    cal.sigma2 = gaussian_sigma2(budget, p);
  else
    cal.gamma = gamma_params(budget, p);
  return cal;
}

void sample_client_noise(const NoiseCalibration& cal, RandomStream& stream,
                         double* out, std::size_t count) {
  if (cal.family == NoiseFamily::kGaussian) {
    const double sd = std::sqrt(cal.sigma2);
    for (std::size_t i = 0; i < count; ++i) out[i] = sd * stream.normal();
  } else {
    for (std::size_t i = 0; i < count; ++i)
      out[i] = stream.gamma(cal.gamma.shape, cal.gamma.scale) -
               stream.gamma(cal.gamma.shape, cal.gamma.scale);
  }
}

FrequencyCalibration frequency_noise(NoiseFamily family, double delta_bound,
                                     i64 k_power, i64 n,
                                     const PrivacyBudget& budget,
                                     double sensitivity_exponent) {
  if (!(delta_bound > 0.0))
    throw ConfigError("frequency_noise: delta_bound must be positive");
  if (k_power < 1) throw ConfigError("frequency_noise: k_power must be >= 1");
  if (n < 1) throw ConfigError("frequency_noise: n must be >= 1");
  if (!(budget.epsilon > 0.0))
    throw ConfigError("frequency_noise: epsilon must be positive");
  const double expo = sensitivity_exponent >= 0.0
                          ? sensitivity_exponent
                          : static_cast<double>(k_power);
  const double sens = std::pow(delta_bound, expo);
  FrequencyCalibration cal;
  cal.family = family;
  if (family == NoiseFamily::kGaussian) {
    if (!(budget.delta > 0.0 && budget.delta < 1.0))
      throw ConfigError("frequency_noise: delta must be in (0, 1)");
    cal.sigma2 = 2.0 * sens * std::log(1.25 / budget.delta) /
                 (static_cast<double>(n) * budget.epsilon * budget.epsilon);
  } else {
    cal.gamma.shape = 1.0 / static_cast<double>(n);
    cal.gamma.scale = 2.0 * sens / budget.epsilon;
  }
  return cal;
}

}  // namespace ltm

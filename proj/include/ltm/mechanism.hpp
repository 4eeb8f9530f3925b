#pragma once

#include <string>
#include <vector>

#include "ltm/data.hpp"
#include "ltm/noise.hpp"
#include "ltm/sketch.hpp"

namespace ltm {

struct MechanismConfig {
  NoiseFamily family = NoiseFamily::kGaussian;
  PrivacyBudget budget;
  i64 t_clients = 0;
};

// One client's randomized message: the d-entry row replicated s times
// (piece-major), each entry carrying fresh i.i.d. noise; or the all-zeros
// message when the zero-output regime applies. Never a partial zeroing.
struct ClientMessage {
  std::vector<double> values;  // d * s, piece-major
  bool zeroed = false;
};

// Client-side randomizer. Enforces |row[c]| <= eta (privacy-critical; throws
// DataError). The zero_regime flag is the centrally computed public decision;
// clients never decide it per-row.
ClientMessage randomize(const double* row, i64 d, i64 s, double eta,
                        const NoiseCalibration& cal, bool zero_regime,
                        RandomStream& client_stream);

struct LtmOutput {
  Matrix sketch;  // m x width, width = d (+1 with target)
  bool zeroed = false;
  NoiseCalibration calibration;  // zero-initialized when zeroed
  LtmParams params;
};

// Plaintext reference pipeline: randomize every client with its own stream
// (derived from master_seed and the client index), apply the sketch
// decomposition with streaming accumulators (O(m * width * s) memory), scale
// by 1/sqrt(s). When the data carries a target, the concatenated
// (d+1)-entry row is randomized jointly at the same calibration.
LtmOutput ltm_pipeline(const DataMatrix& data, const SketchDecomposition& dec,
                       const MechanismConfig& cfg, u64 master_seed);

// Scalar frequency-moment release: sum over clients of |x_i|^k + noise_i.
// Enforces |x_i| <= delta_bound.
double frequency_pipeline(const std::vector<double>& values, i64 k_power,
                          double delta_bound, const FrequencyCalibration& cal,
                          u64 master_seed);

// Exact F_k for reference.
double frequency_moment(const std::vector<double>& values, i64 k_power);

// Columnar binary dump of a released sketch (little-endian f64 body,
// column-major), with the pipeline shape in the header.
struct SketchDumpMeta {
  i64 n = 0;
  i64 d = 0;
  i64 s = 0;
  i64 m = 0;
};
void write_sketch_columnar(const std::string& path, const Matrix& sketch,
                           const SketchDumpMeta& meta);
Matrix read_sketch_columnar(const std::string& path, SketchDumpMeta* meta);

}  // namespace ltm

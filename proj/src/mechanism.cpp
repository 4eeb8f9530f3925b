#include "ltm/mechanism.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "ltm/kernels.hpp"

namespace ltm {

ClientMessage randomize(const double* row, i64 d, i64 s, double eta,
                        const NoiseCalibration& cal, bool zero_regime,
                        RandomStream& client_stream) {
  ClientMessage msg;
  msg.values.assign(static_cast<std::size_t>(d * s), 0.0);
  for (i64 c = 0; c < d; ++c) {
    if (!(std::abs(row[c]) <= eta))
      throw DataError("randomize: entry exceeds the declared bound eta");
  }
  if (zero_regime) {
    msg.zeroed = true;
    return msg;
  }
  for (i64 i = 0; i < s; ++i)
    std::memcpy(msg.values.data() + i * d, row,
                static_cast<std::size_t>(d) * sizeof(double));
  std::vector<double> noise(static_cast<std::size_t>(d * s));
  sample_client_noise(cal, client_stream, noise.data(), noise.size());
  for (std::size_t i = 0; i < msg.values.size(); ++i)
    msg.values[i] += noise[i];
  return msg;
}

namespace {

constexpr i64 kClientBlock = 2048;

// Width of the message row and a pointer fetcher for the (optional) target.
struct JointView {
  const DataMatrix* data;
  i64 width;
  void fill_row(i64 j, double* out) const {
    const i64 d = data->d();
    std::memcpy(out, data->rows.data() + j * d,
                static_cast<std::size_t>(d) * sizeof(double));
    if (width > d) out[d] = (*data->target)(j);
  }
};

}  // namespace

LtmOutput ltm_pipeline(const DataMatrix& data, const SketchDecomposition& dec,
                       const MechanismConfig& cfg, u64 master_seed) {
  if (data.n() != dec.n) throw ConfigError("ltm_pipeline: n mismatch");
  const i64 width = data.d() + (data.target.has_value() ? 1 : 0);
  if (data.target && data.target->size() != data.n())
    throw ConfigError("ltm_pipeline: target length mismatch");

  LtmOutput out;
  out.params = LtmParams{dec.n,          dec.m,   width,
                         dec.s,          cfg.t_clients, data.eta};
  const bool zeroed = zero_output_regime(cfg.budget, out.params);
  out.zeroed = zeroed;
  if (!zeroed)
    out.calibration = calibrate_ltm_noise(cfg.family, cfg.budget, out.params);

  const JointView view{&data, width};
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t stride = w * static_cast<std::size_t>(dec.s);

  // Streaming accumulation: per-piece m x width buffers, clients in blocks.
  std::vector<Matrix> pieces(static_cast<std::size_t>(dec.s),
                             Matrix::Zero(dec.m, width));
  std::vector<double> block(static_cast<std::size_t>(kClientBlock) * stride);
  std::vector<double> row(w);
  for (i64 j0 = 0; j0 < dec.n; j0 += kClientBlock) {
    const i64 count = std::min<i64>(kClientBlock, dec.n - j0);
    for (i64 r = 0; r < count; ++r) {
      const i64 j = j0 + r;
      view.fill_row(j, row.data());
      RandomStream client_stream(master_seed, StreamDomain::kClientNoise,
                                 static_cast<u64>(j));
      ClientMessage msg = randomize(row.data(), width, dec.s, data.eta,
                                    out.calibration, zeroed, client_stream);
      std::memcpy(block.data() + static_cast<std::size_t>(r) * stride,
                  msg.values.data(), stride * sizeof(double));
    }
    for (i64 i = 0; i < dec.s; ++i) {
      kernels::ops().scatter_accum_f64(
          block.data() + static_cast<std::size_t>(i) * w, stride,
          dec.rows[static_cast<std::size_t>(i)].data() + j0,
          dec.signs[static_cast<std::size_t>(i)].data() + j0,
          static_cast<std::size_t>(count), w,
          pieces[static_cast<std::size_t>(i)].data());
    }
  }
  // Pairwise tree combine across pieces, then the 1/sqrt(s) factor.
  std::size_t active = pieces.size();
  while (active > 1) {
    std::size_t half = active / 2;
    for (std::size_t i = 0; i < half; ++i) pieces[i] += pieces[active - 1 - i];
    active -= half;
  }
  out.sketch = dec.scale() * pieces[0];
  return out;
}

double frequency_pipeline(const std::vector<double>& values, i64 k_power,
                          double delta_bound, const FrequencyCalibration& cal,
                          u64 master_seed) {
  if (values.empty()) throw ConfigError("frequency_pipeline: empty input");
  double acc = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(std::abs(values[j]) <= delta_bound))
      throw DataError("frequency_pipeline: value exceeds delta_bound");
    RandomStream stream(master_seed, StreamDomain::kClientNoise,
                        static_cast<u64>(j));
    double noise;
    if (cal.family == NoiseFamily::kGaussian) {
      noise = std::sqrt(cal.sigma2) * stream.normal();
    } else {
      noise = stream.gamma(cal.gamma.shape, cal.gamma.scale) -
              stream.gamma(cal.gamma.shape, cal.gamma.scale);
    }
    acc += std::pow(std::abs(values[j]), static_cast<double>(k_power)) + noise;
  }
  return acc;
}

double frequency_moment(const std::vector<double>& values, i64 k_power) {
  double acc = 0.0;
  for (double v : values)
    acc += std::pow(std::abs(v), static_cast<double>(k_power));
  return acc;
}

namespace {

constexpr char kColumnarMagic[4] = {'L', 'T', 'M', 'C'};
constexpr u16 kColumnarVersion = 1;

void put_u16(std::FILE* f, u16 v) {
  unsigned char b[2] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8)};
  std::fwrite(b, 1, 2, f);
}

void put_u64(std::FILE* f, u64 v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  std::fwrite(b, 1, 8, f);
}

u16 get_u16(std::FILE* f) {
  unsigned char b[2];
  if (std::fread(b, 1, 2, f) != 2) throw DataError("columnar: truncated header");
  return static_cast<u16>(b[0] | (u16{b[1]} << 8));
}

u64 get_u64(std::FILE* f) {
  unsigned char b[8];
  if (std::fread(b, 1, 8, f) != 8) throw DataError("columnar: truncated header");
  u64 v = 0;
  for (int i = 0; i < 8; ++i) v |= u64{b[i]} << (8 * i);
  return v;
}

}  // namespace

void write_sketch_columnar(const std::string& path, const Matrix& sketch,
                           const SketchDumpMeta& meta) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw DataError("columnar: cannot open for write: " + path);
  std::fwrite(kColumnarMagic, 1, 4, f);
  put_u16(f, kColumnarVersion);
  put_u64(f, static_cast<u64>(meta.n));
  put_u64(f, static_cast<u64>(meta.d));
  put_u64(f, static_cast<u64>(meta.s));
  put_u64(f, static_cast<u64>(meta.m));
  put_u64(f, static_cast<u64>(sketch.rows()));
  put_u64(f, static_cast<u64>(sketch.cols()));
  // Column-major f64 body, little-endian.
  for (i64 c = 0; c < sketch.cols(); ++c) {
    for (i64 r = 0; r < sketch.rows(); ++r) {
      u64 bits;
      const double v = sketch(r, c);
      std::memcpy(&bits, &v, 8);
      put_u64(f, bits);
    }
  }
  if (std::fclose(f) != 0) throw DataError("columnar: write failed: " + path);
}

Matrix read_sketch_columnar(const std::string& path, SketchDumpMeta* meta) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) throw DataError("columnar: cannot open: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 ||
      std::memcmp(magic, kColumnarMagic, 4) != 0) {
    std::fclose(f);
    throw DataError("columnar: bad magic: " + path);
  }
  const u16 version = get_u16(f);
  if (version != kColumnarVersion) {
    std::fclose(f);
    throw DataError("columnar: unsupported version");
  }
  SketchDumpMeta m;
  m.n = static_cast<i64>(get_u64(f));
  m.d = static_cast<i64>(get_u64(f));
  m.s = static_cast<i64>(get_u64(f));
  m.m = static_cast<i64>(get_u64(f));
  const i64 rows = static_cast<i64>(get_u64(f));
  const i64 cols = static_cast<i64>(get_u64(f));
  if (rows < 0 || cols < 0 || rows > (1 << 26) || cols > (1 << 26)) {
    std::fclose(f);
    throw DataError("columnar: implausible shape");
  }
  Matrix sk(rows, cols);
  for (i64 c = 0; c < cols; ++c) {
    for (i64 r = 0; r < rows; ++r) {
      u64 bits = get_u64(f);
      double v;
      std::memcpy(&v, &bits, 8);
      sk(r, c) = v;
    }
  }
  std::fclose(f);
  if (meta != nullptr) *meta = m;
  return sk;
}

}  // namespace ltm

#include "ltm/mpc.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include <nlohmann/json.hpp>

#include "ltm/kernels.hpp"

namespace ltm {

CommReport comm_report(i64 n, i64 d, i64 s, i64 m, i32 servers) {
  if (n < 1 || d < 1 || s < 1 || m < 1 || servers < 2)
    throw ConfigError("comm_report: need n, d, s, m >= 1 and servers >= 2");
  CommReport r;
  r.servers = servers;
  r.n = n;
  r.d = d;
  r.s = s;
  r.m = m;
  r.input_bytes = static_cast<u64>(n) * static_cast<u64>(d) *
                  static_cast<u64>(s) * 8u * static_cast<u64>(servers);
  r.output_bytes = static_cast<u64>(m) * static_cast<u64>(d) * 8u *
                   static_cast<u64>(servers);
  r.input_mb = static_cast<double>(r.input_bytes) / 1e6;
  r.output_mb = static_cast<double>(r.output_bytes) / 1e6;
  r.total_mb = static_cast<double>(r.input_bytes + r.output_bytes) / 1e6;
  return r;
}

std::string comm_report_to_json(const CommReport& r) {
  nlohmann::json j{
      {"servers", r.servers},     {"n", r.n},
      {"d", r.d},                 {"s", r.s},
      {"m", r.m},                 {"input_bytes", r.input_bytes},
      {"output_bytes", r.output_bytes}, {"input_mb", r.input_mb},
      {"output_mb", r.output_mb}, {"total_mb", r.total_mb},
  };
  return j.dump(2);
}

SimServer::SimServer(i64 server_id, const SketchDecomposition* dec, i64 width)
    : id_(server_id),
      dec_(dec),
      width_(width),
      acc_(static_cast<std::size_t>(dec->m * width), 0u) {}

void SimServer::enqueue(ShareBatch&& batch) {
  bytes_received_ += batch.payload.size() * 8u;
  queue_.push(std::move(batch));
}

void SimServer::process_queue() {
  const std::size_t w = static_cast<std::size_t>(width_);
  const std::size_t stride = w * static_cast<std::size_t>(dec_->s);
  while (!queue_.empty()) {
    const ShareBatch& batch = queue_.front();
    if (batch.payload.size() != stride * batch.count)
      throw InternalError("SimServer: malformed share batch");
    for (i64 i = 0; i < dec_->s; ++i) {
      kernels::ops().scatter_accum_u64(
          batch.payload.data() + static_cast<std::size_t>(i) * w, stride,
          dec_->rows[static_cast<std::size_t>(i)].data() + batch.first_client,
          dec_->signs[static_cast<std::size_t>(i)].data() + batch.first_client,
          batch.count, w, acc_.data());
    }
    queue_.pop();
  }
}

void additive_share(const u64* encoded, std::size_t count, i32 servers,
                    RandomStream& stream, std::vector<std::vector<u64>>& out) {
  if (servers < 2) throw ConfigError("additive_share: servers must be >= 2");
  out.resize(static_cast<std::size_t>(servers));
  for (auto& v : out) v.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    u64 rest = encoded[i];
    for (i32 t = 0; t + 1 < servers; ++t) {
      const u64 r = stream.next_u64();
      out[static_cast<std::size_t>(t)][i] = r;
      rest -= r;
    }
    out[static_cast<std::size_t>(servers - 1)][i] = rest;
  }
}

MpcOutput mpc_pipeline(const DataMatrix& data, const SketchDecomposition& dec,
                       const MechanismConfig& cfg, const MpcConfig& mpc,
                       u64 master_seed) {
  if (data.n() != dec.n) throw ConfigError("mpc_pipeline: n mismatch");
  if (mpc.servers < 2) throw ConfigError("mpc_pipeline: servers must be >= 2");
  if (mpc.frac_bits < 0 || mpc.frac_bits > 32)
    throw ConfigError("mpc_pipeline: frac_bits must be in [0, 32]");
  const i64 width = data.d() + (data.target.has_value() ? 1 : 0);

  MpcOutput out;
  out.params = LtmParams{dec.n, dec.m, width, dec.s, cfg.t_clients, data.eta};
  const bool zeroed = zero_output_regime(cfg.budget, out.params);
  out.zeroed = zeroed;
  if (!zeroed)
    out.calibration = calibrate_ltm_noise(cfg.family, cfg.budget, out.params);

  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t stride = w * static_cast<std::size_t>(dec.s);
  const double clip = data.eta * 65536.0;  // +-(eta * 2^16) before encoding

  std::vector<SimServer> servers;
  servers.reserve(static_cast<std::size_t>(mpc.servers));
  for (i32 t = 0; t < mpc.servers; ++t) servers.emplace_back(t, &dec, width);

  constexpr i64 kBlock = 1024;
  std::vector<double> clipped(stride);
  std::vector<u64> encoded(stride);
  std::vector<std::vector<u64>> shares;
  std::vector<ShareBatch> batches(static_cast<std::size_t>(mpc.servers));
  std::vector<double> row(w);

  for (i64 j0 = 0; j0 < dec.n; j0 += kBlock) {
    const i64 count = std::min<i64>(kBlock, dec.n - j0);
    for (auto& b : batches) {
      b.first_client = static_cast<u32>(j0);
      b.count = static_cast<u32>(count);
      b.payload.assign(static_cast<std::size_t>(count) * stride, 0u);
    }
    for (i64 r = 0; r < count; ++r) {
      const i64 j = j0 + r;
      for (i64 c = 0; c < data.d(); ++c) row[static_cast<std::size_t>(c)] = data.rows(j, c);
      if (width > data.d()) row[w - 1] = (*data.target)(j);
      RandomStream noise_stream(master_seed, StreamDomain::kClientNoise,
                                static_cast<u64>(j));
      ClientMessage msg =
          randomize(row.data(), width, dec.s, data.eta, out.calibration,
                    zeroed, noise_stream);
      for (std::size_t i = 0; i < stride; ++i) {
        double v = msg.values[i];
        if (v > clip) {
          v = clip;
          out.clipped_entries++;
        } else if (v < -clip) {
          v = -clip;
          out.clipped_entries++;
        }
        clipped[i] = v;
      }
      out.total_entries += stride;
      kernels::ops().encode_fixed(clipped.data(), mpc.frac_bits, encoded.data(),
                                  stride);
      RandomStream share_stream(master_seed, StreamDomain::kShares,
                                static_cast<u64>(j));
      additive_share(encoded.data(), stride, mpc.servers, share_stream, shares);
      for (i32 t = 0; t < mpc.servers; ++t) {
        std::memcpy(batches[static_cast<std::size_t>(t)].payload.data() +
                        static_cast<std::size_t>(r) * stride,
                    shares[static_cast<std::size_t>(t)].data(),
                    stride * sizeof(u64));
      }
    }
    for (i32 t = 0; t < mpc.servers; ++t)
      servers[static_cast<std::size_t>(t)].enqueue(
          std::move(batches[static_cast<std::size_t>(t)]));
    // Servers are independent state machines; draining per block keeps the
    // queue semantics while bounding memory.
    for (auto& srv : servers) srv.process_queue();
  }

  // Collector: ring-sum the accumulators, decode the signed fixed-point
  // values, rescale by 1/sqrt(s) in real arithmetic.
  const std::size_t cells = static_cast<std::size_t>(dec.m) * w;
  std::vector<u64> total(servers[0].accumulator());
  u64 output_bytes = cells * 8u;
  for (std::size_t t = 1; t < servers.size(); ++t) {
    kernels::ops().add_u64(total.data(), servers[t].accumulator().data(),
                           total.data(), cells);
    output_bytes += cells * 8u;
  }
  std::vector<double> decoded(cells);
  kernels::ops().decode_fixed(total.data(), mpc.frac_bits, decoded.data(),
                              cells);
  out.sketch = Matrix::Zero(dec.m, width);
  const double scale = dec.scale();
  for (i64 rr = 0; rr < dec.m; ++rr)
    for (i64 cc = 0; cc < width; ++cc)
      out.sketch(rr, cc) = scale * decoded[static_cast<std::size_t>(rr) * w +
                                           static_cast<std::size_t>(cc)];

  out.comm = comm_report(dec.n, width, dec.s, dec.m, mpc.servers);
  u64 input_bytes = 0;
  for (const auto& srv : servers) input_bytes += srv.bytes_received();
  if (input_bytes != out.comm.input_bytes || output_bytes != out.comm.output_bytes)
    throw InternalError("mpc_pipeline: byte accounting mismatch");
  out.clip_fraction =
      out.total_entries == 0
          ? 0.0
          : static_cast<double>(out.clipped_entries) /
                static_cast<double>(out.total_entries);
  return out;
}

namespace {

constexpr char kShareMagic[4] = {'L', 'T', 'M', 'S'};
constexpr u16 kShareVersion = 1;

void put_bytes(std::FILE* f, const void* p, std::size_t len) {
  if (std::fwrite(p, 1, len, f) != len) throw DataError("share file: short write");
}

void put_u16_le(std::FILE* f, u16 v) {
  unsigned char b[2] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8)};
  put_bytes(f, b, 2);
}

void put_u32_le(std::FILE* f, u32 v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(f, b, 4);
}

void put_u64_le(std::FILE* f, u64 v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(f, b, 8);
}

void get_bytes(std::FILE* f, void* p, std::size_t len) {
  if (std::fread(p, 1, len, f) != len) throw DataError("share file: truncated");
}

u16 get_u16_le(std::FILE* f) {
  unsigned char b[2];
  get_bytes(f, b, 2);
  return static_cast<u16>(b[0] | (u16{b[1]} << 8));
}

u32 get_u32_le(std::FILE* f) {
  unsigned char b[4];
  get_bytes(f, b, 4);
  u32 v = 0;
  for (int i = 0; i < 4; ++i) v |= u32{b[i]} << (8 * i);
  return v;
}

u64 get_u64_le(std::FILE* f) {
  unsigned char b[8];
  get_bytes(f, b, 8);
  u64 v = 0;
  for (int i = 0; i < 8; ++i) v |= u64{b[i]} << (8 * i);
  return v;
}

}  // namespace

void write_share_file(const std::string& path, const ShareFileHeader& header,
                      const std::vector<u64>& payload) {
  const u64 expect = header.n * header.d * header.s;
  if (payload.size() != expect)
    throw ConfigError("share file: payload size does not match header shape");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw DataError("share file: cannot open for write: " + path);
  try {
    put_bytes(f, kShareMagic, 4);
    put_u16_le(f, kShareVersion);
    put_u64_le(f, header.n);
    put_u32_le(f, header.d);
    put_u32_le(f, header.s);
    unsigned char fb = header.frac_bits;
    put_bytes(f, &fb, 1);
    put_u16_le(f, header.server_id);
    for (u64 v : payload) put_u64_le(f, v);
  } catch (...) {
    std::fclose(f);
    throw;
  }
  if (std::fclose(f) != 0) throw DataError("share file: write failed: " + path);
}

std::vector<u64> read_share_file(const std::string& path,
                                 ShareFileHeader* header) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) throw DataError("share file: cannot open: " + path);
  try {
    char magic[4];
    get_bytes(f, magic, 4);
    if (std::memcmp(magic, kShareMagic, 4) != 0)
      throw DataError("share file: bad magic: " + path);
    if (get_u16_le(f) != kShareVersion)
      throw DataError("share file: unsupported version");
    ShareFileHeader h;
    h.n = get_u64_le(f);
    h.d = get_u32_le(f);
    h.s = get_u32_le(f);
    unsigned char fb;
    get_bytes(f, &fb, 1);
    h.frac_bits = fb;
    h.server_id = get_u16_le(f);
    const u64 count = h.n * h.d * h.s;
    if (count > (u64{1} << 28))
      throw DataError("share file: implausible payload size");
    std::vector<u64> payload(static_cast<std::size_t>(count));
    for (auto& v : payload) v = get_u64_le(f);
    if (header != nullptr) *header = h;
    std::fclose(f);
    return payload;
  } catch (...) {
    std::fclose(f);
    throw;
  }
}

}  // namespace ltm

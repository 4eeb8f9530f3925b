#pragma once

#include <queue>
#include <string>
#include <vector>

#include "ltm/mechanism.hpp"

namespace ltm {

struct MpcConfig {
  i32 servers = 3;
  i32 frac_bits = 16;  // fixed-point fractional bits; 0 = integer regime
};

// Exact byte accounting for one pipeline execution (no wall-clock network):
//   input_bytes  = n * d * s * 8 * servers   (every client shares its
//                                             replicated message to every server)
//   output_bytes = m * d * 8 * servers       (every server ships its
//                                             accumulator to the collector)
// MB means 10^6 bytes.
struct CommReport {
  i64 servers = 0;
  i64 n = 0;
  i64 d = 0;
  i64 s = 0;
  i64 m = 0;
  u64 input_bytes = 0;
  u64 output_bytes = 0;
  double input_mb = 0.0;
  double output_mb = 0.0;
  double total_mb = 0.0;
};

CommReport comm_report(i64 n, i64 d, i64 s, i64 m, i32 servers);
std::string comm_report_to_json(const CommReport& report);

// Client->server transport frame: `count` clients' share blocks, each
// d * s ring elements, starting at client `first_client`.
struct ShareBatch {
  u32 first_client = 0;
  u32 count = 0;
  std::vector<u64> payload;
};

// One honest-but-isolated server: consumes its share queue, applies the
// public sketch signs/rows in ring arithmetic (adds and sign flips only),
// and exposes its m x d accumulator for the collector.
class SimServer {
 public:
  SimServer(i64 server_id, const SketchDecomposition* dec, i64 width);

  void enqueue(ShareBatch&& batch);
  void process_queue();

  i64 id() const { return id_; }
  const std::vector<u64>& accumulator() const { return acc_; }
  u64 bytes_received() const { return bytes_received_; }

 private:
  i64 id_;
  const SketchDecomposition* dec_;
  i64 width_;
  std::vector<u64> acc_;  // m x width, row-major, ring Z_2^64
  std::queue<ShareBatch> queue_;
  u64 bytes_received_ = 0;
};

struct MpcOutput {
  Matrix sketch;  // m x width, real-valued after decode and 1/sqrt(s)
  bool zeroed = false;
  NoiseCalibration calibration;
  LtmParams params;
  CommReport comm;
  u64 clipped_entries = 0;
  u64 total_entries = 0;
  double clip_fraction = 0.0;
};

// End-to-end simulated execution: randomize clients (identical messages to
// ltm_pipeline at the same master_seed), clip at +-(eta * 2^16), fixed-point
// encode, additively share across servers, queue-deliver, server-side ring
// application, reconstruct, decode, rescale by 1/sqrt(s) in real arithmetic.
MpcOutput mpc_pipeline(const DataMatrix& data, const SketchDecomposition& dec,
                       const MechanismConfig& cfg, const MpcConfig& mpc,
                       u64 master_seed);

// Share file wire format: magic "LTMS", version u16, n u64, d u32, s u32,
// frac_bits u8, server_id u16, then n * d * s ring elements (u64
// little-endian, client-major).
struct ShareFileHeader {
  u64 n = 0;
  u32 d = 0;
  u32 s = 0;
  u8 frac_bits = 0;
  u16 server_id = 0;
};

void write_share_file(const std::string& path, const ShareFileHeader& header,
                      const std::vector<u64>& payload);
std::vector<u64> read_share_file(const std::string& path,
                                 ShareFileHeader* header);

// Splits one encoded message vector into `servers` additive shares; the
// first servers-1 are uniform, the last is the ring difference. Exposed for
// tests and the share-file tool path.
void additive_share(const u64* encoded, std::size_t count, i32 servers,
                    RandomStream& stream, std::vector<std::vector<u64>>& out);

}  // namespace ltm

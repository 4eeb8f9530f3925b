#include <cmath>

#include "ltm/kernels.hpp"

namespace ltm::kernels {
namespace {

void scatter_accum_f64_scalar(const double* src, std::size_t src_stride,
                              const u32* rows, const i8* signs,
                              std::size_t count, std::size_t d, double* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const double* s = src + j * src_stride;
    double* o = out + static_cast<std::size_t>(rows[j]) * d;
    if (signs[j] > 0) {
      for (std::size_t c = 0; c < d; ++c) o[c] += s[c];
    } else {
      for (std::size_t c = 0; c < d; ++c) o[c] -= s[c];
    }
  }
}

void scatter_accum_u64_scalar(const u64* src, std::size_t src_stride,
                              const u32* rows, const i8* signs,
                              std::size_t count, std::size_t d, u64* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const u64* s = src + j * src_stride;
    u64* o = out + static_cast<std::size_t>(rows[j]) * d;
    if (signs[j] > 0) {
      for (std::size_t c = 0; c < d; ++c) o[c] += s[c];
    } else {
      for (std::size_t c = 0; c < d; ++c) o[c] -= s[c];
    }
  }
}

void add_u64_scalar(const u64* a, const u64* b, u64* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = a[i] + b[i];
}

void sub_u64_scalar(const u64* a, const u64* b, u64* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = a[i] - b[i];
}

void encode_fixed_scalar(const double* src, i32 frac_bits, u64* out,
                         std::size_t count) {
  const double scale = std::ldexp(1.0, frac_bits);
  for (std::size_t i = 0; i < count; ++i) {
    // llrint under the default FP environment is round-to-nearest-even,
    // matching the SIMD variants exactly.
    out[i] = static_cast<u64>(static_cast<i64>(std::llrint(src[i] * scale)));
  }
}

void decode_fixed_scalar(const u64* src, i32 frac_bits, double* out,
                         std::size_t count) {
  const double inv_scale = std::ldexp(1.0, -frac_bits);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = static_cast<double>(static_cast<i64>(src[i])) * inv_scale;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops kScalar{
      "scalar",          scatter_accum_f64_scalar, scatter_accum_u64_scalar,
      add_u64_scalar,    sub_u64_scalar,           encode_fixed_scalar,
      decode_fixed_scalar,
  };
  return kScalar;
}

}  // namespace ltm::kernels

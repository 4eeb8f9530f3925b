// NEON variants (aarch64; NEON is architecturally guaranteed there).

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

#include "ltm/kernels.hpp"

namespace ltm::kernels {
namespace {

void scatter_accum_f64_neon(const double* src, std::size_t src_stride,
                            const u32* rows, const i8* signs, std::size_t count,
                            std::size_t d, double* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const double* s = src + j * src_stride;
    double* o = out + static_cast<std::size_t>(rows[j]) * d;
    std::size_t c = 0;
    if (signs[j] > 0) {
      for (; c + 2 <= d; c += 2)
        vst1q_f64(o + c, vaddq_f64(vld1q_f64(o + c), vld1q_f64(s + c)));
      for (; c < d; ++c) o[c] += s[c];
    } else {
      for (; c + 2 <= d; c += 2)
        vst1q_f64(o + c, vsubq_f64(vld1q_f64(o + c), vld1q_f64(s + c)));
      for (; c < d; ++c) o[c] -= s[c];
    }
  }
}

void scatter_accum_u64_neon(const u64* src, std::size_t src_stride,
                            const u32* rows, const i8* signs, std::size_t count,
                            std::size_t d, u64* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const u64* s = src + j * src_stride;
    u64* o = out + static_cast<std::size_t>(rows[j]) * d;
    std::size_t c = 0;
    if (signs[j] > 0) {
      for (; c + 2 <= d; c += 2)
        vst1q_u64(o + c, vaddq_u64(vld1q_u64(o + c), vld1q_u64(s + c)));
      for (; c < d; ++c) o[c] += s[c];
    } else {
      for (; c + 2 <= d; c += 2)
        vst1q_u64(o + c, vsubq_u64(vld1q_u64(o + c), vld1q_u64(s + c)));
      for (; c < d; ++c) o[c] -= s[c];
    }
  }
}

void add_u64_neon(const u64* a, const u64* b, u64* out, std::size_t count) {
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2)
    vst1q_u64(out + i, vaddq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
  for (; i < count; ++i) out[i] = a[i] + b[i];
}

void sub_u64_neon(const u64* a, const u64* b, u64* out, std::size_t count) {
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2)
    vst1q_u64(out + i, vsubq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
  for (; i < count; ++i) out[i] = a[i] - b[i];
}

void encode_fixed_neon(const double* src, i32 frac_bits, u64* out,
                       std::size_t count) {
  const double scale_s = std::ldexp(1.0, frac_bits);
  const float64x2_t scale = vdupq_n_f64(scale_s);
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    float64x2_t x = vmulq_f64(vld1q_f64(src + i), scale);
    // vcvtnq: round to nearest, ties to even.
    vst1q_u64(out + i, vreinterpretq_u64_s64(vcvtnq_s64_f64(x)));
  }
  for (; i < count; ++i)
    out[i] = static_cast<u64>(static_cast<i64>(std::llrint(src[i] * scale_s)));
}

void decode_fixed_neon(const u64* src, i32 frac_bits, double* out,
                       std::size_t count) {
  const double inv_scale_s = std::ldexp(1.0, -frac_bits);
  const float64x2_t inv_scale = vdupq_n_f64(inv_scale_s);
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    float64x2_t y = vcvtq_f64_s64(vreinterpretq_s64_u64(vld1q_u64(src + i)));
    vst1q_f64(out + i, vmulq_f64(y, inv_scale));
  }
  for (; i < count; ++i)
    out[i] = static_cast<double>(static_cast<i64>(src[i])) * inv_scale_s;
}

}  // namespace

const Ops& neon_ops() {
  static const Ops kNeon{
      "neon",        scatter_accum_f64_neon, scatter_accum_u64_neon,
      add_u64_neon,  sub_u64_neon,           encode_fixed_neon,
      decode_fixed_neon,
  };
  return kNeon;
}

}  // namespace ltm::kernels

#endif  // __aarch64__

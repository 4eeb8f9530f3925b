// AVX2 variants. Built only on x86-64 (this TU gets -mavx2; callers reach it
// through the runtime-dispatched table, never directly).

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "ltm/kernels.hpp"

namespace ltm::kernels {
namespace {

void scatter_accum_f64_avx2(const double* src, std::size_t src_stride,
                            const u32* rows, const i8* signs, std::size_t count,
                            std::size_t d, double* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const double* s = src + j * src_stride;
    double* o = out + static_cast<std::size_t>(rows[j]) * d;
    std::size_t c = 0;
    if (signs[j] > 0) {
      for (; c + 4 <= d; c += 4) {
        __m256d acc = _mm256_loadu_pd(o + c);
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(s + c));
        _mm256_storeu_pd(o + c, acc);
      }
      for (; c < d; ++c) o[c] += s[c];
    } else {
      for (; c + 4 <= d; c += 4) {
        __m256d acc = _mm256_loadu_pd(o + c);
        acc = _mm256_sub_pd(acc, _mm256_loadu_pd(s + c));
        _mm256_storeu_pd(o + c, acc);
      }
      for (; c < d; ++c) o[c] -= s[c];
    }
  }
}

void scatter_accum_u64_avx2(const u64* src, std::size_t src_stride,
                            const u32* rows, const i8* signs, std::size_t count,
                            std::size_t d, u64* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const u64* s = src + j * src_stride;
    u64* o = out + static_cast<std::size_t>(rows[j]) * d;
    std::size_t c = 0;
    if (signs[j] > 0) {
      for (; c + 4 <= d; c += 4) {
        __m256i acc = _mm256_loadu_si256(reinterpret_cast<__m256i*>(o + c));
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + c));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(o + c),
                            _mm256_add_epi64(acc, v));
      }
      for (; c < d; ++c) o[c] += s[c];
    } else {
      for (; c + 4 <= d; c += 4) {
        __m256i acc = _mm256_loadu_si256(reinterpret_cast<__m256i*>(o + c));
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + c));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(o + c),
                            _mm256_sub_epi64(acc, v));
      }
      for (; c < d; ++c) o[c] -= s[c];
    }
  }
}

void add_u64_avx2(const u64* a, const u64* b, u64* out, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_add_epi64(va, vb));
  }
  for (; i < count; ++i) out[i] = a[i] + b[i];
}

void sub_u64_avx2(const u64* a, const u64* b, u64* out, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_sub_epi64(va, vb));
  }
  for (; i < count; ++i) out[i] = a[i] - b[i];
}

// 1.5 * 2^52: adding it to |x| <= 2^51 forces round-to-nearest-even at
// integer granularity; the low bits then hold the signed integer result.
constexpr double kShifter = 6755399441055744.0;  // 1.5 * 2^52

void encode_fixed_avx2(const double* src, i32 frac_bits, u64* out,
                       std::size_t count) {
  const double scale_s = [&] {
    // ldexp without <cmath> in the vector path; frac_bits is small.
    double r = 1.0;
    for (i32 k = 0; k < frac_bits; ++k) r *= 2.0;
    for (i32 k = 0; k > frac_bits; --k) r *= 0.5;
    return r;
  }();
  const __m256d scale = _mm256_set1_pd(scale_s);
  const __m256d shifter = _mm256_set1_pd(kShifter);
  const __m256i shifter_bits = _mm256_castpd_si256(shifter);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    __m256d x = _mm256_mul_pd(_mm256_loadu_pd(src + i), scale);
    __m256i bits = _mm256_castpd_si256(_mm256_add_pd(x, shifter));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_sub_epi64(bits, shifter_bits));
  }
  for (; i < count; ++i) {
    double x = src[i] * scale_s;
    double y = x + kShifter;
    i64 bits;
    __builtin_memcpy(&bits, &y, 8);
    i64 magic;
    __builtin_memcpy(&magic, &kShifter, 8);
    out[i] = static_cast<u64>(bits - magic);
  }
}

void decode_fixed_avx2(const u64* src, i32 frac_bits, double* out,
                       std::size_t count) {
  const double inv_scale_s = [&] {
    double r = 1.0;
    for (i32 k = 0; k < frac_bits; ++k) r *= 0.5;
    for (i32 k = 0; k > frac_bits; --k) r *= 2.0;
    return r;
  }();
  const __m256d inv_scale = _mm256_set1_pd(inv_scale_s);
  const __m256d shifter = _mm256_set1_pd(kShifter);
  const __m256i shifter_bits = _mm256_castpd_si256(shifter);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    __m256d y = _mm256_castsi256_pd(_mm256_add_epi64(v, shifter_bits));
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_sub_pd(y, shifter), inv_scale));
  }
  for (; i < count; ++i) {
    i64 magic;
    __builtin_memcpy(&magic, &kShifter, 8);
    i64 bits = static_cast<i64>(src[i]) + magic;
    double y;
    __builtin_memcpy(&y, &bits, 8);
    out[i] = (y - kShifter) * inv_scale_s;
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops kAvx2{
      "avx2",        scatter_accum_f64_avx2, scatter_accum_u64_avx2,
      add_u64_avx2,  sub_u64_avx2,           encode_fixed_avx2,
      decode_fixed_avx2,
  };
  return kAvx2;
}

}  // namespace ltm::kernels

#endif  // x86-64

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ltm/common.hpp"

// Hot-loop kernels: a scalar reference implementation plus SIMD variants
// (AVX2 on x86-64, NEON on aarch64) selected at runtime. All variants are
// bit-identical to the scalar reference on their full input domain; the test
// suite enforces this. Set LTM_KERNELS=scalar|avx2|neon to force a backend.

namespace ltm::kernels {

struct Ops {
  const char* name;

  // out[rows[j]*d + c] += sign(j) * src[j*src_stride + c] for c in [0, d).
  // signs[j] is +1 or -1. out has row-major shape (max_row+1) x d.
  void (*scatter_accum_f64)(const double* src, std::size_t src_stride,
                            const u32* rows, const i8* signs, std::size_t count,
                            std::size_t d, double* out);

  // Same accumulation in the ring Z_2^64 (wrapping).
  void (*scatter_accum_u64)(const u64* src, std::size_t src_stride,
                            const u32* rows, const i8* signs, std::size_t count,
                            std::size_t d, u64* out);

  // Elementwise wrapping ring ops.
  void (*add_u64)(const u64* a, const u64* b, u64* out, std::size_t count);
  void (*sub_u64)(const u64* a, const u64* b, u64* out, std::size_t count);

  // Fixed-point codec: encode = round-to-nearest-even(v * 2^frac_bits) as a
  // two's-complement ring element; decode is the inverse on the signed
  // interpretation. Precondition: |v * 2^frac_bits| <= 2^50 for encode and
  // the signed value of the ring element within +-2^51 for decode (all SIMD
  // variants are exact on that domain).
  void (*encode_fixed)(const double* src, i32 frac_bits, u64* out,
                       std::size_t count);
  void (*decode_fixed)(const u64* src, i32 frac_bits, double* out,
                       std::size_t count);
};

// Active backend: best available unless overridden by LTM_KERNELS.
const Ops& ops();

// Scalar reference, always available.
const Ops& scalar_ops();

// Backends compiled in and supported by this CPU (scalar first).
std::vector<const Ops*> available_backends();

// nullptr when the named backend is unavailable.
const Ops* find_backend(const std::string& name);

}  // namespace ltm::kernels

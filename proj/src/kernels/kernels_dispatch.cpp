#include <cstdlib>

#include "ltm/kernels.hpp"

namespace ltm::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

std::vector<const Ops*> available_backends() {
  std::vector<const Ops*> v{&scalar_ops()};
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) v.push_back(&avx2_ops());
#endif
#if defined(__aarch64__)
  v.push_back(&neon_ops());
#endif
  return v;
}

const Ops* find_backend(const std::string& name) {
  for (const Ops* o : available_backends())
    if (name == o->name) return o;
  return nullptr;
}

const Ops& ops() {
  static const Ops* active = [] {
    if (const char* forced = std::getenv("LTM_KERNELS")) {
      const Ops* o = find_backend(forced);
      if (o == nullptr)
        throw ConfigError(std::string("LTM_KERNELS backend unavailable: ") +
                          forced);
      return o;
    }
    // Best available: last registered (scalar < avx2/neon).
    return available_backends().back();
  }();
  return *active;
}

}  // namespace ltm::kernels

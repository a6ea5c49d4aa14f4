#include <cstdlib>
#include <string_view>

#include "rsg/kernels.hpp"

namespace rsg::kernels {

const Table* avx2_table_impl();

const Table* avx2_table() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  static const Table& chosen = [] () -> const Table& {
    const char* env = std::getenv("RSG_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    const Table* t = avx2_table();
    return t != nullptr ? *t : scalar_table();
  }();
  return chosen;
}

}  // namespace rsg::kernels

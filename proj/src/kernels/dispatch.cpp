#include <cstdlib>
#include <string_view>

#include "tsys/kernels.hpp"

namespace tsys::kernels {

#if defined(TSYS_HAVE_AVX2)
const Table& avx2_table_impl() noexcept;
#endif

const Table* avx2_table() noexcept {
#if defined(TSYS_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &avx2_table_impl() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const Table& select() noexcept {
    const char* env = std::getenv("TSYS_SIMD");
    const std::string_view want = env ? env : "";
    if (want == "scalar") return scalar_table();
    if (const Table* t = avx2_table()) return *t;
    return scalar_table();
}

}  // namespace

const Table& active() noexcept {
    static const Table& t = select();
    return t;
}

}  // namespace tsys::kernels

#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace subdiff::kernels {

const KernelSet* avx2_kernels() noexcept {
#ifdef SUBDIFF_HAVE_AVX2
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    if (supported) return &detail::avx2_set();
#endif
    return nullptr;
}

const KernelSet& active() noexcept {
    static const KernelSet& chosen = []() -> const KernelSet& {
        const char* env = std::getenv("SUBDIFF_SIMD");
        if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
        if (const KernelSet* k = avx2_kernels()) return *k;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace subdiff::kernels

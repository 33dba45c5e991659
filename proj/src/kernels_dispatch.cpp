#include <cstdlib>
#include <string_view>

#include "hysid/kernels.hpp"

namespace hysid::kernels {

#ifndef HYSID_HAVE_AVX2
const KernelSet* avx2_kernels() noexcept { return nullptr; }
#endif

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(HYSID_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

namespace {
const KernelSet& select() noexcept {
    if (const char* forced = std::getenv("HYSID_KERNELS")) {
        if (std::string_view(forced) == "scalar") return scalar_kernels();
    }
    if (cpu_supports(Isa::Avx2) && avx2_kernels() != nullptr) return *avx2_kernels();
    return scalar_kernels();
}
}  // namespace

const KernelSet& active() noexcept {
    static const KernelSet& chosen = select();
    return chosen;
}

}  // namespace hysid::kernels

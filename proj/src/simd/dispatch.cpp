#include "mise/simd/kernels.hpp"

#include "mise/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace mise::simd {

#if defined(MISE_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(MISE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable* detect() {
    const char* env = std::getenv("MISE_SIMD");
    if (env != nullptr && std::string(env) == "scalar") return &scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return t;
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{detect()};
    return table;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(MISE_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    if (supported) return &avx2_kernel_table();
#endif
    return nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
    const KernelTable* table = isa == Isa::scalar ? &scalar_kernels() : avx2_kernels();
    if (table == nullptr) throw ConfigError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
    current().store(table, std::memory_order_release);
}

} // namespace mise::simd

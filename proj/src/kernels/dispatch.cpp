#include "rrlab/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace rrlab::kernels {
namespace {

bool cpu_supports_simd_backend() {
#if !defined(RRLAB_HAVE_SIMD_BACKEND)
    return false;
#elif defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    // On aarch64 the simd unit targets baseline NEON, always present.
    return true;
#endif
}

const Backend* resolve(const std::string& name) {
    if (name == "scalar") return &scalar_backend();
#if defined(RRLAB_HAVE_SIMD_BACKEND)
    if (name == "simd") {
        if (!cpu_supports_simd_backend())
            throw std::runtime_error("kernels: this CPU cannot run the simd backend");
        return &simd_backend();
    }
#endif
    if (name == "auto") {
#if defined(RRLAB_HAVE_SIMD_BACKEND)
        if (cpu_supports_simd_backend()) return &simd_backend();
#endif
        return &scalar_backend();
    }
    throw std::invalid_argument("kernels: unknown backend '" + name + "'");
}

std::atomic<const Backend*> g_active{nullptr};

const Backend* init_from_env() {
    const char* env = std::getenv("RELU_RANK_LAB_KERNELS");
    return resolve(env && *env ? env : "auto");
}

}  // namespace

const Backend& active() {
    const Backend* b = g_active.load(std::memory_order_acquire);
    if (!b) {
        b = init_from_env();
        g_active.store(b, std::memory_order_release);
    }
    return *b;
}

void force_backend(const std::string& name) {
    g_active.store(resolve(name), std::memory_order_release);
}

std::string active_name() { return active().name; }

}  // namespace rrlab::kernels

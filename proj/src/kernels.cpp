#include "resmask/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace resmask::kern {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve(Backend b) {
    switch (b) {
        case Backend::kScalar: return &scalar_ops();
        case Backend::kAvx2: return avx2_available() ? &avx2_ops() : &scalar_ops();
        case Backend::kAuto: break;
    }
    if (const char* env = std::getenv("RESMASK_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return &avx2_ops();
    }
    return avx2_available() ? &avx2_ops() : &scalar_ops();
}

}  // namespace

const Ops& ops() {
    const Ops* p = g_active.load(std::memory_order_acquire);
    if (!p) {
        p = resolve(Backend::kAuto);
        g_active.store(p, std::memory_order_release);
    }
    return *p;
}

const char* select_backend(Backend b) {
    const Ops* p = resolve(b);
    g_active.store(p, std::memory_order_release);
    return p->name;
}

}  // namespace resmask::kern

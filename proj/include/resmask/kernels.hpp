#pragma once

// Double-precision inner-loop kernels used by the tape and the trainer.
// Each entry has a scalar reference implementation and an AVX2+FMA variant;
// the active table is selected at runtime (or forced via RESMASK_KERNELS).

#include <cstddef>

namespace resmask::kern {

/// Kernel function table. Matrices are row-major. All routines accept n == 0.
struct Ops {
    const char* name;

    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);

    /// y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    /// out = x .* y
    void (*mul)(const double* x, const double* y, double* out, std::size_t n);
    /// out += x .* y
    void (*mul_acc)(const double* x, const double* y, double* out, std::size_t n);

    /// y = A x            (A: m x n)
    void (*matvec)(const double* a, std::size_t m, std::size_t n, const double* x, double* y);
    /// y += A x
    void (*matvec_acc)(const double* a, std::size_t m, std::size_t n, const double* x, double* y);
    /// y += A' g          (g: length m, y: length n)
    void (*matvec_t_acc)(const double* a, std::size_t m, std::size_t n, const double* g, double* y);
    /// A += g x'          (rank-1 update)
    void (*ger_acc)(double* a, std::size_t m, std::size_t n, const double* g, const double* x);
};

enum class Backend { kAuto, kScalar, kAvx2 };

/// Currently selected kernel table. First use auto-detects the host CPU;
/// the RESMASK_KERNELS environment variable (scalar|avx2) overrides.
/// Select before spawning worker threads.
const Ops& ops();

/// Force a backend. Returns the name of the table actually installed
/// (requesting AVX2 on a CPU without it falls back to scalar).
const char* select_backend(Backend b);

bool avx2_available();

const Ops& scalar_ops();
const Ops& avx2_ops();  // only valid when avx2_available()

}  // namespace resmask::kern

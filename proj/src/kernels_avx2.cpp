// AVX2+FMA kernels, 4 doubles per vector. Compiled with -mavx2 -mfma; only
// dispatched to when the host CPU supports both (see kernels.cpp).

#include "resmask/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace resmask::kern {
namespace {

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swap = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double v_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double r = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

double v_sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = hsum_pd(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

void v_axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void v_mul(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void v_mul_acc(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vo = _mm256_loadu_pd(out + i);
        vo = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), vo);
        _mm256_storeu_pd(out + i, vo);
    }
    for (; i < n; ++i) out[i] += x[i] * y[i];
}

// Four rows at a time so each load of x feeds four FMA chains.
template <bool Accumulate>
void v_matvec_impl(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const double* r0 = a + (i + 0) * n;
        const double* r1 = a + (i + 1) * n;
        const double* r2 = a + (i + 2) * n;
        const double* r3 = a + (i + 3) * n;
        __m256d s0 = _mm256_setzero_pd();
        __m256d s1 = _mm256_setzero_pd();
        __m256d s2 = _mm256_setzero_pd();
        __m256d s3 = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const __m256d vx = _mm256_loadu_pd(x + j);
            s0 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + j), vx, s0);
            s1 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + j), vx, s1);
            s2 = _mm256_fmadd_pd(_mm256_loadu_pd(r2 + j), vx, s2);
            s3 = _mm256_fmadd_pd(_mm256_loadu_pd(r3 + j), vx, s3);
        }
        double d0 = hsum_pd(s0), d1 = hsum_pd(s1), d2 = hsum_pd(s2), d3 = hsum_pd(s3);
        for (; j < n; ++j) {
            d0 += r0[j] * x[j];
            d1 += r1[j] * x[j];
            d2 += r2[j] * x[j];
            d3 += r3[j] * x[j];
        }
        if constexpr (Accumulate) {
            y[i] += d0; y[i + 1] += d1; y[i + 2] += d2; y[i + 3] += d3;
        } else {
            y[i] = d0; y[i + 1] = d1; y[i + 2] = d2; y[i + 3] = d3;
        }
    }
    for (; i < m; ++i) {
        double d = v_dot(a + i * n, x, n);
        if constexpr (Accumulate) y[i] += d; else y[i] = d;
    }
}

void v_matvec(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    v_matvec_impl<false>(a, m, n, x, y);
}

void v_matvec_acc(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    v_matvec_impl<true>(a, m, n, x, y);
}

void v_matvec_t_acc(const double* a, std::size_t m, std::size_t n, const double* g, double* y) {
    for (std::size_t i = 0; i < m; ++i) v_axpy(g[i], a + i * n, y, n);
}

void v_ger_acc(double* a, std::size_t m, std::size_t n, const double* g, const double* x) {
    for (std::size_t i = 0; i < m; ++i) v_axpy(g[i], x, a + i * n, n);
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops table{
        "avx2",   &v_dot,    &v_sum,        &v_axpy,         &v_mul,
        &v_mul_acc, &v_matvec, &v_matvec_acc, &v_matvec_t_acc, &v_ger_acc,
    };
    return table;
}

}  // namespace resmask::kern

#else  // non-x86: the dispatcher never hands this table out

namespace resmask::kern {
const Ops& avx2_ops() { return scalar_ops(); }
}  // namespace resmask::kern

#endif

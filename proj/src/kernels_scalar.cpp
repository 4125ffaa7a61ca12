// Reference kernels. These are the semantics the AVX2 variants are tested
// against; keep them as plain loops.

#include "resmask/kernels.hpp"

namespace resmask::kern {
namespace {

double s_dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double s_sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void s_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_mul(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void s_mul_acc(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] += x[i] * y[i];
}

void s_matvec(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    for (std::size_t i = 0; i < m; ++i) y[i] = s_dot(a + i * n, x, n);
}

void s_matvec_acc(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    for (std::size_t i = 0; i < m; ++i) y[i] += s_dot(a + i * n, x, n);
}

void s_matvec_t_acc(const double* a, std::size_t m, std::size_t n, const double* g, double* y) {
    for (std::size_t i = 0; i < m; ++i) s_axpy(g[i], a + i * n, y, n);
}

void s_ger_acc(double* a, std::size_t m, std::size_t n, const double* g, const double* x) {
    for (std::size_t i = 0; i < m; ++i) s_axpy(g[i], x, a + i * n, n);
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops table{
        "scalar", &s_dot,    &s_sum,        &s_axpy,         &s_mul,
        &s_mul_acc, &s_matvec, &s_matvec_acc, &s_matvec_t_acc, &s_ger_acc,
    };
    return table;
}

}  // namespace resmask::kern

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace resmask {

/// Row-major dense matrix.
struct DenseMat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    DenseMat() = default;
    DenseMat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

/// Compressed sparse rows. Values within a row are ordered by column.
struct CsrMat {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;  // length rows + 1
    std::vector<int> col;
    std::vector<double> val;

    std::size_t nnz() const { return val.size(); }
};

CsrMat csr_from_dense(const DenseMat& d);
DenseMat dense_from_csr(const CsrMat& m);
CsrMat csr_transpose(const CsrMat& m);

/// y = A x
void spmv(const CsrMat& a, const double* x, double* y);
/// y += A x
void spmv_acc(const CsrMat& a, const double* x, double* y);

/// FNV-1a over raw bytes; used for immutability audits of fixed tensors.
std::uint64_t fnv1a(const void* data, std::size_t bytes);
std::uint64_t fnv1a(std::span<const double> v);
std::uint64_t hash_csr(const CsrMat& m);

}  // namespace resmask

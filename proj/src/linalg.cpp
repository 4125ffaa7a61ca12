#include "resmask/linalg.hpp"

namespace resmask {

CsrMat csr_from_dense(const DenseMat& d) {
    CsrMat m;
    m.rows = d.rows;
    m.cols = d.cols;
    m.row_ptr.assign(static_cast<std::size_t>(d.rows) + 1, 0);
    for (int r = 0; r < d.rows; ++r) {
        for (int c = 0; c < d.cols; ++c) {
            double x = d.at(r, c);
            if (x != 0.0) {
                m.col.push_back(c);
                m.val.push_back(x);
            }
        }
        m.row_ptr[static_cast<std::size_t>(r) + 1] = static_cast<int>(m.val.size());
    }
    return m;
}

DenseMat dense_from_csr(const CsrMat& m) {
    DenseMat d(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r)
        for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
            d.at(r, m.col[k]) = m.val[k];
    return d;
}

CsrMat csr_transpose(const CsrMat& m) {
    CsrMat t;
    t.rows = m.cols;
    t.cols = m.rows;
    t.row_ptr.assign(static_cast<std::size_t>(t.rows) + 1, 0);
    t.col.resize(m.nnz());
    t.val.resize(m.nnz());
    for (std::size_t k = 0; k < m.nnz(); ++k) t.row_ptr[m.col[k] + 1]++;
    for (int r = 0; r < t.rows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
    std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (int r = 0; r < m.rows; ++r) {
        for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
            int pos = next[m.col[k]]++;
            t.col[pos] = r;
            t.val[pos] = m.val[k];
        }
    }
    return t;
}

void spmv(const CsrMat& a, const double* x, double* y) {
    for (int r = 0; r < a.rows; ++r) {
        double acc = 0.0;
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.val[k] * x[a.col[k]];
        y[r] = acc;
    }
}

void spmv_acc(const CsrMat& a, const double* x, double* y) {
    for (int r = 0; r < a.rows; ++r) {
        double acc = 0.0;
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.val[k] * x[a.col[k]];
        y[r] += acc;
    }
}

std::uint64_t fnv1a(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a(std::span<const double> v) {
    return fnv1a(v.data(), v.size_bytes());
}

std::uint64_t hash_csr(const CsrMat& m) {
    std::uint64_t h = fnv1a(m.val.data(), m.val.size() * sizeof(double));
    h ^= fnv1a(m.col.data(), m.col.size() * sizeof(int));
    h ^= fnv1a(m.row_ptr.data(), m.row_ptr.size() * sizeof(int)) * 0x9e3779b97f4a7c15ull;
    return h;
}

}  // namespace resmask

#pragma once

// Reverse-mode gradient engine. The primitive set is fixed to what the
// episode graph needs: affine maps, tanh/sigmoid/exp/log, hadamard products,
// mean/variance reductions, softmax, and scalar arithmetic. All values are
// 64-bit. Scalars are length-1 variables.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resmask/linalg.hpp"

namespace resmask::ad {

using VarId = std::int32_t;
inline constexpr VarId kNoVar = -1;

/// Trainable tensors, registered once per run and shared by the run's tapes.
/// Parameters are frozen while an episode tape is alive; updates happen
/// between episodes.
class ParamStore {
public:
    int add_matrix(std::string name, int rows, int cols);
    int add_vector(std::string name, int len) { return add_matrix(std::move(name), len, 1); }

    int count() const { return static_cast<int>(entries_.size()); }
    std::span<double> value(int pid) { return entries_[pid].v; }
    std::span<const double> value(int pid) const { return entries_[pid].v; }
    int rows(int pid) const { return entries_[pid].rows; }
    int cols(int pid) const { return entries_[pid].cols; }
    int size(int pid) const { return entries_[pid].rows * entries_[pid].cols; }
    const std::string& name(int pid) const { return entries_[pid].name; }
    std::size_t total_size() const;

private:
    struct Entry {
        std::string name;
        int rows, cols;
        std::vector<double> v;
    };
    std::vector<Entry> entries_;
};

/// Per-parameter gradient buffers, shaped like their parameters. Parameters
/// the loss never touches keep exactly-zero gradients.
class GradientTable {
public:
    void resize_like(const ParamStore& ps);
    void clear();
    std::span<double> grad(int pid) { return g_[pid]; }
    std::span<const double> grad(int pid) const { return g_[pid]; }
    int count() const { return static_cast<int>(g_.size()); }
    bool all_finite() const;

private:
    std::vector<std::vector<double>> g_;
};

/// Append-only record of one episode's forward computation, in topological
/// order. Single-threaded; independent tapes may live on different threads.
class Tape {
public:
    explicit Tape(const ParamStore* params) : params_(params) {}

    /// Drop all nodes and values; registered parameters are untouched.
    void reset();

    int size() const { return static_cast<int>(nodes_.size()); }
    int len(VarId v) const { return nodes_[v].len; }
    std::span<const double> value(VarId v) const;
    double scalar(VarId v) const;
    bool needs_grad(VarId v) const { return nodes_[v].needs_grad; }
    bool all_finite() const;

    // -- leaves --
    VarId constant(std::span<const double> v);
    VarId constant_scalar(double v);
    VarId param(int pid);  // vector parameter

    // -- linear maps --
    VarId affine(int pid_w, int pid_b, VarId x);              // W x + b; pid_b = -1 omits b
    VarId matvec(const DenseMat* a, VarId x);                 // A x, A fixed
    VarId spmv(const CsrMat* a, const CsrMat* a_t, VarId x);  // A x, A fixed sparse

    // -- elementwise / vector --
    VarId add(VarId x, VarId y);
    VarId sub_bcast(VarId x, VarId s);               // x - s
    VarId mul_bcast(VarId x, VarId s);               // x .* s
    VarId scale_shift(VarId x, double a, double c);  // a*x + c
    VarId clamp(VarId x, double lo, double hi);
    VarId tanh(VarId x);
    VarId sigmoid(VarId x);
    VarId exp(VarId x);
    VarId log(VarId x);
    VarId hadamard(VarId x, VarId y);
    VarId log_softmax(VarId x);
    VarId softmax(VarId x);  // exp(log_softmax(x)); positive, sums to 1

    // -- reductions & scalar arithmetic --
    VarId mean(VarId x);
    VarId variance(VarId x);  // population variance, composed from primitives
    VarId sum(VarId x);
    VarId dot(VarId x, VarId y);
    VarId pick(VarId x, int i);
    VarId sadd(VarId a, VarId b);
    VarId smul(VarId a, VarId b);
    VarId saffine(VarId s, double a, double c);  // a*s + c
    VarId rsqrt_shift(VarId s, double eps);      // 1/sqrt(s + eps)

    /// Reverse pass from a scalar loss. `out` is resized to the parameter
    /// store and fully zeroed first, so untouched parameters read as zero.
    /// Throws std::invalid_argument if the root is not a scalar.
    void backward(VarId loss, GradientTable& out);

    const ParamStore& params() const { return *params_; }

private:
    enum class Op : std::uint8_t {
        kConst, kParam, kAffine, kMatvecConst, kSpmvConst,
        kAdd, kSubBcast, kMulBcast, kScaleShift, kClamp,
        kTanh, kSigmoid, kExp, kLog, kHadamard, kLogSoftmax,
        kMean, kSum, kDot, kPick,
        kScalarAdd, kScalarMul, kScalarAffine, kRsqrtShift,
    };

    struct Node {
        Op op;
        VarId a = kNoVar, b = kNoVar;
        int pw = -1, pb = -1;            // parameter ids (kAffine, kParam)
        const DenseMat* cd = nullptr;    // kMatvecConst
        const CsrMat* cs = nullptr;      // kSpmvConst
        const CsrMat* cs_t = nullptr;    // transpose for the reverse pass
        double c0 = 0.0, c1 = 0.0;       // literal constants
        int idx = -1;                    // kPick
        std::uint32_t off = 0;
        std::int32_t len = 0;
        bool needs_grad = false;
    };

    VarId push(Node n);
    double* out_ptr(Node& n) { return values_.data() + n.off; }
    const double* ptr(VarId v) const { return values_.data() + nodes_[v].off; }
    VarId alloc(Op op, int len, VarId a, VarId b);
    VarId elementwise(Op op, VarId x);
    void check_len(VarId a, VarId b, const char* what) const;

    const ParamStore* params_;
    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<double> adj_;           // scratch for backward
    std::vector<std::uint8_t> has_adj_; // scratch for backward
};

}  // namespace resmask::ad

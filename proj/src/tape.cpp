#include "resmask/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "resmask/kernels.hpp"

namespace resmask::ad {

// ---------------------------------------------------------------- ParamStore

int ParamStore::add_matrix(std::string name, int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("parameter '" + name + "': bad shape");
    Entry e;
    e.name = std::move(name);
    e.rows = rows;
    e.cols = cols;
    e.v.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    entries_.push_back(std::move(e));
    return static_cast<int>(entries_.size()) - 1;
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.v.size();
    return n;
}

// ------------------------------------------------------------- GradientTable

void GradientTable::resize_like(const ParamStore& ps) {
    g_.resize(ps.count());
    for (int i = 0; i < ps.count(); ++i) g_[i].assign(ps.value(i).size(), 0.0);
}

void GradientTable::clear() {
    for (auto& g : g_) std::fill(g.begin(), g.end(), 0.0);
}

bool GradientTable::all_finite() const {
    for (const auto& g : g_)
        for (double x : g)
            if (!std::isfinite(x)) return false;
    return true;
}

// --------------------------------------------------------------------- Tape

void Tape::reset() {
    nodes_.clear();
    values_.clear();
}

std::span<const double> Tape::value(VarId v) const {
    const Node& n = nodes_[v];
    return {values_.data() + n.off, static_cast<std::size_t>(n.len)};
}

double Tape::scalar(VarId v) const {
    if (nodes_[v].len != 1) throw std::invalid_argument("scalar() on non-scalar variable");
    return values_[nodes_[v].off];
}

bool Tape::all_finite() const {
    for (double x : values_)
        if (!std::isfinite(x)) return false;
    return true;
}

VarId Tape::push(Node n) {
    nodes_.push_back(n);
    return static_cast<VarId>(nodes_.size()) - 1;
}

VarId Tape::alloc(Op op, int len, VarId a, VarId b) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.off = static_cast<std::uint32_t>(values_.size());
    n.len = len;
    n.needs_grad = (a != kNoVar && nodes_[a].needs_grad) || (b != kNoVar && nodes_[b].needs_grad);
    values_.resize(values_.size() + static_cast<std::size_t>(len), 0.0);
    return push(n);
}

void Tape::check_len(VarId a, VarId b, const char* what) const {
    if (nodes_[a].len != nodes_[b].len)
        throw std::invalid_argument(std::string(what) + ": length mismatch");
}

VarId Tape::constant(std::span<const double> v) {
    Node n;
    n.op = Op::kConst;
    n.off = static_cast<std::uint32_t>(values_.size());
    n.len = static_cast<std::int32_t>(v.size());
    values_.insert(values_.end(), v.begin(), v.end());
    return push(n);
}

VarId Tape::constant_scalar(double v) { return constant(std::span<const double>(&v, 1)); }

VarId Tape::param(int pid) {
    if (params_->cols(pid) != 1) throw std::invalid_argument("param(): vector parameters only");
    Node n;
    n.op = Op::kParam;
    n.pw = pid;
    n.off = static_cast<std::uint32_t>(values_.size());
    n.len = params_->rows(pid);
    n.needs_grad = true;
    auto v = params_->value(pid);
    values_.insert(values_.end(), v.begin(), v.end());
    return push(n);
}

VarId Tape::affine(int pid_w, int pid_b, VarId x) {
    const int m = params_->rows(pid_w);
    const int k = params_->cols(pid_w);
    if (k != nodes_[x].len) throw std::invalid_argument("affine: W columns != len(x)");
    if (pid_b >= 0 && (params_->cols(pid_b) != 1 || params_->rows(pid_b) != m))
        throw std::invalid_argument("affine: bias shape mismatch");
    VarId id = alloc(Op::kAffine, m, x, kNoVar);
    Node& n = nodes_[id];
    n.pw = pid_w;
    n.pb = pid_b;
    n.needs_grad = true;  // W (and b) are trainable
    kern::ops().matvec(params_->value(pid_w).data(), m, k, ptr(x), out_ptr(n));
    if (pid_b >= 0) kern::ops().axpy(1.0, params_->value(pid_b).data(), out_ptr(n), m);
    return id;
}

VarId Tape::matvec(const DenseMat* a, VarId x) {
    if (a->cols != nodes_[x].len) throw std::invalid_argument("matvec: A columns != len(x)");
    VarId id = alloc(Op::kMatvecConst, a->rows, x, kNoVar);
    Node& n = nodes_[id];
    n.cd = a;
    kern::ops().matvec(a->v.data(), a->rows, a->cols, ptr(x), out_ptr(n));
    return id;
}

VarId Tape::spmv(const CsrMat* a, const CsrMat* a_t, VarId x) {
    if (a->cols != nodes_[x].len) throw std::invalid_argument("spmv: A columns != len(x)");
    VarId id = alloc(Op::kSpmvConst, a->rows, x, kNoVar);
    Node& n = nodes_[id];
    n.cs = a;
    n.cs_t = a_t;
    resmask::spmv(*a, ptr(x), out_ptr(n));
    return id;
}

VarId Tape::add(VarId x, VarId y) {
    check_len(x, y, "add");
    VarId id = alloc(Op::kAdd, nodes_[x].len, x, y);
    Node& n = nodes_[id];
    const double* px = ptr(x);
    const double* py = ptr(y);
    double* o = out_ptr(n);
    for (int i = 0; i < n.len; ++i) o[i] = px[i] + py[i];
    return id;
}

VarId Tape::sub_bcast(VarId x, VarId s) {
    if (nodes_[s].len != 1) throw std::invalid_argument("sub_bcast: s must be scalar");
    VarId id = alloc(Op::kSubBcast, nodes_[x].len, x, s);
    Node& n = nodes_[id];
    const double* px = ptr(x);
    const double sv = values_[nodes_[s].off];
    double* o = out_ptr(n);
    for (int i = 0; i < n.len; ++i) o[i] = px[i] - sv;
    return id;
}

VarId Tape::mul_bcast(VarId x, VarId s) {
    if (nodes_[s].len != 1) throw std::invalid_argument("mul_bcast: s must be scalar");
    VarId id = alloc(Op::kMulBcast, nodes_[x].len, x, s);
    Node& n = nodes_[id];
    const double* px = ptr(x);
    const double sv = values_[nodes_[s].off];
    double* o = out_ptr(n);
    for (int i = 0; i < n.len; ++i) o[i] = px[i] * sv;
    return id;
}

VarId Tape::scale_shift(VarId x, double a, double c) {
    VarId id = alloc(Op::kScaleShift, nodes_[x].len, x, kNoVar);
    Node& n = nodes_[id];
    n.c0 = a;
    n.c1 = c;
    const double* px = ptr(x);
    double* o = out_ptr(n);
    for (int i = 0; i < n.len; ++i) o[i] = a * px[i] + c;
    return id;
}

VarId Tape::clamp(VarId x, double lo, double hi) {
    VarId id = alloc(Op::kClamp, nodes_[x].len, x, kNoVar);
    Node& n = nodes_[id];
    n.c0 = lo;
    n.c1 = hi;
    const double* px = ptr(x);
    double* o = out_ptr(n);
    for (int i = 0; i < n.len; ++i) o[i] = std::min(std::max(px[i], lo), hi);
    return id;
}

VarId Tape::elementwise(Op op, VarId x) {
    VarId id = alloc(op, nodes_[x].len, x, kNoVar);
    Node& n = nodes_[id];
    const double* px = ptr(x);
    double* o = out_ptr(n);
    switch (op) {
        case Op::kTanh:
            for (int i = 0; i < n.len; ++i) o[i] = std::tanh(px[i]);
            break;
        case Op::kSigmoid:
            // Split by sign so neither branch exponentiates a large positive value.
            for (int i = 0; i < n.len; ++i) {
                double z = px[i];
                if (z >= 0.0) {
                    o[i] = 1.0 / (1.0 + std::exp(-z));
                } else {
                    double e = std::exp(z);
                    o[i] = e / (1.0 + e);
                }
            }
            break;
        case Op::kExp:
            for (int i = 0; i < n.len; ++i) o[i] = std::exp(px[i]);
            break;
        case Op::kLog:
            for (int i = 0; i < n.len; ++i) o[i] = std::log(px[i]);
            break;
        default:
            throw std::logic_error("elementwise: bad op");
    }
    return id;
}

VarId Tape::tanh(VarId x) { return elementwise(Op::kTanh, x); }
VarId Tape::sigmoid(VarId x) { return elementwise(Op::kSigmoid, x); }
VarId Tape::exp(VarId x) { return elementwise(Op::kExp, x); }
VarId Tape::log(VarId x) { return elementwise(Op::kLog, x); }

VarId Tape::hadamard(VarId x, VarId y) {
    check_len(x, y, "hadamard");
    VarId id = alloc(Op::kHadamard, nodes_[x].len, x, y);
    Node& n = nodes_[id];
    kern::ops().mul(ptr(x), ptr(y), out_ptr(n), n.len);
    return id;
}

VarId Tape::log_softmax(VarId x) {
    if (nodes_[x].len < 1) throw std::invalid_argument("log_softmax: empty input");
    VarId id = alloc(Op::kLogSoftmax, nodes_[x].len, x, kNoVar);
    Node& n = nodes_[id];
    const double* px = ptr(x);
    double* o = out_ptr(n);
    double mx = px[0];
    for (int i = 1; i < n.len; ++i) mx = std::max(mx, px[i]);
    double s = 0.0;
    for (int i = 0; i < n.len; ++i) s += std::exp(px[i] - mx);
    const double lse = mx + std::log(s);
    for (int i = 0; i < n.len; ++i) o[i] = px[i] - lse;
    return id;
}

VarId Tape::softmax(VarId x) { return exp(log_softmax(x)); }

VarId Tape::mean(VarId x) {
    VarId id = alloc(Op::kMean, 1, x, kNoVar);
    Node& n = nodes_[id];
    const int len = nodes_[x].len;
    if (len == 0) throw std::invalid_argument("mean: empty input");
    *out_ptr(n) = kern::ops().sum(ptr(x), len) / len;
    return id;
}

VarId Tape::variance(VarId x) {
    VarId mu = mean(x);
    VarId centered = sub_bcast(x, mu);
    return mean(hadamard(centered, centered));
}

VarId Tape::sum(VarId x) {
    VarId id = alloc(Op::kSum, 1, x, kNoVar);
    Node& n = nodes_[id];
    *out_ptr(n) = kern::ops().sum(ptr(x), nodes_[x].len);
    return id;
}

VarId Tape::dot(VarId x, VarId y) {
    check_len(x, y, "dot");
    VarId id = alloc(Op::kDot, 1, x, y);
    Node& n = nodes_[id];
    *out_ptr(n) = kern::ops().dot(ptr(x), ptr(y), nodes_[x].len);
    return id;
}

VarId Tape::pick(VarId x, int i) {
    if (i < 0 || i >= nodes_[x].len) throw std::out_of_range("pick: index out of range");
    VarId id = alloc(Op::kPick, 1, x, kNoVar);
    Node& n = nodes_[id];
    n.idx = i;
    *out_ptr(n) = ptr(x)[i];
    return id;
}

VarId Tape::sadd(VarId a, VarId b) {
    if (nodes_[a].len != 1 || nodes_[b].len != 1)
        throw std::invalid_argument("sadd: scalar operands required");
    VarId id = alloc(Op::kScalarAdd, 1, a, b);
    Node& n = nodes_[id];
    *out_ptr(n) = values_[nodes_[a].off] + values_[nodes_[b].off];
    return id;
}

VarId Tape::smul(VarId a, VarId b) {
    if (nodes_[a].len != 1 || nodes_[b].len != 1)
        throw std::invalid_argument("smul: scalar operands required");
    VarId id = alloc(Op::kScalarMul, 1, a, b);
    Node& n = nodes_[id];
    *out_ptr(n) = values_[nodes_[a].off] * values_[nodes_[b].off];
    return id;
}

VarId Tape::saffine(VarId s, double a, double c) {
    if (nodes_[s].len != 1) throw std::invalid_argument("saffine: scalar operand required");
    VarId id = alloc(Op::kScalarAffine, 1, s, kNoVar);
    Node& n = nodes_[id];
    n.c0 = a;
    n.c1 = c;
    *out_ptr(n) = a * values_[nodes_[s].off] + c;
    return id;
}

VarId Tape::rsqrt_shift(VarId s, double eps) {
    if (nodes_[s].len != 1) throw std::invalid_argument("rsqrt_shift: scalar operand required");
    VarId id = alloc(Op::kRsqrtShift, 1, s, kNoVar);
    Node& n = nodes_[id];
    n.c0 = eps;
    *out_ptr(n) = 1.0 / std::sqrt(values_[nodes_[s].off] + eps);
    return id;
}

void Tape::backward(VarId loss, GradientTable& out) {
    if (loss < 0 || loss >= size()) throw std::invalid_argument("backward: bad root");
    if (nodes_[loss].len != 1) throw std::invalid_argument("backward: loss must be a scalar");

    out.resize_like(*params_);
    out.clear();
    if (!nodes_[loss].needs_grad) return;  // loss independent of every parameter

    adj_.assign(values_.size(), 0.0);
    has_adj_.assign(nodes_.size(), 0);
    adj_[nodes_[loss].off] = 1.0;
    has_adj_[loss] = 1;

    const auto& k = kern::ops();
    for (VarId i = static_cast<VarId>(nodes_.size()) - 1; i >= 0; --i) {
        const Node& n = nodes_[i];
        if (!n.needs_grad || !has_adj_[i]) continue;
        const double* g = adj_.data() + n.off;

        auto feed = [&](VarId v) -> double* {
            has_adj_[v] = 1;
            return adj_.data() + nodes_[v].off;
        };
        auto wants = [&](VarId v) { return v != kNoVar && nodes_[v].needs_grad; };

        switch (n.op) {
            case Op::kConst:
                break;
            case Op::kParam:
                k.axpy(1.0, g, out.grad(n.pw).data(), n.len);
                break;
            case Op::kAffine: {
                const int m = n.len;
                const int kk = nodes_[n.a].len;
                k.ger_acc(out.grad(n.pw).data(), m, kk, g, ptr(n.a));
                if (n.pb >= 0) k.axpy(1.0, g, out.grad(n.pb).data(), m);
                if (wants(n.a))
                    k.matvec_t_acc(params_->value(n.pw).data(), m, kk, g, feed(n.a));
                break;
            }
            case Op::kMatvecConst:
                if (wants(n.a)) k.matvec_t_acc(n.cd->v.data(), n.cd->rows, n.cd->cols, g, feed(n.a));
                break;
            case Op::kSpmvConst:
                if (wants(n.a)) spmv_acc(*n.cs_t, g, feed(n.a));
                break;
            case Op::kAdd:
                if (wants(n.a)) k.axpy(1.0, g, feed(n.a), n.len);
                if (wants(n.b)) k.axpy(1.0, g, feed(n.b), n.len);
                break;
            case Op::kSubBcast:
                if (wants(n.a)) k.axpy(1.0, g, feed(n.a), n.len);
                if (wants(n.b)) *feed(n.b) -= k.sum(g, n.len);
                break;
            case Op::kMulBcast: {
                const double sv = values_[nodes_[n.b].off];
                if (wants(n.a)) k.axpy(sv, g, feed(n.a), n.len);
                if (wants(n.b)) *feed(n.b) += k.dot(g, ptr(n.a), n.len);
                break;
            }
            case Op::kScaleShift:
                if (wants(n.a)) k.axpy(n.c0, g, feed(n.a), n.len);
                break;
            case Op::kClamp:
                if (wants(n.a)) {
                    double* da = feed(n.a);
                    const double* x = ptr(n.a);
                    for (int j = 0; j < n.len; ++j)
                        if (x[j] > n.c0 && x[j] < n.c1) da[j] += g[j];
                }
                break;
            case Op::kTanh:
                if (wants(n.a)) {
                    double* da = feed(n.a);
                    const double* y = values_.data() + n.off;
                    for (int j = 0; j < n.len; ++j) da[j] += g[j] * (1.0 - y[j] * y[j]);
                }
                break;
            case Op::kSigmoid:
                if (wants(n.a)) {
                    double* da = feed(n.a);
                    const double* y = values_.data() + n.off;
                    for (int j = 0; j < n.len; ++j) da[j] += g[j] * y[j] * (1.0 - y[j]);
                }
                break;
            case Op::kExp:
                if (wants(n.a)) k.mul_acc(g, values_.data() + n.off, feed(n.a), n.len);
                break;
            case Op::kLog:
                if (wants(n.a)) {
                    double* da = feed(n.a);
                    const double* x = ptr(n.a);
                    for (int j = 0; j < n.len; ++j) da[j] += g[j] / x[j];
                }
                break;
            case Op::kHadamard:
                if (wants(n.a)) k.mul_acc(g, ptr(n.b), feed(n.a), n.len);
                if (wants(n.b)) k.mul_acc(g, ptr(n.a), feed(n.b), n.len);
                break;
            case Op::kLogSoftmax:
                if (wants(n.a)) {
                    double* da = feed(n.a);
                    const double* y = values_.data() + n.off;
                    const double gs = k.sum(g, n.len);
                    for (int j = 0; j < n.len; ++j) da[j] += g[j] - std::exp(y[j]) * gs;
                }
                break;
            case Op::kMean:
                if (wants(n.a)) {
                    double* da = feed(n.a);
                    const double gv = g[0] / nodes_[n.a].len;
                    for (int j = 0; j < nodes_[n.a].len; ++j) da[j] += gv;
                }
                break;
            case Op::kSum:
                if (wants(n.a)) {
                    double* da = feed(n.a);
                    for (int j = 0; j < nodes_[n.a].len; ++j) da[j] += g[0];
                }
                break;
            case Op::kDot:
                if (wants(n.a)) k.axpy(g[0], ptr(n.b), feed(n.a), nodes_[n.a].len);
                if (wants(n.b)) k.axpy(g[0], ptr(n.a), feed(n.b), nodes_[n.b].len);
                break;
            case Op::kPick:
                if (wants(n.a)) feed(n.a)[n.idx] += g[0];
                break;
            case Op::kScalarAdd:
                if (wants(n.a)) *feed(n.a) += g[0];
                if (wants(n.b)) *feed(n.b) += g[0];
                break;
            case Op::kScalarMul:
                if (wants(n.a)) *feed(n.a) += g[0] * values_[nodes_[n.b].off];
                if (wants(n.b)) *feed(n.b) += g[0] * values_[nodes_[n.a].off];
                break;
            case Op::kScalarAffine:
                if (wants(n.a)) *feed(n.a) += g[0] * n.c0;
                break;
            case Op::kRsqrtShift:
                if (wants(n.a)) {
                    const double r = values_[n.off];
                    *feed(n.a) += g[0] * (-0.5 * r * r * r);
                }
                break;
        }
    }
}

}  // namespace resmask::ad

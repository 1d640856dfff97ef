#include "morl/tape.hpp"

#include <algorithm>
#include <cmath>

namespace morl {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        fail(std::string(op) + ": shape mismatch between " + a.shape_str() + " and " +
             b.shape_str());
}

}  // namespace

void Tape::check_var(Var v, const char* op) const {
    if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
        fail(std::string(op) + ": variable is not on this tape");
}

Var Tape::push(Node n, const char* op_name) {
    // Parameter leaves are validated by the optimizer on every step;
    // rescanning them per tape would dominate small-batch passes.
    if (!n.ref && !n.owned.all_finite())
        fail(std::string(op_name) + ": non-finite values in result");
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size() - 1)};
}

Var Tape::input(Tensor t) {
    Node n;
    n.op = Op::input;
    n.owned = std::move(t);
    return push(std::move(n), "input");
}

Var Tape::param(const Tensor& value, Tensor* grad) {
    if (grad) {
        require(value.same_shape(*grad), "param: value shape " + value.shape_str() +
                                             " does not match grad shape " + grad->shape_str());
    }
    Node n;
    n.op = Op::param;
    n.ref = &value;
    n.bound_grad = grad;
    return push(std::move(n), "param");
}

Var Tape::matmul(Var a, Var b) {
    check_var(a, "matmul");
    check_var(b, "matmul");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.rows())
        fail("matmul: incompatible shapes " + ta.shape_str() + " and " + tb.shape_str());
    Node n;
    n.op = Op::matmul;
    n.args = {a.id, b.id};
    n.owned = Tensor::zeros({ta.rows(), tb.cols()});
    detail::gemm_nn(n.owned.data.data(), ta.data.data(), tb.data.data(), ta.rows(), ta.cols(),
                    tb.cols(), false);
    return push(std::move(n), "matmul");
}

Var Tape::matmul_nt(Var a, Var b) {
    check_var(a, "matmul_nt");
    check_var(b, "matmul_nt");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.cols())
        fail("matmul_nt: incompatible shapes " + ta.shape_str() + " and " + tb.shape_str());
    Node n;
    n.op = Op::matmul_nt;
    n.args = {a.id, b.id};
    n.owned = Tensor::zeros({ta.rows(), tb.rows()});
    if (ta.rows() < 32) {
        detail::gemm_nt(n.owned.data.data(), ta.data.data(), tb.data.data(), ta.rows(),
                        ta.cols(), tb.rows(), false);
    } else {
        // One explicit transpose keeps wide multiplies on the fast
        // row-streaming kernel; b is a weight matrix, small next to the
        // activation batch.
        int bn = tb.rows(), bk = tb.cols();
        std::vector<double> bt(static_cast<size_t>(bk) * bn);
        for (int r = 0; r < bn; ++r)
            for (int c = 0; c < bk; ++c)
                bt[static_cast<size_t>(c) * bn + r] = tb.data[static_cast<size_t>(r) * bk + c];
        detail::gemm_nn(n.owned.data.data(), ta.data.data(), bt.data(), ta.rows(), ta.cols(),
                        bn, false);
    }
    return push(std::move(n), "matmul_nt");
}

Var Tape::add(Var a, Var b) {
    check_var(a, "add");
    check_var(b, "add");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    check_same_shape(ta, tb, "add");
    Node n;
    n.op = Op::add;
    n.args = {a.id, b.id};
    n.owned = ta;
    for (size_t i = 0; i < tb.size(); ++i) n.owned.data[i] += tb.data[i];
    return push(std::move(n), "add");
}

Var Tape::sub(Var a, Var b) {
    check_var(a, "sub");
    check_var(b, "sub");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    check_same_shape(ta, tb, "sub");
    Node n;
    n.op = Op::sub;
    n.args = {a.id, b.id};
    n.owned = ta;
    for (size_t i = 0; i < tb.size(); ++i) n.owned.data[i] -= tb.data[i];
    return push(std::move(n), "sub");
}

Var Tape::mul(Var a, Var b) {
    check_var(a, "mul");
    check_var(b, "mul");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    check_same_shape(ta, tb, "mul");
    Node n;
    n.op = Op::mul;
    n.args = {a.id, b.id};
    n.owned = ta;
    for (size_t i = 0; i < tb.size(); ++i) n.owned.data[i] *= tb.data[i];
    return push(std::move(n), "mul");
}

Var Tape::add_rowvec(Var a, Var b) {
    check_var(a, "add_rowvec");
    check_var(b, "add_rowvec");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    if (ta.rank() != 2 || static_cast<size_t>(ta.cols()) != tb.size())
        fail("add_rowvec: incompatible shapes " + ta.shape_str() + " and " + tb.shape_str());
    Node n;
    n.op = Op::add_rowvec;
    n.args = {a.id, b.id};
    n.owned = ta;
    for (int r = 0; r < ta.rows(); ++r)
        for (int c = 0; c < ta.cols(); ++c) n.owned.data[static_cast<size_t>(r) * ta.cols() + c] += tb.data[c];
    return push(std::move(n), "add_rowvec");
}

Var Tape::scale(Var a, double c) {
    check_var(a, "scale");
    Node n;
    n.op = Op::scale;
    n.args = {a.id};
    n.c0 = c;
    n.owned = val(a.id);
    for (double& v : n.owned.data) v *= c;
    return push(std::move(n), "scale");
}

Var Tape::relu(Var a) {
    check_var(a, "relu");
    Node n;
    n.op = Op::relu;
    n.args = {a.id};
    n.owned = val(a.id);
    for (double& v : n.owned.data) v = v > 0 ? v : 0.0;
    return push(std::move(n), "relu");
}

Var Tape::sigmoid(Var a) {
    check_var(a, "sigmoid");
    Node n;
    n.op = Op::sigmoid;
    n.args = {a.id};
    n.owned = val(a.id);
    for (double& v : n.owned.data) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(n), "sigmoid");
}

Var Tape::exp(Var a) {
    check_var(a, "exp");
    Node n;
    n.op = Op::exp;
    n.args = {a.id};
    n.owned = val(a.id);
    for (double& v : n.owned.data) v = std::exp(v);
    return push(std::move(n), "exp");
}

Var Tape::log(Var a) {
    check_var(a, "log");
    Node n;
    n.op = Op::log;
    n.args = {a.id};
    n.owned = val(a.id);
    for (double& v : n.owned.data) v = std::log(v);
    return push(std::move(n), "log");
}

Var Tape::square(Var a) {
    check_var(a, "square");
    Node n;
    n.op = Op::square;
    n.args = {a.id};
    n.owned = val(a.id);
    for (double& v : n.owned.data) v = v * v;
    return push(std::move(n), "square");
}

Var Tape::softmax_rows(Var a) {
    check_var(a, "softmax_rows");
    const Tensor& ta = val(a.id);
    require(ta.rank() == 2, "softmax_rows: expected rank-2 input, got " + ta.shape_str());
    Node n;
    n.op = Op::softmax_rows;
    n.args = {a.id};
    n.owned = ta;
    int cols = ta.cols();
    for (int r = 0; r < ta.rows(); ++r) {
        double* row = n.owned.data.data() + static_cast<size_t>(r) * cols;
        double mx = row[0];
        for (int c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
        double sum = 0;
        for (int c = 0; c < cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        for (int c = 0; c < cols; ++c) row[c] /= sum;
    }
    return push(std::move(n), "softmax_rows");
}

Var Tape::log_softmax_rows(Var a) {
    check_var(a, "log_softmax_rows");
    const Tensor& ta = val(a.id);
    require(ta.rank() == 2, "log_softmax_rows: expected rank-2 input, got " + ta.shape_str());
    Node n;
    n.op = Op::log_softmax_rows;
    n.args = {a.id};
    n.owned = ta;
    int cols = ta.cols();
    for (int r = 0; r < ta.rows(); ++r) {
        double* row = n.owned.data.data() + static_cast<size_t>(r) * cols;
        double mx = row[0];
        for (int c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
        double sum = 0;
        for (int c = 0; c < cols; ++c) sum += std::exp(row[c] - mx);
        double lse = mx + std::log(sum);
        for (int c = 0; c < cols; ++c) row[c] -= lse;
    }
    return push(std::move(n), "log_softmax_rows");
}

Var Tape::sum(Var a) {
    check_var(a, "sum");
    double s = 0;
    for (double v : val(a.id).data) s += v;
    Node n;
    n.op = Op::sum;
    n.args = {a.id};
    n.owned = Tensor::scalar(s);
    return push(std::move(n), "sum");
}

Var Tape::mean(Var a) {
    check_var(a, "mean");
    const Tensor& ta = val(a.id);
    require(ta.size() > 0, "mean: empty tensor");
    double s = 0;
    for (double v : ta.data) s += v;
    Node n;
    n.op = Op::mean;
    n.args = {a.id};
    n.owned = Tensor::scalar(s / static_cast<double>(ta.size()));
    return push(std::move(n), "mean");
}

Var Tape::dot(Var a, Var b) {
    check_var(a, "dot");
    check_var(b, "dot");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    require(ta.size() == tb.size(), "dot: size mismatch between " + ta.shape_str() + " and " +
                                        tb.shape_str());
    double s = 0;
    for (size_t i = 0; i < ta.size(); ++i) s += ta.data[i] * tb.data[i];
    Node n;
    n.op = Op::dot;
    n.args = {a.id, b.id};
    n.owned = Tensor::scalar(s);
    return push(std::move(n), "dot");
}

Var Tape::row_sum(Var a) {
    check_var(a, "row_sum");
    const Tensor& ta = val(a.id);
    require(ta.rank() == 2, "row_sum: expected rank-2 input, got " + ta.shape_str());
    Node n;
    n.op = Op::row_sum;
    n.args = {a.id};
    n.owned = Tensor::zeros({ta.rows(), 1});
    for (int r = 0; r < ta.rows(); ++r) {
        double s = 0;
        for (int c = 0; c < ta.cols(); ++c) s += ta.at(r, c);
        n.owned.data[r] = s;
    }
    return push(std::move(n), "row_sum");
}

Var Tape::clip(Var a, double lo, double hi) {
    check_var(a, "clip");
    require(lo <= hi, "clip: lo must not exceed hi");
    Node n;
    n.op = Op::clip;
    n.args = {a.id};
    n.c0 = lo;
    n.c1 = hi;
    n.owned = val(a.id);
    for (double& v : n.owned.data) v = std::min(std::max(v, lo), hi);
    return push(std::move(n), "clip");
}

Var Tape::min_elts(Var a, Var b) {
    check_var(a, "min_elts");
    check_var(b, "min_elts");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    check_same_shape(ta, tb, "min_elts");
    Node n;
    n.op = Op::min_elts;
    n.args = {a.id, b.id};
    n.owned = ta;
    for (size_t i = 0; i < tb.size(); ++i) n.owned.data[i] = std::min(ta.data[i], tb.data[i]);
    return push(std::move(n), "min_elts");
}

Var Tape::weighted_sum(std::span<const Var> xs, Var w) {
    require(!xs.empty(), "weighted_sum: needs at least one tensor");
    check_var(w, "weighted_sum");
    const Tensor& tw = val(w.id);
    const Tensor& first = val(xs[0].id);
    require(tw.rank() == 2 && tw.cols() == static_cast<int>(xs.size()),
            "weighted_sum: weights " + tw.shape_str() + " do not match " +
                std::to_string(xs.size()) + " inputs");
    bool broadcast = tw.rows() == 1;
    require(broadcast || tw.rows() == first.rows(),
            "weighted_sum: weights " + tw.shape_str() + " do not match inputs " +
                first.shape_str());
    Node n;
    n.op = Op::weighted_sum;
    for (Var x : xs) {
        check_var(x, "weighted_sum");
        check_same_shape(val(x.id), first, "weighted_sum");
        n.args.push_back(x.id);
    }
    n.args.push_back(w.id);
    n.owned = Tensor::zeros(first.shape);
    int rows = first.rows(), cols = first.cols();
    for (size_t i = 0; i < xs.size(); ++i) {
        const Tensor& tx = val(xs[i].id);
        for (int r = 0; r < rows; ++r) {
            double wv = tw.at(broadcast ? 0 : r, static_cast<int>(i));
            const double* xrow = tx.data.data() + static_cast<size_t>(r) * cols;
            double* orow = n.owned.data.data() + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) orow[c] += wv * xrow[c];
        }
    }
    return push(std::move(n), "weighted_sum");
}

Var Tape::concat_cols(Var a, Var b) {
    check_var(a, "concat_cols");
    check_var(b, "concat_cols");
    const Tensor& ta = val(a.id);
    const Tensor& tb = val(b.id);
    require(ta.rank() == 2 && tb.rank() == 2 && ta.rows() == tb.rows(),
            "concat_cols: incompatible shapes " + ta.shape_str() + " and " + tb.shape_str());
    Node n;
    n.op = Op::concat_cols;
    n.args = {a.id, b.id};
    n.owned = Tensor::zeros({ta.rows(), ta.cols() + tb.cols()});
    for (int r = 0; r < ta.rows(); ++r) {
        for (int c = 0; c < ta.cols(); ++c) n.owned.at(r, c) = ta.at(r, c);
        for (int c = 0; c < tb.cols(); ++c) n.owned.at(r, ta.cols() + c) = tb.at(r, c);
    }
    return push(std::move(n), "concat_cols");
}

Var Tape::select_col(Var a, const std::vector<int>& idx) {
    check_var(a, "select_col");
    const Tensor& ta = val(a.id);
    require(ta.rank() == 2 && static_cast<size_t>(ta.rows()) == idx.size(),
            "select_col: index count " + std::to_string(idx.size()) + " does not match rows of " +
                ta.shape_str());
    Node n;
    n.op = Op::select_col;
    n.args = {a.id};
    n.index = idx;
    n.owned = Tensor::zeros({ta.rows(), 1});
    for (int r = 0; r < ta.rows(); ++r) {
        require(idx[r] >= 0 && idx[r] < ta.cols(),
                "select_col: index " + std::to_string(idx[r]) + " out of range for " +
                    ta.shape_str());
        n.owned.data[r] = ta.at(r, idx[r]);
    }
    return push(std::move(n), "select_col");
}

Var Tape::generated_affine(Var gen, Var feat, int out_dim) {
    check_var(gen, "generated_affine");
    check_var(feat, "generated_affine");
    const Tensor& tg = val(gen.id);
    const Tensor& tf = val(feat.id);
    require(tg.rank() == 2 && tf.rank() == 2 && tg.rows() == tf.rows(),
            "generated_affine: incompatible shapes " + tg.shape_str() + " and " + tf.shape_str());
    int f = tf.cols();
    require(tg.cols() == (f + 1) * out_dim,
            "generated_affine: generator " + tg.shape_str() + " does not hold " +
                std::to_string(out_dim) + " rows of width " + std::to_string(f) + " plus bias");
    Node n;
    n.op = Op::generated_affine;
    n.args = {gen.id, feat.id};
    n.out_dim = out_dim;
    n.owned = Tensor::zeros({tg.rows(), out_dim});
    for (int r = 0; r < tg.rows(); ++r) {
        const double* g = tg.data.data() + static_cast<size_t>(r) * tg.cols();
        const double* x = tf.data.data() + static_cast<size_t>(r) * f;
        double* o = n.owned.data.data() + static_cast<size_t>(r) * out_dim;
        for (int k = 0; k < out_dim; ++k) {
            double acc = g[f * out_dim + k];  // bias block after the matrix block
            const double* wrow = g + static_cast<size_t>(k) * f;
            for (int c = 0; c < f; ++c) acc += wrow[c] * x[c];
            o[k] = acc;
        }
    }
    return push(std::move(n), "generated_affine");
}

const Tensor& Tape::value(Var v) const {
    check_var(v, "value");
    return val(v.id);
}

void Tape::backward_scalar(Var output) {
    check_var(output, "backward");
    require(val(output.id).size() == 1, "backward_scalar: output must be a scalar, got " +
                                            val(output.id).shape_str());
    backward(output, Tensor::scalar(1.0));
}

void Tape::backward(Var output, const Tensor& seed) {
    require(!nodes_.empty(), "backward called before any forward computation");
    check_var(output, "backward");
    const Tensor& out = val(output.id);
    require(seed.same_shape(out), "backward: seed shape " + seed.shape_str() +
                                      " does not match output shape " + out.shape_str());

    // Bound parameter leaves accumulate in place; everything else gets a
    // scratch buffer. The output's seed always lands in scratch so repeated
    // calls keep plain accumulation semantics for the bound buffers.
    std::vector<Tensor> scratch(nodes_.size());
    std::vector<Tensor*> grads(nodes_.size(), nullptr);
    std::vector<char> needed(nodes_.size(), 0);
    needed[output.id] = 1;
    for (int id = output.id; id >= 0; --id) {
        if (!needed[id]) continue;
        for (int a : nodes_[id].args) needed[a] = 1;
    }
    for (size_t id = 0; id < nodes_.size(); ++id) {
        if (!needed[id]) continue;
        Node& n = nodes_[id];
        if (n.op == Op::param && n.bound_grad && static_cast<int>(id) != output.id) {
            grads[id] = n.bound_grad;
        } else {
            scratch[id] = Tensor::zeros(val(static_cast<int>(id)).shape);
            grads[id] = &scratch[id];
        }
    }
    scratch[output.id] = seed;

    for (int id = output.id; id >= 0; --id) {
        if (!needed[id]) continue;
        const Node& n = nodes_[id];
        const Tensor& g = *grads[id];
        switch (n.op) {
            case Op::input:
                break;
            case Op::param:
                if (n.bound_grad && grads[id] != n.bound_grad)
                    for (size_t i = 0; i < g.size(); ++i) n.bound_grad->data[i] += g.data[i];
                break;
            case Op::matmul: {
                const Tensor& a = val(n.args[0]);
                const Tensor& b = val(n.args[1]);
                // dA += dC*B^T, dB += A^T*dC
                detail::gemm_nt(grads[n.args[0]]->data.data(), g.data.data(), b.data.data(),
                                a.rows(), b.cols(), a.cols(), true);
                detail::gemm_tn(grads[n.args[1]]->data.data(), a.data.data(), g.data.data(),
                                a.rows(), a.cols(), b.cols(), true);
                break;
            }
            case Op::matmul_nt: {
                const Tensor& a = val(n.args[0]);
                const Tensor& b = val(n.args[1]);
                // dA += dC*B, dB += dC^T*A
                detail::gemm_nn(grads[n.args[0]]->data.data(), g.data.data(), b.data.data(),
                                a.rows(), b.rows(), a.cols(), true);
                detail::gemm_tn(grads[n.args[1]]->data.data(), g.data.data(), a.data.data(),
                                a.rows(), b.rows(), a.cols(), true);
                break;
            }
            case Op::add:
                for (size_t i = 0; i < g.size(); ++i) {
                    grads[n.args[0]]->data[i] += g.data[i];
                    grads[n.args[1]]->data[i] += g.data[i];
                }
                break;
            case Op::sub:
                for (size_t i = 0; i < g.size(); ++i) {
                    grads[n.args[0]]->data[i] += g.data[i];
                    grads[n.args[1]]->data[i] -= g.data[i];
                }
                break;
            case Op::mul: {
                const Tensor& a = val(n.args[0]);
                const Tensor& b = val(n.args[1]);
                for (size_t i = 0; i < g.size(); ++i) {
                    grads[n.args[0]]->data[i] += g.data[i] * b.data[i];
                    grads[n.args[1]]->data[i] += g.data[i] * a.data[i];
                }
                break;
            }
            case Op::add_rowvec: {
                const Tensor& a = val(n.args[0]);
                Tensor& gb = *grads[n.args[1]];
                for (int r = 0; r < a.rows(); ++r)
                    for (int c = 0; c < a.cols(); ++c) {
                        double gv = g.data[static_cast<size_t>(r) * a.cols() + c];
                        grads[n.args[0]]->data[static_cast<size_t>(r) * a.cols() + c] += gv;
                        gb.data[c] += gv;
                    }
                break;
            }
            case Op::scale:
                for (size_t i = 0; i < g.size(); ++i) grads[n.args[0]]->data[i] += n.c0 * g.data[i];
                break;
            case Op::relu: {
                const Tensor& a = val(n.args[0]);
                for (size_t i = 0; i < g.size(); ++i)
                    if (a.data[i] > 0) grads[n.args[0]]->data[i] += g.data[i];
                break;
            }
            case Op::sigmoid:
                for (size_t i = 0; i < g.size(); ++i) {
                    double y = n.owned.data[i];
                    grads[n.args[0]]->data[i] += g.data[i] * y * (1.0 - y);
                }
                break;
            case Op::exp:
                for (size_t i = 0; i < g.size(); ++i)
                    grads[n.args[0]]->data[i] += g.data[i] * n.owned.data[i];
                break;
            case Op::log: {
                const Tensor& a = val(n.args[0]);
                for (size_t i = 0; i < g.size(); ++i)
                    grads[n.args[0]]->data[i] += g.data[i] / a.data[i];
                break;
            }
            case Op::square: {
                const Tensor& a = val(n.args[0]);
                for (size_t i = 0; i < g.size(); ++i)
                    grads[n.args[0]]->data[i] += 2.0 * a.data[i] * g.data[i];
                break;
            }
            case Op::softmax_rows: {
                const Tensor& y = n.owned;
                int cols = y.cols();
                for (int r = 0; r < y.rows(); ++r) {
                    const double* yr = y.data.data() + static_cast<size_t>(r) * cols;
                    const double* gr = g.data.data() + static_cast<size_t>(r) * cols;
                    double dotv = 0;
                    for (int c = 0; c < cols; ++c) dotv += yr[c] * gr[c];
                    double* out = grads[n.args[0]]->data.data() + static_cast<size_t>(r) * cols;
                    for (int c = 0; c < cols; ++c) out[c] += yr[c] * (gr[c] - dotv);
                }
                break;
            }
            case Op::log_softmax_rows: {
                const Tensor& y = n.owned;
                int cols = y.cols();
                for (int r = 0; r < y.rows(); ++r) {
                    const double* yr = y.data.data() + static_cast<size_t>(r) * cols;
                    const double* gr = g.data.data() + static_cast<size_t>(r) * cols;
                    double sumg = 0;
                    for (int c = 0; c < cols; ++c) sumg += gr[c];
                    double* out = grads[n.args[0]]->data.data() + static_cast<size_t>(r) * cols;
                    for (int c = 0; c < cols; ++c) out[c] += gr[c] - std::exp(yr[c]) * sumg;
                }
                break;
            }
            case Op::sum:
                for (double& v : grads[n.args[0]]->data) v += g.data[0];
                break;
            case Op::mean: {
                double s = g.data[0] / static_cast<double>(grads[n.args[0]]->size());
                for (double& v : grads[n.args[0]]->data) v += s;
                break;
            }
            case Op::dot: {
                const Tensor& a = val(n.args[0]);
                const Tensor& b = val(n.args[1]);
                for (size_t i = 0; i < a.size(); ++i) {
                    grads[n.args[0]]->data[i] += g.data[0] * b.data[i];
                    grads[n.args[1]]->data[i] += g.data[0] * a.data[i];
                }
                break;
            }
            case Op::row_sum: {
                Tensor& ga = *grads[n.args[0]];
                int cols = ga.cols();
                for (int r = 0; r < ga.rows(); ++r)
                    for (int c = 0; c < cols; ++c)
                        ga.data[static_cast<size_t>(r) * cols + c] += g.data[r];
                break;
            }
            case Op::clip: {
                const Tensor& a = val(n.args[0]);
                for (size_t i = 0; i < g.size(); ++i)
                    if (a.data[i] > n.c0 && a.data[i] < n.c1)
                        grads[n.args[0]]->data[i] += g.data[i];
                break;
            }
            case Op::min_elts: {
                const Tensor& a = val(n.args[0]);
                const Tensor& b = val(n.args[1]);
                for (size_t i = 0; i < g.size(); ++i) {
                    if (a.data[i] <= b.data[i])
                        grads[n.args[0]]->data[i] += g.data[i];
                    else
                        grads[n.args[1]]->data[i] += g.data[i];
                }
                break;
            }
            case Op::weighted_sum: {
                int nx = static_cast<int>(n.args.size()) - 1;
                const Tensor& w = val(n.args[nx]);
                bool broadcast = w.rows() == 1;
                const Tensor& first = val(n.args[0]);
                int rows = first.rows(), cols = first.cols();
                Tensor& gw = *grads[n.args[nx]];
                for (int i = 0; i < nx; ++i) {
                    const Tensor& x = val(n.args[i]);
                    Tensor& gx = *grads[n.args[i]];
                    for (int r = 0; r < rows; ++r) {
                        double wv = w.at(broadcast ? 0 : r, i);
                        const double* grow = g.data.data() + static_cast<size_t>(r) * cols;
                        const double* xrow = x.data.data() + static_cast<size_t>(r) * cols;
                        double* gxrow = gx.data.data() + static_cast<size_t>(r) * cols;
                        double acc = 0;
                        for (int c = 0; c < cols; ++c) {
                            gxrow[c] += wv * grow[c];
                            acc += xrow[c] * grow[c];
                        }
                        gw.at(broadcast ? 0 : r, i) += acc;
                    }
                }
                break;
            }
            case Op::concat_cols: {
                Tensor& ga = *grads[n.args[0]];
                Tensor& gb = *grads[n.args[1]];
                int ca = ga.cols(), cb = gb.cols();
                for (int r = 0; r < ga.rows(); ++r) {
                    for (int c = 0; c < ca; ++c) ga.at(r, c) += g.at(r, c);
                    for (int c = 0; c < cb; ++c) gb.at(r, c) += g.at(r, ca + c);
                }
                break;
            }
            case Op::select_col: {
                Tensor& ga = *grads[n.args[0]];
                for (int r = 0; r < ga.rows(); ++r) ga.at(r, n.index[r]) += g.data[r];
                break;
            }
            case Op::generated_affine: {
                const Tensor& tg = val(n.args[0]);
                const Tensor& tf = val(n.args[1]);
                Tensor& ggen = *grads[n.args[0]];
                Tensor& gfeat = *grads[n.args[1]];
                int f = tf.cols();
                int out_dim = n.out_dim;
                for (int r = 0; r < tg.rows(); ++r) {
                    const double* gv = g.data.data() + static_cast<size_t>(r) * out_dim;
                    const double* gen = tg.data.data() + static_cast<size_t>(r) * tg.cols();
                    const double* x = tf.data.data() + static_cast<size_t>(r) * f;
                    double* dgen = ggen.data.data() + static_cast<size_t>(r) * tg.cols();
                    double* dx = gfeat.data.data() + static_cast<size_t>(r) * f;
                    for (int k = 0; k < out_dim; ++k) {
                        double gk = gv[k];
                        dgen[f * out_dim + k] += gk;
                        double* dwrow = dgen + static_cast<size_t>(k) * f;
                        const double* wrow = gen + static_cast<size_t>(k) * f;
                        for (int c = 0; c < f; ++c) {
                            dwrow[c] += gk * x[c];
                            dx[c] += gk * wrow[c];
                        }
                    }
                }
                break;
            }
        }
    }
}

}  // namespace morl

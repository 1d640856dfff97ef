#pragma once

#include <span>
#include <string>
#include <vector>

#include "morl/tensor.hpp"

namespace morl {

// Handle to a node on a Tape.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Define-by-run reverse-mode tape over dense tensors. Values are computed
// eagerly as nodes are created; backward() replays the tape in reverse and
// accumulates into the gradient buffers bound to param() leaves.
//
// Every exposed operation validates shapes and rejects non-finite results.
// Leaf tensors bound via param() are referenced, not copied; they must
// outlive the tape.
class Tape {
public:
    // Constant leaf; the tensor is copied into the tape.
    Var input(Tensor t);

    // Trainable leaf referencing external storage. grad may be null for
    // inference-only passes; when set, backward() accumulates into it.
    Var param(const Tensor& value, Tensor* grad);

    Var matmul(Var a, Var b);     // [m,k]*[k,n]
    Var matmul_nt(Var a, Var b);  // [m,k]*[n,k]^T
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var add_rowvec(Var a, Var b);  // a[m,n] + broadcast b[n]
    Var scale(Var a, double c);
    Var relu(Var a);
    Var sigmoid(Var a);
    Var exp(Var a);
    Var log(Var a);
    Var square(Var a);
    Var softmax_rows(Var a);
    Var log_softmax_rows(Var a);
    Var sum(Var a);   // -> [1]
    Var mean(Var a);  // -> [1]
    Var dot(Var a, Var b);
    Var row_sum(Var a);  // [m,n] -> [m,1]
    Var clip(Var a, double lo, double hi);
    Var min_elts(Var a, Var b);  // ties take a's gradient
    // out[r,c] = sum_i w[r,i] * xs[i][r,c]; w may also be a single row [1,K].
    Var weighted_sum(std::span<const Var> xs, Var w);
    Var concat_cols(Var a, Var b);
    // out[r,0] = a[r, idx[r]]
    Var select_col(Var a, const std::vector<int>& idx);
    // Per-row generated affine map: gen[r] holds a row-major [out_dim x f]
    // matrix followed by an out_dim bias; out[r,o] = W_r feat[r] + b_r.
    Var generated_affine(Var gen, Var feat, int out_dim);

    const Tensor& value(Var v) const;
    size_t num_nodes() const { return nodes_.size(); }

    // Accumulates d(output)/d(leaf) into every bound grad buffer.
    // seed must match the output's shape. Internal gradients are fresh per
    // call; repeated calls keep accumulating into the leaf buffers.
    void backward(Var output, const Tensor& seed);
    void backward_scalar(Var output);  // seed = 1, output must be [1]

private:
    enum class Op {
        input, param, matmul, matmul_nt, add, sub, mul, add_rowvec, scale, relu,
        sigmoid, exp, log, square, softmax_rows, log_softmax_rows, sum, mean,
        dot, row_sum, clip, min_elts, weighted_sum, concat_cols, select_col,
        generated_affine,
    };

    struct Node {
        Op op;
        Tensor owned;               // value storage for non-param nodes
        const Tensor* ref = nullptr;  // value storage for param nodes
        Tensor* bound_grad = nullptr;
        std::vector<int> args;
        std::vector<int> index;  // select_col payload
        double c0 = 0, c1 = 0;   // scalar payload (scale, clip)
        int out_dim = 0;         // generated_affine payload

        const Tensor& val() const { return ref ? *ref : owned; }
    };

    const Tensor& val(int id) const { return nodes_[id].val(); }
    Var push(Node n, const char* op_name);
    void check_var(Var v, const char* op_name) const;

    std::vector<Node> nodes_;
};

}  // namespace morl

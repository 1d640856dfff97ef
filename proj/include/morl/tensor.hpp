#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "morl/common.hpp"

namespace morl {

// Dense row-major tensor of doubles. Rank is typically 1 or 2; rank-2
// tensors are used as [rows x cols] matrices with samples in rows.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<int> shape_, std::vector<double> data_);

    static Tensor zeros(std::vector<int> shape);
    static Tensor full(std::vector<int> shape, double value);
    static Tensor vector(std::vector<double> values);
    static Tensor matrix(int rows, int cols, std::vector<double> values);
    static Tensor scalar(double value);

    size_t size() const { return data.size(); }
    int rank() const { return static_cast<int>(shape.size()); }
    int rows() const {
        if (shape.size() != 2) rank2_failure();
        return shape[0];
    }
    int cols() const {
        if (shape.size() != 2) rank2_failure();
        return shape[1];
    }

    double& at(int i, int j) { return data[static_cast<size_t>(i) * cols() + j]; }
    double at(int i, int j) const { return data[static_cast<size_t>(i) * cols() + j]; }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    std::string shape_str() const;

    void fill(double value);
    bool all_finite() const;

private:
    [[noreturn]] void rank2_failure() const;
};

size_t shape_numel(std::span<const int> shape);

namespace detail {

// C (+)= A[m x k] * B[k x n]
void gemm_nn(double* c, const double* a, const double* b, int m, int k, int n, bool accumulate);
// C (+)= A[m x k] * B[n x k]^T
void gemm_nt(double* c, const double* a, const double* b, int m, int k, int n, bool accumulate);
// C[k x n] (+)= A[m x k]^T * B[m x n]
void gemm_tn(double* c, const double* a, const double* b, int m, int k, int n, bool accumulate);

}  // namespace detail

}  // namespace morl

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zsl/matrix.hpp"

namespace zsl {

// Forward pass of out = relu(x * w + b), keeping what backward needs.
struct AffineReluCache {
    Matrix x;
    Matrix w;
    Matrix pre; // x * w + b before the ReLU gate
};

struct AffineReluResult {
    Matrix out;
    AffineReluCache cache;
};

// x: n x d, w: d x k, b: 1 x k (broadcast across rows).
AffineReluResult affine_relu_forward(const Matrix& x, const Matrix& w, const Matrix& b);

struct AffineReluGrads {
    Matrix dx;
    Matrix dw;
    Matrix db;
};

// Gradient flows only where the pre-activation was > 0.
AffineReluGrads affine_relu_backward(const Matrix& dout, const AffineReluCache& cache);

struct SoftmaxLossResult {
    double loss = 0.0;
    Matrix dlogits; // (softmax - onehot) / rows
};

// Mean over rows of -log softmax at the true label, stabilized by row-max
// subtraction. labels[i] indexes the columns of logits.
SoftmaxLossResult softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels);

// First/second moment estimates paired with one parameter matrix.
struct AdamState {
    Matrix m;
    Matrix v;
    std::uint64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_param(const Matrix& param) {
        AdamState s;
        s.m = Matrix(param.rows(), param.cols());
        s.v = Matrix(param.rows(), param.cols());
        return s;
    }
};

// One bias-corrected Adam update, in place. state.t advances by one.
void adam_step(Matrix& param, const Matrix& grad, AdamState& state, double lr);

// Central-difference gradient of a scalar function, entry by entry.
Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f, const Matrix& x,
                        double h = 1e-6);

} // namespace zsl

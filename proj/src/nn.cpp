#include "zsl/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zsl/error.hpp"

namespace zsl {

AffineReluResult affine_relu_forward(const Matrix& x, const Matrix& w, const Matrix& b) {
    if (x.cols() != w.rows())
        throw ShapeError("affine_relu: input " + x.shape_str() + " vs weights " +
                         w.shape_str());
    if (b.rows() != 1 || b.cols() != w.cols())
        throw ShapeError("affine_relu: bias " + b.shape_str() + ", need 1x" +
                         std::to_string(w.cols()));

    AffineReluResult result;
    result.cache.pre = add_row_broadcast(matmul(x, w), b);
    result.out = result.cache.pre;
    for (std::size_t i = 0; i < result.out.size(); ++i)
        result.out.data()[i] = std::max(0.0, result.out.data()[i]);
    result.cache.x = x;
    result.cache.w = w;
    return result;
}

AffineReluGrads affine_relu_backward(const Matrix& dout, const AffineReluCache& cache) {
    if (!dout.same_shape(cache.pre))
        throw ShapeError("affine_relu backward: dout " + dout.shape_str() +
                         " vs forward output " + cache.pre.shape_str());

    // Subgradient at exactly 0 is taken as 0.
    Matrix gated = dout;
    for (std::size_t i = 0; i < gated.size(); ++i)
        if (cache.pre.data()[i] <= 0.0) gated.data()[i] = 0.0;

    AffineReluGrads grads;
    grads.dx = matmul(gated, transpose(cache.w));
    grads.dw = matmul(transpose(cache.x), gated);
    grads.db = col_sums(gated);
    return grads;
}

SoftmaxLossResult softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows())
        throw ShapeError("softmax: " + std::to_string(labels.size()) + " labels for " +
                         logits.shape_str() + " logits");
    const std::size_t n = logits.rows();
    const std::size_t k = logits.cols();

    SoftmaxLossResult result;
    result.dlogits = Matrix(n, k);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= k)
            throw IndexError("softmax: label " + std::to_string(label) + " out of range [0, " +
                             std::to_string(k) + ")");
        const double* row = logits.row(i);
        double row_max = row[0];
        for (std::size_t j = 1; j < k; ++j) row_max = std::max(row_max, row[j]);

        double denom = 0.0;
        for (std::size_t j = 0; j < k; ++j) denom += std::exp(row[j] - row_max);
        const double log_denom = std::log(denom);
        loss += log_denom - (row[static_cast<std::size_t>(label)] - row_max);

        double* drow = result.dlogits.row(i);
        for (std::size_t j = 0; j < k; ++j)
            drow[j] = std::exp(row[j] - row_max) / denom / static_cast<double>(n);
        drow[static_cast<std::size_t>(label)] -= 1.0 / static_cast<double>(n);
    }
    result.loss = loss / static_cast<double>(n);
    return result;
}

void adam_step(Matrix& param, const Matrix& grad, AdamState& state, double lr) {
    if (!param.same_shape(grad) || !param.same_shape(state.m) || !param.same_shape(state.v))
        throw ShapeError("adam: param " + param.shape_str() + ", grad " + grad.shape_str() +
                         ", m " + state.m.shape_str() + ", v " + state.v.shape_str());

    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad.data()[i];
        double& m = state.m.data()[i];
        double& v = state.v.data()[i];
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        param.data()[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f, const Matrix& x,
                        double h) {
    Matrix grad(x.rows(), x.cols());
    Matrix probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double original = probe.data()[i];
        probe.data()[i] = original + h;
        const double plus = f(probe);
        probe.data()[i] = original - h;
        const double minus = f(probe);
        probe.data()[i] = original;
        if (!std::isfinite(plus) || !std::isfinite(minus))
            throw NumericError("finite_diff_grad: non-finite value at entry " +
                               std::to_string(i));
        grad.data()[i] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

} // namespace zsl

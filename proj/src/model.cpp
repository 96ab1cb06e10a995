#include "zsl/model.hpp"

#include <cmath>
#include <string>

#include "zsl/error.hpp"
#include "zsl/rng.hpp"

namespace zsl {

void HyperParams::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ConfigError("lambda must be finite and >= 0");
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw ConfigError("eta must be finite and >= 0");
    if (!(lr > 0.0) || !std::isfinite(lr))
        throw ConfigError("lr must be finite and > 0");
    if (embed_dim == 0)
        throw ConfigError("embed_dim must be >= 1");
    if (epochs < 1)
        throw ConfigError("epochs must be >= 1");
    if (rounds < 1)
        throw ConfigError("rounds must be >= 1");
    if (m0 < 1)
        throw ConfigError("m0 must be >= 1");
    if (batch_size == 0)
        throw ConfigError("batch_size must be >= 1");
}

std::size_t semantic_hidden_width(std::size_t d_s, std::size_t embed_dim) {
    return (d_s + embed_dim) / 2;
}

std::array<Param*, 8> ModelParams::all() {
    return {&visual_w,    &visual_b,    &semantic_w1,  &semantic_b1,
            &semantic_w2, &semantic_b2, &classifier_w, &classifier_b};
}

std::array<const Param*, 8> ModelParams::all() const {
    return {&visual_w,    &visual_b,    &semantic_w1,  &semantic_b1,
            &semantic_w2, &semantic_b2, &classifier_w, &classifier_b};
}

std::array<Param*, 4> ModelParams::visual_and_classifier() {
    return {&visual_w, &visual_b, &classifier_w, &classifier_b};
}

std::array<Param*, 4> ModelParams::semantic() {
    return {&semantic_w1, &semantic_b1, &semantic_w2, &semantic_b2};
}

void ModelParams::reset_adam() {
    for (Param* p : all())
        p->adam = AdamState::for_param(p->value);
}

namespace {

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (std::size_t i = 0; i < fan_in; ++i)
        for (std::size_t j = 0; j < fan_out; ++j)
            w(i, j) = rng.uniform(-a, a);
    return w;
}

Param make_param(Matrix value) {
    Param p;
    p.adam = AdamState::for_param(value);
    p.value = std::move(value);
    return p;
}

} // namespace

ModelParams init_model(std::size_t d_v, std::size_t d_s, std::size_t c_all,
                       const HyperParams& hp, std::uint64_t seed) {
    if (d_v == 0 || d_s == 0 || c_all == 0)
        throw ConfigError("init_model: dimensions must be >= 1");
    if (hp.embed_dim == 0)
        throw ConfigError("init_model: embed_dim must be >= 1");

    ModelParams m;
    m.d_v = d_v;
    m.d_s = d_s;
    m.embed_dim = hp.embed_dim;
    m.hidden = semantic_hidden_width(d_s, hp.embed_dim);
    m.c_all = c_all;

    // Weights are drawn from a single stream in a fixed order; biases start
    // at zero and consume no draws.
    Rng rng(seed);
    m.visual_w = make_param(glorot_uniform(d_v, m.embed_dim, rng));
    m.semantic_w1 = make_param(glorot_uniform(d_s, m.hidden, rng));
    m.semantic_w2 = make_param(glorot_uniform(m.hidden, m.embed_dim, rng));
    m.classifier_w = make_param(glorot_uniform(m.embed_dim, c_all, rng));

    m.visual_b = make_param(Matrix(1, m.embed_dim));
    m.semantic_b1 = make_param(Matrix(1, m.hidden));
    m.semantic_b2 = make_param(Matrix(1, m.embed_dim));
    m.classifier_b = make_param(Matrix(1, c_all));
    return m;
}

Matrix embed_visual(const ModelParams& params, const Matrix& x) {
    if (x.cols() != params.d_v)
        throw ShapeError("embed_visual: expected " + std::to_string(params.d_v) +
                         " feature columns, got " + std::to_string(x.cols()));
    return affine_relu_forward(x, params.visual_w.value, params.visual_b.value).out;
}

Matrix embed_semantic(const ModelParams& params, const Matrix& z) {
    if (z.cols() != params.d_s)
        throw ShapeError("embed_semantic: expected " + std::to_string(params.d_s) +
                         " attribute columns, got " + std::to_string(z.cols()));
    Matrix h = affine_relu_forward(z, params.semantic_w1.value, params.semantic_b1.value).out;
    return affine_relu_forward(h, params.semantic_w2.value, params.semantic_b2.value).out;
}

ForwardResult forward_loss(const ModelParams& params, const Batch& batch,
                           const HyperParams& hp, GradSubset subset) {
    const std::size_t n = batch.x.rows();
    if (n == 0)
        throw ShapeError("forward_loss: empty batch");
    if (batch.z.rows() != n || batch.labels.size() != n)
        throw ShapeError("forward_loss: batch of " + std::to_string(n) +
                         " samples has " + std::to_string(batch.z.rows()) +
                         " attribute rows and " + std::to_string(batch.labels.size()) +
                         " labels");
    if (batch.x.cols() != params.d_v || batch.z.cols() != params.d_s)
        throw ShapeError("forward_loss: batch shapes (" + batch.x.shape_str() + ", " +
                         batch.z.shape_str() + ") do not match model dims (d_v=" +
                         std::to_string(params.d_v) + ", d_s=" + std::to_string(params.d_s) + ")");
    for (int y : batch.labels)
        if (y < 0 || static_cast<std::size_t>(y) >= params.c_all)
            throw IndexError("forward_loss: label " + std::to_string(y) +
                             " outside [0, " + std::to_string(params.c_all) + ")");

    // Forward.
    auto vis = affine_relu_forward(batch.x, params.visual_w.value, params.visual_b.value);
    auto sem1 = affine_relu_forward(batch.z, params.semantic_w1.value, params.semantic_b1.value);
    auto sem2 = affine_relu_forward(sem1.out, params.semantic_w2.value, params.semantic_b2.value);
    const Matrix& phi = vis.out;
    const Matrix& psi = sem2.out;

    Matrix diff = phi - psi;
    Matrix logits = add_row_broadcast(matmul(phi, params.classifier_w.value),
                                      params.classifier_b.value);
    auto ce = softmax_cross_entropy(logits, batch.labels);

    ForwardResult res;
    res.loss.regression = sum_squares(diff) / static_cast<double>(n);
    res.loss.classification = ce.loss;
    for (const Param* p : params.all())
        res.loss.l2 += sum_squares(p->value);
    res.loss.total = res.loss.regression + hp.lambda * res.loss.classification +
                     hp.eta * res.loss.l2;

    if (subset == GradSubset::None)
        return res;

    const bool want_visual =
        subset == GradSubset::VisualAndClassifier || subset == GradSubset::All;
    const bool want_semantic = subset == GradSubset::Semantic || subset == GradSubset::All;

    // d(total)/d(diff) feeds both branches; the classifier term feeds phi only.
    Matrix ddiff = diff * (2.0 / static_cast<double>(n));

    if (want_visual) {
        // ce.dlogits already carries the 1/n of the batch mean.
        Matrix dlogits = ce.dlogits * hp.lambda;
        res.grads.classifier_w = matmul(transpose(phi), dlogits);
        res.grads.classifier_w += params.classifier_w.value * (2.0 * hp.eta);
        res.grads.classifier_b = col_sums(dlogits);
        res.grads.classifier_b += params.classifier_b.value * (2.0 * hp.eta);

        Matrix dphi = ddiff + matmul(dlogits, transpose(params.classifier_w.value));
        auto g = affine_relu_backward(dphi, vis.cache);
        res.grads.visual_w = std::move(g.dw);
        res.grads.visual_w += params.visual_w.value * (2.0 * hp.eta);
        res.grads.visual_b = std::move(g.db);
        res.grads.visual_b += params.visual_b.value * (2.0 * hp.eta);
    }

    if (want_semantic) {
        Matrix dpsi = ddiff * -1.0;
        auto g2 = affine_relu_backward(dpsi, sem2.cache);
        res.grads.semantic_w2 = std::move(g2.dw);
        res.grads.semantic_w2 += params.semantic_w2.value * (2.0 * hp.eta);
        res.grads.semantic_b2 = std::move(g2.db);
        res.grads.semantic_b2 += params.semantic_b2.value * (2.0 * hp.eta);

        auto g1 = affine_relu_backward(g2.dx, sem1.cache);
        res.grads.semantic_w1 = std::move(g1.dw);
        res.grads.semantic_w1 += params.semantic_w1.value * (2.0 * hp.eta);
        res.grads.semantic_b1 = std::move(g1.db);
        res.grads.semantic_b1 += params.semantic_b1.value * (2.0 * hp.eta);
    }

    return res;
}

} // namespace zsl

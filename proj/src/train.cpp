#include "zsl/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "zsl/error.hpp"
#include "zsl/rng.hpp"

namespace zsl {

TrainSet labeled_train_set(const Dataset& ds) {
    TrainSet set;
    set.samples.reserve(ds.train.size());
    for (std::size_t idx : ds.train)
        set.samples.push_back({idx, ds.labels[idx], false});
    return set;
}

namespace {

// Assembles rows perm[first..last) of the train set into one batch.
Batch make_batch(const Dataset& ds, const TrainSet& set, const std::vector<std::size_t>& perm,
                 std::size_t first, std::size_t last) {
    const std::size_t n = last - first;
    Batch b;
    b.x = Matrix(n, ds.d_v());
    b.z = Matrix(n, ds.d_s());
    b.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TrainSample& s = set.samples[perm[first + i]];
        const double* x_row = ds.features.row(s.sample_index);
        for (std::size_t j = 0; j < ds.d_v(); ++j) b.x(i, j) = x_row[j];
        const double* z_row = ds.attributes.row(static_cast<std::size_t>(s.label));
        for (std::size_t j = 0; j < ds.d_s(); ++j) b.z(i, j) = z_row[j];
        b.labels[i] = s.label;
    }
    return b;
}

void apply_steps(ModelParams& params, ModelGrads& g, GradSubset subset, double lr) {
    auto step = [lr](Param& p, Matrix& grad) { adam_step(p.value, grad, p.adam, lr); };
    if (subset == GradSubset::VisualAndClassifier || subset == GradSubset::All) {
        step(params.visual_w, g.visual_w);
        step(params.visual_b, g.visual_b);
        step(params.classifier_w, g.classifier_w);
        step(params.classifier_b, g.classifier_b);
    }
    if (subset == GradSubset::Semantic || subset == GradSubset::All) {
        step(params.semantic_w1, g.semantic_w1);
        step(params.semantic_b1, g.semantic_b1);
        step(params.semantic_w2, g.semantic_w2);
        step(params.semantic_b2, g.semantic_b2);
    }
}

// One epoch of minibatch Adam restricted to one parameter subset, then the
// loss over the whole train set in its stored order.
LossBreakdown run_epoch(ModelParams& params, const Dataset& ds, const TrainSet& set,
                        const HyperParams& hp, std::uint64_t stream, GradSubset subset) {
    if (set.empty())
        throw ConfigError("training requires a nonempty train set");
    if (hp.batch_size == 0)
        throw ConfigError("batch_size must be >= 1");

    const std::size_t n = set.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(stream);
    rng.shuffle(perm);

    for (std::size_t start = 0; start < n; start += hp.batch_size) {
        const std::size_t end = std::min(n, start + hp.batch_size);
        Batch batch = make_batch(ds, set, perm, start, end);
        ForwardResult res = forward_loss(params, batch, hp, subset);
        apply_steps(params, res.grads, subset, hp.lr);
    }

    std::vector<std::size_t> natural(n);
    std::iota(natural.begin(), natural.end(), std::size_t{0});
    Batch full = make_batch(ds, set, natural, 0, n);
    return forward_loss(params, full, hp, GradSubset::None).loss;
}

} // namespace

LossBreakdown solve_visual_subproblem(ModelParams& params, const Dataset& ds, const TrainSet& set,
                                      const HyperParams& hp, std::uint64_t stream) {
    return run_epoch(params, ds, set, hp, stream, GradSubset::VisualAndClassifier);
}

LossBreakdown solve_semantic_subproblem(ModelParams& params, const Dataset& ds, const TrainSet& set,
                                        const HyperParams& hp, std::uint64_t stream) {
    return run_epoch(params, ds, set, hp, stream, GradSubset::Semantic);
}

TrainResult train_from(const Dataset& ds, const TrainSet& set, const HyperParams& hp,
                       ModelParams params, int first_iter) {
    TrainResult res;
    res.params = std::move(params);
    res.log.reserve(hp.epochs > first_iter ? static_cast<std::size_t>(hp.epochs - first_iter) : 0);
    for (int t = first_iter; t < hp.epochs; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        LossBreakdown post_v =
            solve_visual_subproblem(res.params, ds, set, hp, mix_seed(hp.seed, static_cast<std::uint64_t>(t), 0));
        LossBreakdown post_s =
            solve_semantic_subproblem(res.params, ds, set, hp, mix_seed(hp.seed, static_cast<std::uint64_t>(t), 1));
        const auto t1 = std::chrono::steady_clock::now();
        if (!std::isfinite(post_v.total) || !std::isfinite(post_s.total))
            throw NumericError("training diverged at iteration " + std::to_string(t + 1) +
                               ": loss is not finite");
        TrainLogEntry entry;
        entry.iteration = t + 1;
        entry.post_visual = post_v;
        entry.post_semantic = post_s;
        entry.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        res.log.push_back(entry);
    }
    return res;
}

TrainResult train_on(const Dataset& ds, const TrainSet& set, const HyperParams& hp,
                     const ModelParams* warm_start) {
    ModelParams params;
    if (warm_start) {
        params = *warm_start;
        params.reset_adam();
    } else {
        params = init_model(ds.d_v(), ds.d_s(), ds.c_all(), hp, hp.seed);
    }
    return train_from(ds, set, hp, std::move(params), 0);
}

TrainResult train(const Dataset& ds, const HyperParams& hp, const ModelParams* warm_start) {
    return train_on(ds, labeled_train_set(ds), hp, warm_start);
}

} // namespace zsl

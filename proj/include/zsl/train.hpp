#pragma once

#include <cstdint>
#include <vector>

#include "zsl/data.hpp"
#include "zsl/model.hpp"

namespace zsl {

// One training sample: a row of the dataset plus the class it is trained
// toward. For pseudo-labeled samples the label is the predicted class, not
// ground truth.
struct TrainSample {
    std::size_t sample_index = 0;
    int label = 0;
    bool is_pseudo = false;
};

struct TrainSet {
    std::vector<TrainSample> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

// The dataset's labeled train split, ground-truth labels, no pseudo flags.
TrainSet labeled_train_set(const Dataset& ds);

struct TrainLogEntry {
    int iteration = 0; // 1-based
    LossBreakdown post_visual;
    LossBreakdown post_semantic;
    double wall_ms = 0.0;
};

// One epoch of minibatch Adam over a seeded shuffle of the train set,
// updating only the visual branch and the classifier; the semantic branch is
// left bit-identical. Returns the full-set loss after the epoch.
LossBreakdown solve_visual_subproblem(ModelParams& params, const Dataset& ds,
                                      const TrainSet& set, const HyperParams& hp,
                                      std::uint64_t stream);

// Mirror image: one epoch updating only the semantic branch. The
// classification term has no gradient path into this branch, so its weight
// does not influence these updates.
LossBreakdown solve_semantic_subproblem(ModelParams& params, const Dataset& ds,
                                        const TrainSet& set, const HyperParams& hp,
                                        std::uint64_t stream);

struct TrainResult {
    ModelParams params;
    std::vector<TrainLogEntry> log;
};

// Alternating loop starting from the given parameters and Adam state, running
// iterations first_iter..hp.epochs-1 (0-based). Shuffle streams are derived
// from (hp.seed, iteration, phase), so resuming a run at iteration k replays
// exactly what the uninterrupted run would have done.
TrainResult train_from(const Dataset& ds, const TrainSet& set, const HyperParams& hp,
                       ModelParams params, int first_iter);

// Full run on an explicit train set. warm_start copies the given parameters
// and resets their Adam state; otherwise parameters are freshly initialized
// from hp.seed.
TrainResult train_on(const Dataset& ds, const TrainSet& set, const HyperParams& hp,
                     const ModelParams* warm_start = nullptr);

// Full run on the dataset's labeled train split.
TrainResult train(const Dataset& ds, const HyperParams& hp,
                  const ModelParams* warm_start = nullptr);

} // namespace zsl

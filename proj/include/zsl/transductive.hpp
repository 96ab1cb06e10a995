#pragma once

#include <vector>

#include "zsl/data.hpp"
#include "zsl/eval.hpp"
#include "zsl/inference.hpp"
#include "zsl/model.hpp"
#include "zsl/train.hpp"

namespace zsl {

struct PseudoSample {
    std::size_t sample_index = 0;
    int pseudo_class = 0;     // always an unseen class
    double confidence = 0.0;  // negative visual-semantic gap; larger = surer
    int round = 0;            // round that assigned it
};

struct RoundReport {
    int round = 0; // 1-based
    int m_used = 0;
    std::size_t pseudo_count = 0;
    double pseudo_precision = 0.0; // against ground truth; 0 when no pseudo samples
    Metrics metrics;               // evaluation after this round's training
    bool trained_on_labeled_only = false;
};

// Pseudo-sample budget per class for the round AFTER round r.
int update_m(int m0, int r);

// For each unseen class, the up-to-m samples predicted as that class with the
// smallest gaps (ties to the smaller sample index). Predictions of seen
// classes are never selected.
std::vector<PseudoSample> select_pseudo(const std::vector<Prediction>& preds,
                                        const std::vector<int>& unseen, int m, int round);

struct TransduceResult {
    ModelParams params;
    std::vector<RoundReport> rounds;
    std::vector<TrainLogEntry> log;          // all rounds' training entries, in order
    std::vector<PseudoSample> pseudo_history; // every selection ever made, round-tagged
};

// Pseudo-labeling loop: each round trains on the labeled split plus the
// current pseudo set (round 1: fresh parameters, labeled data only; later
// rounds warm-start from the previous round), predicts the pool, and replaces
// the pseudo set with a fresh top-m selection before growing m. The pool must
// be disjoint from the train split. Ground-truth pool labels are read only
// for report precision, never trained on. hp.rounds == 0 degenerates to plain
// training.
TransduceResult transduce(const Dataset& ds, const HyperParams& hp,
                          const std::vector<std::size_t>& pool, Setting setting);

} // namespace zsl

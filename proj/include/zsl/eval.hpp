#pragma once

#include <vector>

#include "zsl/data.hpp"
#include "zsl/inference.hpp"
#include "zsl/model.hpp"

namespace zsl {

struct ClassAccuracy {
    int class_id = 0;
    std::size_t count = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
};

struct PerClassAccuracy {
    std::vector<ClassAccuracy> per_class; // classes with samples, ascending id
    std::vector<int> excluded;            // classes in the set with zero samples
    double mean = 0.0;                    // unweighted over per_class
};

// Per-class top-1 accuracy over the samples whose true class is in class_set.
// true_labels is indexed by Prediction::sample_index. Classes without samples
// are excluded from the mean and reported.
PerClassAccuracy per_class_accuracy(const std::vector<Prediction>& preds,
                                    const std::vector<int>& true_labels,
                                    const std::vector<int>& class_set);

// 2*ts*tr/(ts+tr), or 0 when both are 0.
double harmonic_mean(double ts, double tr);

struct Metrics {
    Setting setting = Setting::Conventional;
    double ts = 0.0; // mean per-class accuracy over unseen classes
    double tr = 0.0; // over seen classes; generalized setting only
    double h = 0.0;  // harmonic mean of ts and tr; generalized setting only
    PerClassAccuracy unseen;
    PerClassAccuracy seen;
};

// Conventional: test_unseen scored over the unseen label space, ts only.
// Generalized: test_unseen and test_seen scored over the full space; ts, tr
// and their harmonic mean. Throws ConfigError when a required split is empty.
Metrics evaluate(const ModelParams& params, const Dataset& ds, Setting setting);

} // namespace zsl

#pragma once

#include <filesystem>
#include <vector>

#include "zsl/data.hpp"
#include "zsl/model.hpp"

namespace zsl {

enum class Setting { Conventional, Generalized };

// The candidate classes a test sample may be assigned to.
struct LabelSpace {
    Setting mode = Setting::Conventional;
    std::vector<int> candidates; // ascending class ids
};

// Conventional: the unseen classes. Generalized: seen and unseen together.
// Throws ConfigError if the resulting space is empty.
LabelSpace label_space(const Dataset& ds, Setting setting);

struct Prediction {
    std::size_t sample_index = 0;
    int predicted_class = 0;
    double gap = 0.0;               // squared distance to the winning class embedding
    std::vector<double> distances;  // per candidate, aligned with the label space
};

// Rows of the candidate classes' attribute embeddings, aligned with
// space.candidates. Computed once and shared across samples.
Matrix candidate_embeddings(const ModelParams& params, const Matrix& attributes,
                            const LabelSpace& space);

// Nearest class embedding to the embedded sample, squared Euclidean, ties to
// the smaller class id. x is a single feature row (1 x d_v).
Prediction predict(const ModelParams& params, const Matrix& x, const Matrix& attributes,
                   const LabelSpace& space);

// predict for every sample index in the split; output order matches input.
std::vector<Prediction> predict_all(const ModelParams& params, const Dataset& ds,
                                    const std::vector<std::size_t>& split,
                                    const LabelSpace& space);

// CSV: sample_index, true_class, predicted_class, gap.
void save_predictions(const std::filesystem::path& path, const std::vector<Prediction>& preds,
                      const std::vector<int>& true_labels);

} // namespace zsl

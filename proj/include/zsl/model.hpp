#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "zsl/matrix.hpp"
#include "zsl/nn.hpp"

namespace zsl {

struct HyperParams {
    double lambda = 1.0;  // weight of the classification term
    double eta = 1e-4;    // weight of the L2 penalty
    double lr = 1e-4;
    std::size_t embed_dim = 1024;
    int epochs = 50; // outer alternating iterations; each = one visual + one semantic epoch
    int rounds = 10; // pseudo-labeling calibration rounds
    int m0 = 40;     // initial per-class pseudo-sample budget
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;

    // Throws ConfigError. Command-line entry points call this; library code
    // tolerates degenerate values like epochs == 0 (empty loop).
    void validate() const;
};

// Width of the first semantic layer: floor((d_s + embed_dim) / 2).
std::size_t semantic_hidden_width(std::size_t d_s, std::size_t embed_dim);

// A parameter matrix together with its optimizer state.
struct Param {
    Matrix value;
    AdamState adam;
};

struct ModelParams {
    std::size_t d_v = 0;
    std::size_t d_s = 0;
    std::size_t embed_dim = 0;
    std::size_t hidden = 0;
    std::size_t c_all = 0;

    Param visual_w, visual_b;                             // one affine + ReLU
    Param semantic_w1, semantic_b1, semantic_w2, semantic_b2; // two affine + ReLU
    Param classifier_w, classifier_b;                     // linear over all classes

    std::array<Param*, 8> all();
    std::array<const Param*, 8> all() const;
    std::array<Param*, 4> visual_and_classifier();
    std::array<Param*, 4> semantic();

    void reset_adam();
};

// Glorot-uniform weights, zero biases, zeroed Adam states. Fully determined
// by the seed.
ModelParams init_model(std::size_t d_v, std::size_t d_s, std::size_t c_all,
                       const HyperParams& hp, std::uint64_t seed);

// Visual branch: relu(x * w + b). x is n x d_v.
Matrix embed_visual(const ModelParams& params, const Matrix& x);

// Semantic branch: two stacked affine + ReLU layers. z is m x d_s.
Matrix embed_semantic(const ModelParams& params, const Matrix& z);

struct LossBreakdown {
    double regression = 0.0;
    double classification = 0.0;
    double l2 = 0.0;
    double total = 0.0;
};

// Which parameters receive gradients; the rest are treated as constants.
enum class GradSubset {
    None,                // loss only
    VisualAndClassifier, // visual-branch step
    Semantic,            // semantic-branch step
    All,                 // gradient checking
};

// Gradient matrices are empty for parameters outside the requested subset.
struct ModelGrads {
    Matrix visual_w, visual_b;
    Matrix semantic_w1, semantic_b1, semantic_w2, semantic_b2;
    Matrix classifier_w, classifier_b;
};

// One training batch: feature rows, the attribute row of each sample's class,
// and the class indices themselves.
struct Batch {
    Matrix x;                // n x d_v
    Matrix z;                // n x d_s, row i = attributes of labels[i]
    std::vector<int> labels; // n class ids, indexing classifier columns
};

struct ForwardResult {
    LossBreakdown loss;
    ModelGrads grads;
};

// Joint objective on one batch: mean squared visual-semantic distance, mean
// cross-entropy of the classifier, and the L2 norm of all parameters:
//   total = regression + lambda * classification + eta * l2.
// Regression and classification are batch means so lambda and eta do not
// rescale with batch size.
ForwardResult forward_loss(const ModelParams& params, const Batch& batch,
                           const HyperParams& hp, GradSubset subset);

} // namespace zsl

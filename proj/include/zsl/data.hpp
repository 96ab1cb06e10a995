#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "zsl/matrix.hpp"
#include "zsl/model.hpp"

namespace zsl {

// A zero-shot dataset: one pooled feature matrix, integer class labels, one
// attribute row per class, the seen/unseen class partition, and index splits
// into the pooled samples.
struct Dataset {
    Matrix features;   // N_total x d_v
    std::vector<int> labels;
    Matrix attributes; // C_all x d_s; row c = semantic vector of class c
    std::vector<int> seen;
    std::vector<int> unseen;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test_seen; // may be empty
    std::vector<std::size_t> test_unseen;
    bool standardized = false;

    std::size_t d_v() const { return features.cols(); }
    std::size_t d_s() const { return attributes.cols(); }
    std::size_t c_all() const { return attributes.rows(); }

    // Checks every structural invariant (label ranges, class partition,
    // split disjointness and membership, finite values). Loaders call this,
    // so downstream code can trust a Dataset it received.
    void validate() const;
};

struct SynthConfig {
    int c_seen = 15;
    int c_unseen = 5;
    int train_per_class = 100; // per seen class
    int test_per_class = 20;   // per class, seen and unseen alike
    std::size_t d_v = 64;
    std::size_t d_s = 16;
    double sigma = 0.1; // feature noise scale
    std::uint64_t seed = 7;

    void validate() const;
};

// Every entry passed through 32-bit storage precision.
Matrix quantized_f32(const Matrix& m);

struct SynthOutput {
    Dataset dataset;
    Matrix map_a; // the d_v x d_s linear map the features were built from
};

// Classes 0..c_seen-1 are seen, the rest unseen. Attributes are unit-length
// rows; features are A*z_c plus sigma-scaled gaussian noise. All stored
// values are exactly representable at 32 bits so a save/load round trip
// reproduces the dataset bit for bit.
SynthOutput generate_synthetic_full(const SynthConfig& cfg);
Dataset generate_synthetic(const SynthConfig& cfg);

// Binary matrix file, 32-bit values. Loading promotes to doubles.
void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

// Writes manifest.json, features/attributes matrix files and a labels file
// into dir (created if needed). standardize_flag is recorded in the manifest
// and applied at load time; the files always hold the features as they are.
void save_dataset(const std::filesystem::path& dir, const Dataset& ds,
                  bool standardize_flag = false);

// Loads and validates the dataset a manifest describes. If the manifest sets
// "standardize": true, features are shifted and scaled per dimension by
// statistics of the train split.
Dataset load_dataset(const std::filesystem::path& manifest_path);

struct Checkpoint {
    ModelParams params;
    HyperParams hp;
    int completed_iters = 0;
};

// 64-bit lossless snapshot of all parameters and their optimizer state.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const HyperParams& hp, int completed_iters);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace zsl

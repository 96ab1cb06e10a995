#include "zsl/inference.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "zsl/error.hpp"

namespace zsl {

LabelSpace label_space(const Dataset& ds, Setting setting) {
    LabelSpace space;
    space.mode = setting;
    space.candidates = ds.unseen;
    if (setting == Setting::Generalized)
        space.candidates.insert(space.candidates.end(), ds.seen.begin(), ds.seen.end());
    std::sort(space.candidates.begin(), space.candidates.end());
    if (space.candidates.empty())
        throw ConfigError(setting == Setting::Conventional
                              ? "label space is empty: dataset has no unseen classes"
                              : "label space is empty: dataset has no classes");
    return space;
}

Matrix candidate_embeddings(const ModelParams& params, const Matrix& attributes,
                            const LabelSpace& space) {
    if (space.candidates.empty())
        throw ConfigError("label space is empty");
    Matrix z(space.candidates.size(), attributes.cols());
    for (std::size_t i = 0; i < space.candidates.size(); ++i) {
        const int c = space.candidates[i];
        if (c < 0 || static_cast<std::size_t>(c) >= attributes.rows())
            throw IndexError("candidate class " + std::to_string(c) + " has no attribute row");
        const double* row = attributes.row(static_cast<std::size_t>(c));
        for (std::size_t k = 0; k < attributes.cols(); ++k) z(i, k) = row[k];
    }
    return embed_semantic(params, z);
}

namespace {

Prediction scan_candidates(const double* phi_row, std::size_t embed_dim, const Matrix& cand,
                           const LabelSpace& space, std::size_t sample_index) {
    Prediction p;
    p.sample_index = sample_index;
    p.distances.resize(space.candidates.size());
    double best = 0.0;
    int best_class = -1;
    for (std::size_t j = 0; j < space.candidates.size(); ++j) {
        double dist = 0.0;
        const double* c_row = cand.row(j);
        for (std::size_t k = 0; k < embed_dim; ++k) {
            const double d = phi_row[k] - c_row[k];
            dist += d * d;
        }
        p.distances[j] = dist;
        const int cls = space.candidates[j];
        if (best_class < 0 || dist < best || (dist == best && cls < best_class)) {
            best = dist;
            best_class = cls;
        }
    }
    p.predicted_class = best_class;
    p.gap = best;
    return p;
}

} // namespace

Prediction predict(const ModelParams& params, const Matrix& x, const Matrix& attributes,
                   const LabelSpace& space) {
    if (x.rows() != 1)
        throw ShapeError("predict: expected one feature row, got " + x.shape_str());
    const Matrix cand = candidate_embeddings(params, attributes, space);
    const Matrix phi = embed_visual(params, x);
    return scan_candidates(phi.row(0), params.embed_dim, cand, space, 0);
}

std::vector<Prediction> predict_all(const ModelParams& params, const Dataset& ds,
                                    const std::vector<std::size_t>& split,
                                    const LabelSpace& space) {
    std::vector<Prediction> out;
    if (split.empty()) {
        // Still reject a bad space so an empty split cannot mask one.
        candidate_embeddings(params, ds.attributes, space);
        return out;
    }
    const Matrix cand = candidate_embeddings(params, ds.attributes, space);

    Matrix x(split.size(), ds.d_v());
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split[i] >= ds.features.rows())
            throw IndexError("predict_all: sample index " + std::to_string(split[i]) +
                             " outside the dataset");
        const double* row = ds.features.row(split[i]);
        for (std::size_t j = 0; j < ds.d_v(); ++j) x(i, j) = row[j];
    }
    const Matrix phi = embed_visual(params, x);

    out.reserve(split.size());
    for (std::size_t i = 0; i < split.size(); ++i)
        out.push_back(scan_candidates(phi.row(i), params.embed_dim, cand, space, split[i]));
    return out;
}

void save_predictions(const std::filesystem::path& path, const std::vector<Prediction>& preds,
                      const std::vector<int>& true_labels) {
    std::ofstream f(path);
    if (!f)
        throw FileError("cannot open " + path.string() + " for writing");
    f << "sample_index,true_class,predicted_class,gap\n";
    char gap_buf[64];
    for (const Prediction& p : preds) {
        if (p.sample_index >= true_labels.size())
            throw IndexError("save_predictions: sample index " + std::to_string(p.sample_index) +
                             " has no label");
        std::snprintf(gap_buf, sizeof gap_buf, "%.17g", p.gap);
        f << p.sample_index << ',' << true_labels[p.sample_index] << ',' << p.predicted_class
          << ',' << gap_buf << '\n';
    }
    f.flush();
    if (!f)
        throw FileError("write failed: " + path.string());
}

} // namespace zsl

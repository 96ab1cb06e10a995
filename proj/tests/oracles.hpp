#pragma once

// Independent reference implementations the tests compare the library
// against. Everything here is deliberately written as plain scalar loops over
// raw values, sharing no code with the library paths under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "zsl/matrix.hpp"

namespace oracle {

// Plain ijk triple loop.
inline zsl::Matrix matmul(const zsl::Matrix& a, const zsl::Matrix& b) {
    zsl::Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

// max(0, x*w + b) entry by entry.
inline zsl::Matrix affine_relu(const zsl::Matrix& x, const zsl::Matrix& w, const zsl::Matrix& b) {
    zsl::Matrix out(x.rows(), w.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) {
            double acc = b(0, j);
            for (std::size_t k = 0; k < x.cols(); ++k) acc += x(i, k) * w(k, j);
            out(i, j) = acc > 0.0 ? acc : 0.0;
        }
    return out;
}

// Direct-formula mean cross-entropy, no max shift. Only valid for logits of
// small magnitude.
inline double softmax_ce(const zsl::Matrix& logits, const std::vector<int>& labels) {
    double total = 0.0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double denom = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) denom += std::exp(logits(i, j));
        const double p = std::exp(logits(i, static_cast<std::size_t>(labels[i]))) / denom;
        total += -std::log(p);
    }
    return total / static_cast<double>(logits.rows());
}

// Scalar Adam recurrence over flat vectors.
struct AdamRef {
    std::vector<double> m, v;
    std::uint64_t t = 0;
};

inline void adam_step(std::vector<double>& p, const std::vector<double>& g, AdamRef& s,
                      double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
    if (s.m.empty()) {
        s.m.assign(p.size(), 0.0);
        s.v.assign(p.size(), 0.0);
    }
    s.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(s.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(s.t));
    for (std::size_t i = 0; i < p.size(); ++i) {
        s.m[i] = beta1 * s.m[i] + (1.0 - beta1) * g[i];
        s.v[i] = beta2 * s.v[i] + (1.0 - beta2) * g[i] * g[i];
        const double m_hat = s.m[i] / bc1;
        const double v_hat = s.v[i] / bc2;
        p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

// Brute-force nearest neighbor over candidate embedding rows; ties to the
// smaller class id. Returns (class, squared distance).
inline std::pair<int, double> nearest_class(const double* query, const zsl::Matrix& cand_rows,
                                            const std::vector<int>& classes) {
    int best_class = -1;
    double best = 0.0;
    for (std::size_t j = 0; j < cand_rows.rows(); ++j) {
        double d = 0.0;
        for (std::size_t k = 0; k < cand_rows.cols(); ++k) {
            const double diff = query[k] - cand_rows(j, k);
            d += diff * diff;
        }
        if (best_class < 0 || d < best || (d == best && classes[j] < best_class)) {
            best = d;
            best_class = classes[j];
        }
    }
    return {best_class, best};
}

// Per-class sort-and-truncate selection over (sample, predicted, gap) rows.
struct PredRow {
    std::size_t sample_index;
    int predicted;
    double gap;
};

inline std::vector<std::pair<std::size_t, int>> select_top_m(const std::vector<PredRow>& rows,
                                                             const std::vector<int>& unseen,
                                                             int m) {
    std::vector<std::pair<std::size_t, int>> out;
    std::vector<int> classes = unseen;
    std::sort(classes.begin(), classes.end());
    for (int c : classes) {
        std::vector<PredRow> bucket;
        for (const PredRow& r : rows)
            if (r.predicted == c) bucket.push_back(r);
        std::sort(bucket.begin(), bucket.end(), [](const PredRow& a, const PredRow& b) {
            if (a.gap != b.gap) return a.gap < b.gap;
            return a.sample_index < b.sample_index;
        });
        for (std::size_t i = 0; i < bucket.size() && i < static_cast<std::size_t>(m); ++i)
            out.emplace_back(bucket[i].sample_index, c);
    }
    return out;
}

// Tally-loop per-class accuracy: mean over classes that have samples.
inline double per_class_mean(const std::vector<int>& truth, const std::vector<int>& predicted,
                             const std::vector<int>& class_set) {
    std::map<int, std::pair<int, int>> tally; // class -> (correct, count)
    for (int c : class_set) tally[c] = {0, 0};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto it = tally.find(truth[i]);
        if (it == tally.end()) continue;
        it->second.second += 1;
        if (predicted[i] == truth[i]) it->second.first += 1;
    }
    double sum = 0.0;
    int classes = 0;
    for (const auto& [c, counts] : tally) {
        if (counts.second == 0) continue;
        sum += static_cast<double>(counts.first) / counts.second;
        classes += 1;
    }
    return classes == 0 ? 0.0 : sum / classes;
}

} // namespace oracle

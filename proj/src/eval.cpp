#include "zsl/eval.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "zsl/error.hpp"

namespace zsl {

PerClassAccuracy per_class_accuracy(const std::vector<Prediction>& preds,
                                    const std::vector<int>& true_labels,
                                    const std::vector<int>& class_set) {
    std::map<int, ClassAccuracy> table;
    for (int c : class_set)
        table[c] = ClassAccuracy{c, 0, 0, 0.0};

    for (const Prediction& p : preds) {
        if (p.sample_index >= true_labels.size())
            throw IndexError("per_class_accuracy: sample index " +
                             std::to_string(p.sample_index) + " has no label");
        const int y = true_labels[p.sample_index];
        auto it = table.find(y);
        if (it == table.end())
            continue; // true class outside the set being scored
        ++it->second.count;
        if (p.predicted_class == y)
            ++it->second.correct;
    }

    PerClassAccuracy out;
    double sum = 0.0;
    for (auto& [c, acc] : table) {
        if (acc.count == 0) {
            out.excluded.push_back(c);
            continue;
        }
        acc.accuracy = static_cast<double>(acc.correct) / static_cast<double>(acc.count);
        sum += acc.accuracy;
        out.per_class.push_back(acc);
    }
    if (!out.per_class.empty())
        out.mean = sum / static_cast<double>(out.per_class.size());
    return out;
}

double harmonic_mean(double ts, double tr) {
    if (ts + tr <= 0.0)
        return 0.0;
    return 2.0 * ts * tr / (ts + tr);
}

Metrics evaluate(const ModelParams& params, const Dataset& ds, Setting setting) {
    Metrics m;
    m.setting = setting;

    if (ds.test_unseen.empty())
        throw ConfigError("evaluation requires a nonempty test_unseen split");

    if (setting == Setting::Conventional) {
        const LabelSpace space = label_space(ds, Setting::Conventional);
        const auto preds = predict_all(params, ds, ds.test_unseen, space);
        m.unseen = per_class_accuracy(preds, ds.labels, ds.unseen);
        m.ts = m.unseen.mean;
        return m;
    }

    if (ds.test_seen.empty())
        throw ConfigError("generalized evaluation requires a nonempty test_seen split");
    const LabelSpace space = label_space(ds, Setting::Generalized);
    const auto unseen_preds = predict_all(params, ds, ds.test_unseen, space);
    const auto seen_preds = predict_all(params, ds, ds.test_seen, space);
    m.unseen = per_class_accuracy(unseen_preds, ds.labels, ds.unseen);
    m.seen = per_class_accuracy(seen_preds, ds.labels, ds.seen);
    m.ts = m.unseen.mean;
    m.tr = m.seen.mean;
    m.h = harmonic_mean(m.ts, m.tr);
    return m;
}

} // namespace zsl

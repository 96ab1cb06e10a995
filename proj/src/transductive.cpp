#include "zsl/transductive.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "zsl/error.hpp"

namespace zsl {

int update_m(int m0, int r) {
    return m0 * (r + 1);
}

std::vector<PseudoSample> select_pseudo(const std::vector<Prediction>& preds,
                                        const std::vector<int>& unseen, int m, int round) {
    if (unseen.empty())
        throw ConfigError("pseudo selection requires at least one unseen class");
    if (m < 0)
        throw ConfigError("pseudo selection budget must be >= 0");

    std::vector<PseudoSample> out;
    if (m == 0)
        return out;

    // Bucket by predicted class, unseen classes only, in ascending class order.
    std::map<int, std::vector<const Prediction*>> buckets;
    for (int c : unseen)
        buckets[c];
    for (const Prediction& p : preds) {
        auto it = buckets.find(p.predicted_class);
        if (it != buckets.end())
            it->second.push_back(&p);
    }

    for (auto& [cls, bucket] : buckets) {
        std::sort(bucket.begin(), bucket.end(), [](const Prediction* a, const Prediction* b) {
            if (a->gap != b->gap) return a->gap < b->gap;
            return a->sample_index < b->sample_index;
        });
        const std::size_t keep = std::min(bucket.size(), static_cast<std::size_t>(m));
        for (std::size_t i = 0; i < keep; ++i)
            out.push_back({bucket[i]->sample_index, cls, -bucket[i]->gap, round});
    }
    return out;
}

TransduceResult transduce(const Dataset& ds, const HyperParams& hp,
                          const std::vector<std::size_t>& pool, Setting setting) {
    std::vector<char> in_train(ds.features.rows(), 0);
    for (std::size_t idx : ds.train)
        in_train[idx] = 1;
    for (std::size_t idx : pool) {
        if (idx >= ds.features.rows())
            throw IndexError("test pool sample " + std::to_string(idx) + " outside the dataset");
        if (in_train[idx])
            throw ConfigError("test pool overlaps the train split at sample " +
                              std::to_string(idx));
    }

    TransduceResult out;
    if (hp.rounds <= 0) {
        TrainResult tr = train(ds, hp);
        out.params = std::move(tr.params);
        out.log = std::move(tr.log);
        return out;
    }

    const LabelSpace space = label_space(ds, setting);
    const TrainSet labeled = labeled_train_set(ds);

    std::vector<PseudoSample> pseudo;
    int m = hp.m0;
    ModelParams params;
    for (int r = 1; r <= hp.rounds; ++r) {
        TrainSet set = labeled;
        for (const PseudoSample& ps : pseudo)
            set.samples.push_back({ps.sample_index, ps.pseudo_class, true});

        // Round 1 starts fresh and therefore reproduces plain training on the
        // labeled split; later rounds refine the previous round's parameters.
        TrainResult tr = train_on(ds, set, hp, r == 1 ? nullptr : &params);
        params = std::move(tr.params);
        out.log.insert(out.log.end(), tr.log.begin(), tr.log.end());

        const auto preds = predict_all(params, ds, pool, space);
        pseudo = select_pseudo(preds, ds.unseen, m, r);
        out.pseudo_history.insert(out.pseudo_history.end(), pseudo.begin(), pseudo.end());

        RoundReport rep;
        rep.round = r;
        rep.m_used = m;
        rep.pseudo_count = pseudo.size();
        if (!pseudo.empty()) {
            std::size_t correct = 0;
            for (const PseudoSample& ps : pseudo)
                if (ds.labels[ps.sample_index] == ps.pseudo_class)
                    ++correct;
            rep.pseudo_precision = static_cast<double>(correct) / static_cast<double>(pseudo.size());
        }
        rep.metrics = evaluate(params, ds, setting);
        rep.trained_on_labeled_only = set.size() == labeled.size();
        out.rounds.push_back(std::move(rep));

        m = update_m(hp.m0, r);
    }
    out.params = std::move(params);
    return out;
}

} // namespace zsl

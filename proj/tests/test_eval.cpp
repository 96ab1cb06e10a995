#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "zsl/data.hpp"
#include "zsl/error.hpp"
#include "zsl/eval.hpp"
#include "zsl/rng.hpp"

using zsl::Dataset;
using zsl::HyperParams;
using zsl::Matrix;
using zsl::Prediction;
using zsl::Setting;

namespace {

std::vector<Prediction> preds_from(const std::vector<int>& predicted) {
    std::vector<Prediction> out(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        out[i].sample_index = i;
        out[i].predicted_class = predicted[i];
    }
    return out;
}

Dataset small_dataset() {
    zsl::SynthConfig cfg;
    cfg.c_seen = 4;
    cfg.c_unseen = 3;
    cfg.train_per_class = 6;
    cfg.test_per_class = 3;
    cfg.d_v = 8;
    cfg.d_s = 4;
    cfg.seed = 29;
    return zsl::generate_synthetic(cfg);
}

} // namespace

TEST_CASE("per-class accuracy weighs classes equally, not samples") {
    // Nine samples of class 0 all wrong, one sample of class 1 right:
    // pooled accuracy would be 0.1, per-class is (0 + 1) / 2.
    std::vector<int> truth(10, 0);
    truth[9] = 1;
    std::vector<int> predicted(10, 2);
    predicted[9] = 1;
    auto acc = zsl::per_class_accuracy(preds_from(predicted), truth, {0, 1});
    CHECK(acc.mean == 0.5);
    REQUIRE(acc.per_class.size() == 2);
    CHECK(acc.per_class[0].class_id == 0);
    CHECK(acc.per_class[0].count == 9);
    CHECK(acc.per_class[0].correct == 0);
    CHECK(acc.per_class[1].accuracy == 1.0);
    CHECK(acc.excluded.empty());
}

TEST_CASE("classes without samples are excluded from the mean") {
    std::vector<int> truth = {0, 0, 1};
    std::vector<int> predicted = {0, 1, 1};
    auto acc = zsl::per_class_accuracy(preds_from(predicted), truth, {0, 1, 7});
    CHECK(acc.excluded == std::vector<int>{7});
    REQUIRE(acc.per_class.size() == 2);
    CHECK(acc.mean == doctest::Approx(0.75).epsilon(1e-15));

    auto none = zsl::per_class_accuracy(preds_from(predicted), truth, {7});
    CHECK(none.mean == 0.0);
    CHECK(none.per_class.empty());
    CHECK(none.excluded == std::vector<int>{7});
}

TEST_CASE("samples outside the class set are ignored") {
    std::vector<int> truth = {0, 5, 5, 1};
    std::vector<int> predicted = {0, 5, 5, 0};
    auto acc = zsl::per_class_accuracy(preds_from(predicted), truth, {0, 1});
    REQUIRE(acc.per_class.size() == 2);
    CHECK(acc.per_class[0].count == 1);
    CHECK(acc.per_class[1].count == 1);
    CHECK(acc.mean == 0.5);
}

TEST_CASE("per-class accuracy matches a tally loop on random instances") {
    zsl::Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const int c = 2 + static_cast<int>(rng.bounded(6));
        const std::size_t n = 1 + rng.bounded(40);
        std::vector<int> truth(n), predicted(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(c)));
            predicted[i] = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(c)));
        }
        std::vector<int> class_set;
        for (int id = 0; id < c; ++id)
            if (rng.bounded(4) > 0) class_set.push_back(id);
        if (class_set.empty()) class_set.push_back(0);
        auto acc = zsl::per_class_accuracy(preds_from(predicted), truth, class_set);
        CHECK(acc.mean ==
              doctest::Approx(oracle::per_class_mean(truth, predicted, class_set)).epsilon(1e-12));
    }
}

TEST_CASE("harmonic mean reference values") {
    CHECK(zsl::harmonic_mean(0.714, 0.901) == doctest::Approx(0.797).epsilon(0.0007));
    CHECK(zsl::harmonic_mean(0.0, 0.9) == 0.0);
    CHECK(zsl::harmonic_mean(0.9, 0.0) == 0.0);
    CHECK(zsl::harmonic_mean(0.0, 0.0) == 0.0);
    CHECK(zsl::harmonic_mean(0.6, 0.6) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("harmonic mean is bounded by the arithmetic mean and the smaller side") {
    zsl::Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const double ts = rng.uniform();
        const double tr = rng.uniform();
        const double h = zsl::harmonic_mean(ts, tr);
        CHECK(h <= (ts + tr) / 2.0 + 1e-12);
        CHECK(h <= 2.0 * std::min(ts, tr) + 1e-12);
        CHECK(h >= 0.0);
    }
}

TEST_CASE("conventional evaluation scores test_unseen over the unseen space") {
    Dataset ds = small_dataset();
    HyperParams hp;
    hp.embed_dim = 6;
    auto params = zsl::init_model(ds.d_v(), ds.d_s(), ds.c_all(), hp, 5);
    auto metrics = zsl::evaluate(params, ds, Setting::Conventional);
    CHECK(metrics.setting == Setting::Conventional);

    auto preds = zsl::predict_all(params, ds, ds.test_unseen,
                                  zsl::label_space(ds, Setting::Conventional));
    auto acc = zsl::per_class_accuracy(preds, ds.labels, ds.unseen);
    CHECK(metrics.ts == acc.mean);
    CHECK(metrics.unseen.per_class.size() == acc.per_class.size());
    CHECK(metrics.tr == 0.0);
    CHECK(metrics.h == 0.0);
}

TEST_CASE("generalized evaluation combines both test splits") {
    Dataset ds = small_dataset();
    HyperParams hp;
    hp.embed_dim = 6;
    auto params = zsl::init_model(ds.d_v(), ds.d_s(), ds.c_all(), hp, 5);
    auto metrics = zsl::evaluate(params, ds, Setting::Generalized);
    CHECK(metrics.setting == Setting::Generalized);

    auto space = zsl::label_space(ds, Setting::Generalized);
    auto unseen_preds = zsl::predict_all(params, ds, ds.test_unseen, space);
    auto seen_preds = zsl::predict_all(params, ds, ds.test_seen, space);
    CHECK(metrics.ts == zsl::per_class_accuracy(unseen_preds, ds.labels, ds.unseen).mean);
    CHECK(metrics.tr == zsl::per_class_accuracy(seen_preds, ds.labels, ds.seen).mean);
    CHECK(metrics.h == zsl::harmonic_mean(metrics.ts, metrics.tr));
}

TEST_CASE("a model that always answers a seen class gets zero ts and zero h") {
    Dataset ds = small_dataset();
    HyperParams hp;
    hp.embed_dim = 6;
    auto params = zsl::init_model(ds.d_v(), ds.d_s(), ds.c_all(), hp, 5);
    // All-zero parameters collapse every embedding to the origin, so every
    // sample ties across classes and resolves to class 0, which is seen.
    for (zsl::Param* p : params.all()) p->value = Matrix(p->value.rows(), p->value.cols());
    auto metrics = zsl::evaluate(params, ds, Setting::Generalized);
    CHECK(metrics.ts == 0.0);
    CHECK(metrics.h == 0.0);
    CHECK(metrics.tr > 0.0);
}

TEST_CASE("evaluation requires the splits its setting uses") {
    Dataset ds = small_dataset();
    HyperParams hp;
    hp.embed_dim = 6;
    auto params = zsl::init_model(ds.d_v(), ds.d_s(), ds.c_all(), hp, 5);

    Dataset no_unseen = ds;
    no_unseen.test_unseen.clear();
    CHECK_THROWS_AS(zsl::evaluate(params, no_unseen, Setting::Conventional), zsl::ConfigError);

    Dataset no_seen = ds;
    no_seen.test_seen.clear();
    CHECK_NOTHROW(zsl::evaluate(params, no_seen, Setting::Conventional));
    CHECK_THROWS_AS(zsl::evaluate(params, no_seen, Setting::Generalized), zsl::ConfigError);
}

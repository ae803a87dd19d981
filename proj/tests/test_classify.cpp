#include <doctest.h>

#include <cmath>
#include <vector>

#include "microbeam/classify.hpp"
#include "microbeam/errors.hpp"
#include "microbeam/rng.hpp"

using namespace microbeam;

namespace {

FusedFeature feature1d(double value, int label) {
    FusedFeature f;
    f.values = Eigen::VectorXd::Constant(1, value);
    f.label = label;
    return f;
}

FusedFeature random_feature(int dim, int label, RandomSource& rng) {
    FusedFeature f;
    f.values.resize(dim);
    for (int i = 0; i < dim; ++i) f.values[i] = rng.gaussian();
    f.label = label;
    return f;
}

// exhaustive-scan oracle with the same tie-break contract
int nn_oracle(const NnModel& model, const FusedFeature& query) {
    int best = -1;
    double best_dist = 0.0;
    for (std::size_t i = 0; i < model.features.size(); ++i) {
        const double dist = (query.values - model.features[i].values).norm();
        if (best < 0 || dist < best_dist) {
            best = static_cast<int>(i);
            best_dist = dist;
        }
    }
    return model.features[static_cast<std::size_t>(best)].label;
}

}  // namespace

TEST_CASE("predict") {
    SUBCASE("a stored training feature is its own nearest neighbor") {
        NnModel model;
        RandomSource rng(1);
        for (int i = 0; i < 10; ++i) model.features.push_back(random_feature(4, 1 + i % 2, rng));
        for (const FusedFeature& f : model.features) {
            CHECK(predict(model, f) == f.label);
        }
    }

    SUBCASE("1-D toy set") {
        NnModel model;
        model.features = {feature1d(0.0, 1), feature1d(10.0, 2)};
        CHECK(predict(model, feature1d(2.0, 0)) == 1);
        CHECK(predict(model, feature1d(9.0, 0)) == 2);
    }

    SUBCASE("exact ties go to the lowest training index") {
        NnModel model;
        model.features = {feature1d(1.0, 2), feature1d(-1.0, 1)};
        CHECK(predict(model, feature1d(0.0, 0)) == 2);
    }

    SUBCASE("matches the exhaustive-scan oracle on random sets") {
        RandomSource rng(7);
        for (int round = 0; round < 20; ++round) {
            NnModel model;
            for (int i = 0; i < 20; ++i) {
                model.features.push_back(random_feature(6, 1 + static_cast<int>(rng.bounded(3)), rng));
            }
            for (int trial = 0; trial < 25; ++trial) {
                const FusedFeature query = random_feature(6, 0, rng);
                CHECK(predict(model, query) == nn_oracle(model, query));
            }
        }
    }

    SUBCASE("global scaling never changes a prediction") {
        RandomSource rng(21);
        NnModel model;
        for (int i = 0; i < 15; ++i) model.features.push_back(random_feature(5, 1 + i % 2, rng));
        NnModel scaled = model;
        for (FusedFeature& f : scaled.features) f.values *= 37.5;
        for (int trial = 0; trial < 30; ++trial) {
            FusedFeature query = random_feature(5, 0, rng);
            const int base = predict(model, query);
            query.values *= 37.5;
            CHECK(predict(scaled, query) == base);
        }
    }

    SUBCASE("duplicating a training feature never changes a prediction") {
        RandomSource rng(33);
        NnModel model;
        for (int i = 0; i < 12; ++i) model.features.push_back(random_feature(3, 1 + i % 2, rng));
        NnModel duplicated = model;
        duplicated.features.push_back(model.features[4]);
        for (int trial = 0; trial < 30; ++trial) {
            const FusedFeature query = random_feature(3, 0, rng);
            CHECK(predict(duplicated, query) == predict(model, query));
        }
    }

    SUBCASE("structural errors") {
        NnModel empty;
        CHECK_THROWS_AS(predict(empty, feature1d(0.0, 0)), domain_error);
        NnModel model;
        model.features = {feature1d(0.0, 1)};
        FusedFeature wide;
        wide.values = Eigen::VectorXd::Zero(2);
        CHECK_THROWS_AS(predict(model, wide), dimension_error);
    }
}

TEST_CASE("evaluate") {
    NnModel model;
    model.features = {feature1d(0.0, 1), feature1d(10.0, 2)};

    SUBCASE("all-correct predictions give a 100% diagonal") {
        std::vector<FusedFeature> test = {feature1d(0.5, 1), feature1d(1.0, 1),
                                          feature1d(9.5, 2)};
        const ConfusionMatrix cm = evaluate(model, test);
        CHECK(cm.counts(0, 0) == 2);
        CHECK(cm.counts(1, 1) == 1);
        CHECK(cm.counts(0, 1) == 0);
        CHECK(cm.counts(1, 0) == 0);
        CHECK(cm.percentages(0, 0) == doctest::Approx(100.0));
        CHECK(cm.percentages(1, 1) == doctest::Approx(100.0));
        CHECK(cm.accuracy == doctest::Approx(1.0));
    }

    SUBCASE("a 122/3 class-1 split renders the (97.6, 2.4) column") {
        std::vector<FusedFeature> test;
        for (int i = 0; i < 122; ++i) test.push_back(feature1d(0.1, 1));
        for (int i = 0; i < 3; ++i) test.push_back(feature1d(9.0, 1));  // misclassified
        for (int i = 0; i < 40; ++i) test.push_back(feature1d(10.0, 2));
        const ConfusionMatrix cm = evaluate(model, test);
        CHECK(cm.percentages(0, 0) == doctest::Approx(97.6));
        CHECK(cm.percentages(1, 0) == doctest::Approx(2.4));
        CHECK(cm.percentages(0, 1) == doctest::Approx(0.0));
        CHECK(cm.percentages(1, 1) == doctest::Approx(100.0));
    }

    SUBCASE("one misclassified item of two shows as one off-diagonal count") {
        std::vector<FusedFeature> test = {feature1d(0.5, 1), feature1d(2.0, 2)};
        const ConfusionMatrix cm = evaluate(model, test);
        CHECK(cm.counts(0, 0) == 1);
        CHECK(cm.counts(0, 1) == 1);  // actual class 2 predicted class 1
        CHECK(cm.counts(1, 1) == 0);
        CHECK(cm.percentages(0, 0) == doctest::Approx(100.0));
        CHECK(cm.percentages(1, 0) == doctest::Approx(0.0));
        CHECK(cm.percentages(0, 1) == doctest::Approx(100.0));
        CHECK(cm.accuracy == doctest::Approx(0.5));
    }

    SUBCASE("percentage columns sum to 100 and counts to the per-class totals") {
        RandomSource rng(3);
        NnModel noisy;
        for (int i = 0; i < 30; ++i) noisy.features.push_back(random_feature(4, 1 + i % 2, rng));
        std::vector<FusedFeature> test;
        for (int i = 0; i < 17; ++i) test.push_back(random_feature(4, 1, rng));
        for (int i = 0; i < 23; ++i) test.push_back(random_feature(4, 2, rng));
        const ConfusionMatrix cm = evaluate(noisy, test);
        CHECK(cm.counts.col(0).sum() == 17);
        CHECK(cm.counts.col(1).sum() == 23);
        CHECK(cm.percentages.col(0).sum() == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(cm.percentages.col(1).sum() == doctest::Approx(100.0).epsilon(1e-9));
    }

    SUBCASE("test labels outside the class set are rejected") {
        std::vector<FusedFeature> test = {feature1d(0.5, 3)};
        CHECK_THROWS_AS(evaluate(model, test), domain_error);
        CHECK_THROWS_AS(evaluate(model, {}), domain_error);
    }

    SUBCASE("evaluating the training set itself memorizes perfectly") {
        RandomSource rng(5);
        NnModel memorizer;
        for (int i = 0; i < 16; ++i) memorizer.features.push_back(random_feature(8, 1 + i % 2, rng));
        const ConfusionMatrix cm = evaluate(memorizer, memorizer.features);
        CHECK(cm.accuracy == doctest::Approx(1.0));
    }
}

#include "microbeam/classify.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "microbeam/errors.hpp"

namespace microbeam {

void validate_model(const NnModel& model) {
    if (model.features.empty()) {
        throw domain_error("nearest-neighbor model needs at least one training feature");
    }
    const Eigen::Index dim = model.features.front().values.size();
    for (const FusedFeature& f : model.features) {
        if (f.values.size() != dim) {
            throw dimension_error("training features have inconsistent lengths");
        }
    }
}

int predict(const NnModel& model, const FusedFeature& feature) {
    validate_model(model);
    if (feature.values.size() != model.features.front().values.size()) {
        throw dimension_error("query length " + std::to_string(feature.values.size()) +
                              " does not match model feature length " +
                              std::to_string(model.features.front().values.size()));
    }
    std::size_t best = 0;
    double best_dist = (feature.values - model.features[0].values).squaredNorm();
    for (std::size_t i = 1; i < model.features.size(); ++i) {
        const double dist = (feature.values - model.features[i].values).squaredNorm();
        if (dist < best_dist) {  // strict: ties keep the lowest index
            best_dist = dist;
            best = i;
        }
    }
    return model.features[best].label;
}

ConfusionMatrix evaluate(const NnModel& model, const std::vector<FusedFeature>& test) {
    validate_model(model);
    if (test.empty()) {
        throw domain_error("evaluation needs a non-empty test set");
    }

    std::set<int> classes;
    for (const FusedFeature& f : model.features) classes.insert(f.label);

    ConfusionMatrix cm;
    cm.class_labels.assign(classes.begin(), classes.end());
    const int c = static_cast<int>(cm.class_labels.size());
    cm.counts = Eigen::MatrixXi::Zero(c, c);

    auto class_index = [&](int label) {
        const auto it = std::lower_bound(cm.class_labels.begin(), cm.class_labels.end(), label);
        if (it == cm.class_labels.end() || *it != label) {
            throw domain_error("test label " + std::to_string(label) +
                               " is outside the model's class set");
        }
        return static_cast<int>(it - cm.class_labels.begin());
    };

    for (const FusedFeature& f : test) {
        const int actual = class_index(f.label);
        const int predicted = class_index(predict(model, f));
        cm.counts(predicted, actual) += 1;
    }

    cm.percentages = Eigen::MatrixXd::Zero(c, c);
    for (int j = 0; j < c; ++j) {
        const int column_total = cm.counts.col(j).sum();
        if (column_total > 0) {
            cm.percentages.col(j) = cm.counts.col(j).cast<double>() * (100.0 / column_total);
        }
    }
    cm.accuracy = static_cast<double>(cm.counts.trace()) / cm.counts.sum();
    return cm;
}

std::string ConfusionMatrix::to_text() const {
    const int c = static_cast<int>(class_labels.size());
    std::string out = "Classified/Actual";
    char buf[96];
    for (int j = 0; j < c; ++j) {
        std::snprintf(buf, sizeof buf, "%14s-%d", "Class", class_labels[j]);
        out += buf;
    }
    out += '\n';
    for (int i = 0; i < c; ++i) {
        std::snprintf(buf, sizeof buf, "Class-%-11d", class_labels[i]);
        out += buf;
        for (int j = 0; j < c; ++j) {
            std::snprintf(buf, sizeof buf, "%9d (%4.1f%%)", counts(i, j), percentages(i, j));
            out += buf;
        }
        out += '\n';
    }
    std::snprintf(buf, sizeof buf, "Overall accuracy: %.2f%%\n", accuracy * 100.0);
    out += buf;
    return out;
}

}  // namespace microbeam

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "microbeam/features.hpp"

namespace microbeam {

enum class Metric { euclidean };

// Memorized training set; prediction is the label of the nearest stored
// feature, exact ties broken by lowest training index.
struct NnModel {
    std::vector<FusedFeature> features;
    Metric metric = Metric::euclidean;
};

// counts(i, j): test items of actual class j predicted as class i.
// percentages are column-normalized to 100.
struct ConfusionMatrix {
    std::vector<int> class_labels;  // sorted class set of the model
    Eigen::MatrixXi counts;
    Eigen::MatrixXd percentages;
    double accuracy = 0.0;

    std::string to_text() const;  // aligned human-readable table
};

void validate_model(const NnModel& model);

int predict(const NnModel& model, const FusedFeature& feature);

ConfusionMatrix evaluate(const NnModel& model, const std::vector<FusedFeature>& test);

}  // namespace microbeam

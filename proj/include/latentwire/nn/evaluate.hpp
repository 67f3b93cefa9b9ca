#pragma once

#include <span>

#include "latentwire/data/records.hpp"
#include "latentwire/nn/network.hpp"

namespace latentwire::nn {

Matrix<float> features_matrix(std::span<const data::FeatureVector> data);
Matrix<float> labels_matrix(std::span<const data::FeatureVector> data);

// (TP + TN) / N with class 1 predicted when the sigmoid output >= threshold.
double evaluate_accuracy(const Network<float>& net, std::span<const data::FeatureVector> data, double threshold = 0.5);
double accuracy_from_outputs(const Matrix<float>& outputs, std::span<const data::FeatureVector> data, double threshold = 0.5);

}  // namespace latentwire::nn

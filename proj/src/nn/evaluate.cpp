#include "latentwire/nn/evaluate.hpp"

#include "latentwire/nn/train.hpp"

namespace latentwire::nn {

Matrix<float> features_matrix(std::span<const data::FeatureVector> data) {
    if (data.empty()) return {};
    const std::size_t dim = data.front().features.size();
    Matrix<float> m(data.size(), dim);
    for (std::size_t r = 0; r < data.size(); ++r) {
        if (data[r].features.size() != dim) throw ShapeError("feature vectors have inconsistent dimensions");
        std::copy(data[r].features.begin(), data[r].features.end(), m.row(r).begin());
    }
    return m;
}

Matrix<float> labels_matrix(std::span<const data::FeatureVector> data) {
    Matrix<float> m(data.size(), 1);
    for (std::size_t r = 0; r < data.size(); ++r) m(r, 0) = data[r].label ? 1.0f : 0.0f;
    return m;
}

double accuracy_from_outputs(const Matrix<float>& outputs, std::span<const data::FeatureVector> data, double threshold) {
    if (data.empty()) throw Error("evaluate_accuracy: empty data");
    if (outputs.cols() != 1 || outputs.rows() != data.size()) throw ShapeError("accuracy needs one output per sample");
    std::size_t correct = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const int predicted = static_cast<double>(outputs(r, 0)) >= threshold ? 1 : 0;
        if (predicted == data[r].label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

double evaluate_accuracy(const Network<float>& net, std::span<const data::FeatureVector> data, double threshold) {
    if (data.empty()) throw Error("evaluate_accuracy: empty data");
    return accuracy_from_outputs(predict(net, features_matrix(data)), data, threshold);
}

}  // namespace latentwire::nn

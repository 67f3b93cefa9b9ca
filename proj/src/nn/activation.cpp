#include "latentwire/nn/activation.hpp"

#include "latentwire/errors.hpp"
#include "latentwire/nn/loss.hpp"

namespace latentwire::nn {

std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::sigmoid: return "sigmoid";
        case ActivationKind::relu: return "relu";
        case ActivationKind::tanh: return "tanh";
        case ActivationKind::elu: return "elu";
        case ActivationKind::linear: return "linear";
    }
    return "linear";
}

ActivationKind activation_from_string(const std::string& name) {
    if (name == "sigmoid") return ActivationKind::sigmoid;
    if (name == "relu") return ActivationKind::relu;
    if (name == "tanh") return ActivationKind::tanh;
    if (name == "elu") return ActivationKind::elu;
    if (name == "linear") return ActivationKind::linear;
    throw ConfigError("activation", "unknown activation '" + name + "'");
}

std::string to_string(LossKind kind) {
    return kind == LossKind::binary_cross_entropy ? "binary_cross_entropy" : "mean_squared_error";
}

}  // namespace latentwire::nn

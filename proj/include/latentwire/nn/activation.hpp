#pragma once

#include <cmath>
#include <string>

namespace latentwire::nn {

enum class ActivationKind { sigmoid, relu, tanh, elu, linear };

std::string to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);

template <typename T>
inline T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
inline T activate(ActivationKind kind, T x) {
    switch (kind) {
        case ActivationKind::sigmoid: return sigmoid(x);
        case ActivationKind::relu: return x > T(0) ? x : T(0);
        case ActivationKind::tanh: return std::tanh(x);
        case ActivationKind::elu: return x > T(0) ? x : std::expm1(x);
        case ActivationKind::linear: return x;
    }
    return x;
}

// d activation / d pre, expressed through the pre-activation and the output.
template <typename T>
inline T activation_derivative(ActivationKind kind, T pre, T out) {
    switch (kind) {
        case ActivationKind::sigmoid: return out * (T(1) - out);
        case ActivationKind::relu: return pre > T(0) ? T(1) : T(0);
        case ActivationKind::tanh: return T(1) - out * out;
        case ActivationKind::elu: return pre > T(0) ? T(1) : out + T(1);
        case ActivationKind::linear: return T(1);
    }
    return T(1);
}

}  // namespace latentwire::nn

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "latentwire/errors.hpp"
#include "latentwire/nn/matrix.hpp"

namespace latentwire::nn {

enum class LossKind { binary_cross_entropy, mean_squared_error };

inline constexpr double kBceEpsilon = 1e-7;

std::string to_string(LossKind kind);

// Per-sample loss, averaged over the N output coordinates.
template <typename T>
T loss_value(LossKind kind, std::span<const T> predicted, std::span<const T> target) {
    if (predicted.size() != target.size()) throw ShapeError("loss_value: length mismatch");
    if (predicted.empty()) throw ShapeError("loss_value: empty vectors");
    T sum{0};
    if (kind == LossKind::mean_squared_error) {
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            T d = target[i] - predicted[i];
            sum += d * d;
        }
    } else {
        const T eps = static_cast<T>(kBceEpsilon);
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            T p = std::clamp(predicted[i], eps, T(1) - eps);
            sum -= target[i] * std::log(p) + (T(1) - target[i]) * std::log(T(1) - p);
        }
    }
    return sum / static_cast<T>(predicted.size());
}

// Mean loss over a batch and its gradient w.r.t. the network output (or, when
// `fused_sigmoid` is set for BCE, w.r.t. the sigmoid head's pre-activation).
template <typename T>
T batch_loss(LossKind kind, const Matrix<T>& predicted, const Matrix<T>& target, Matrix<T>& grad, bool fused_sigmoid) {
    if (predicted.rows() != target.rows() || predicted.cols() != target.cols()) throw ShapeError("batch_loss: shape mismatch");
    const std::size_t batch = predicted.rows(), n = predicted.cols();
    grad.resize(batch, n);
    const T scale = T(1) / static_cast<T>(batch * n);
    const T eps = static_cast<T>(kBceEpsilon);
    T total{0};
    for (std::size_t b = 0; b < batch; ++b) {
        total += loss_value<T>(kind, predicted.row(b), target.row(b));
        for (std::size_t j = 0; j < n; ++j) {
            const T p = predicted(b, j), t = target(b, j);
            if (kind == LossKind::mean_squared_error) {
                grad(b, j) = T(2) * (p - t) * scale;
            } else if (fused_sigmoid) {
                grad(b, j) = (p - t) * scale;
            } else {
                const bool clamped = p < eps || p > T(1) - eps;
                grad(b, j) = clamped ? T(0) : (p - t) / (p * (T(1) - p)) * scale;
            }
        }
    }
    return total / static_cast<T>(batch);
}

}  // namespace latentwire::nn

#pragma once

#include <span>
#include <vector>

#include "latentwire/nn/activation.hpp"
#include "latentwire/nn/kernels.hpp"
#include "latentwire/nn/matrix.hpp"

namespace latentwire::nn {

template <typename T>
struct DenseCache {
    Matrix<T> pre;
};

// y = activation(W x + b), W is out x in.
template <typename T>
class Dense {
public:
    Dense() = default;
    Dense(std::size_t in, std::size_t out, ActivationKind activation)
        : weights_(out, in), bias_(out, T{0}), activation_(activation), grad_weights_(out, in), grad_bias_(out, T{0}) {}
    Dense(Matrix<T> weights, std::vector<T> bias, ActivationKind activation)
        : weights_(std::move(weights)), bias_(std::move(bias)), activation_(activation),
          grad_weights_(weights_.rows(), weights_.cols()), grad_bias_(bias_.size(), T{0}) {
        if (bias_.size() != weights_.rows()) throw ShapeError("dense bias length must equal weight rows");
    }

    std::size_t input_dim() const noexcept { return weights_.cols(); }
    std::size_t output_dim() const noexcept { return weights_.rows(); }
    ActivationKind activation() const noexcept { return activation_; }
    void set_activation(ActivationKind a) noexcept { activation_ = a; }

    Matrix<T>& weights() noexcept { return weights_; }
    const Matrix<T>& weights() const noexcept { return weights_; }
    std::vector<T>& bias() noexcept { return bias_; }
    const std::vector<T>& bias() const noexcept { return bias_; }

    // Single-vector forward; the same per-element operation order as the
    // batched path (sum from zero in ascending input index, then bias).
    void forward_row(std::span<const T> x, std::span<T> y) const {
        if (x.size() != input_dim() || y.size() != output_dim()) throw ShapeError("dense_forward: dimension mismatch");
        for (std::size_t j = 0; j < output_dim(); ++j) {
            const T* w = weights_.data() + j * input_dim();
            T acc{0};
            for (std::size_t k = 0; k < input_dim(); ++k) acc += x[k] * w[k];
            y[j] = activate(activation_, acc + bias_[j]);
        }
    }

    Matrix<T> forward(const Matrix<T>& x, DenseCache<T>* cache) const {
        if (x.cols() != input_dim()) {
            throw ShapeError("dense layer expects " + std::to_string(input_dim()) + " inputs, got " + std::to_string(x.cols()));
        }
        const std::size_t batch = x.rows(), in = input_dim(), out = output_dim();
        const Matrix<T> wt = transpose(weights_);
        Matrix<T> pre(batch, out);
        kernels::parallel::gemm_nn(batch, out, in, x.data(), in, wt.data(), out, pre.data(), out, false);
        Matrix<T> y(batch, out);
        for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t j = 0; j < out; ++j) {
                pre(b, j) += bias_[j];
                y(b, j) = activate(activation_, pre(b, j));
            }
        }
        if (cache) cache->pre = std::move(pre);
        return y;
    }

    // Accumulates parameter gradients. `grad_is_pre` means `grad` is already
    // d loss / d pre-activation (fused sigmoid + cross-entropy head).
    Matrix<T> backward(const Matrix<T>& x, const Matrix<T>& y, const DenseCache<T>& cache, const Matrix<T>& grad,
                       bool grad_is_pre, bool need_input_grad) {
        const std::size_t batch = x.rows(), in = input_dim(), out = output_dim();
        Matrix<T> dpre(batch, out);
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t j = 0; j < out; ++j)
                dpre(b, j) = grad_is_pre ? grad(b, j) : grad(b, j) * activation_derivative(activation_, cache.pre(b, j), y(b, j));

        kernels::parallel::gemm_tn(batch, in, out, dpre.data(), out, x.data(), in, grad_weights_.data(), in);
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t j = 0; j < out; ++j) grad_bias_[j] += dpre(b, j);

        Matrix<T> dx;
        if (need_input_grad) {
            dx.resize(batch, in);
            kernels::parallel::gemm_nn(batch, in, out, dpre.data(), out, weights_.data(), in, dx.data(), in, false);
        }
        return dx;
    }

    void zero_grad() {
        grad_weights_.fill(T{0});
        std::fill(grad_bias_.begin(), grad_bias_.end(), T{0});
    }

    template <typename F>
    void for_each_parameter(F&& f) {
        f(weights_.values(), grad_weights_.values());
        f(std::span<T>(bias_), std::span<T>(grad_bias_));
    }

private:
    Matrix<T> weights_;
    std::vector<T> bias_;
    ActivationKind activation_ = ActivationKind::linear;
    Matrix<T> grad_weights_;
    std::vector<T> grad_bias_;
};

}  // namespace latentwire::nn

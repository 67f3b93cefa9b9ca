#pragma once

#include <cmath>
#include <random>
#include <variant>
#include <vector>

#include "latentwire/nn/dense.hpp"
#include "latentwire/nn/loss.hpp"
#include "latentwire/nn/lstm.hpp"
#include "latentwire/rng.hpp"

namespace latentwire::nn {

template <typename T>
using Layer = std::variant<Dense<T>, Lstm<T>>;

template <typename T>
struct Trace {
    std::vector<Matrix<T>> activations;  // activations[0] is the input
    std::vector<std::variant<DenseCache<T>, LstmCache<T>>> caches;
};

template <typename T>
class Network {
public:
    Network() = default;
    explicit Network(std::vector<Layer<T>> layers) : layers_(std::move(layers)) { check_shapes(); }

    void add(Layer<T> layer) {
        layers_.push_back(std::move(layer));
        check_shapes();
    }

    std::size_t size() const noexcept { return layers_.size(); }
    Layer<T>& layer(std::size_t i) { return layers_.at(i); }
    const Layer<T>& layer(std::size_t i) const { return layers_.at(i); }
    const std::vector<Layer<T>>& layers() const noexcept { return layers_; }

    std::size_t input_dim() const {
        if (layers_.empty()) return 0;
        return std::visit([](const auto& l) { return l.input_dim(); }, layers_.front());
    }

    // Output width for a given input width (LSTM widths depend on step count).
    std::size_t output_width(std::size_t input_width) const {
        std::size_t w = input_width;
        for (const auto& l : layers_) {
            if (const auto* d = std::get_if<Dense<T>>(&l)) {
                if (d->input_dim() != w) throw ShapeError("network shape mismatch at a dense layer");
                w = d->output_dim();
            } else {
                w = std::get<Lstm<T>>(l).output_width(w);
            }
        }
        return w;
    }

    Matrix<T> forward(const Matrix<T>& x) const {
        Matrix<T> a = x;
        for (const auto& l : layers_) a = std::visit([&](const auto& layer) { return layer.forward(a, nullptr); }, l);
        return a;
    }

    Matrix<T> forward(const Matrix<T>& x, Trace<T>& trace) const {
        trace.activations.clear();
        trace.caches.clear();
        trace.activations.push_back(x);
        for (const auto& l : layers_) {
            if (const auto* d = std::get_if<Dense<T>>(&l)) {
                DenseCache<T> c;
                trace.activations.push_back(d->forward(trace.activations.back(), &c));
                trace.caches.emplace_back(std::move(c));
            } else {
                LstmCache<T> c;
                trace.activations.push_back(std::get<Lstm<T>>(l).forward(trace.activations.back(), &c));
                trace.caches.emplace_back(std::move(c));
            }
        }
        return trace.activations.back();
    }

    bool has_sigmoid_head() const {
        if (layers_.empty()) return false;
        const auto* d = std::get_if<Dense<T>>(&layers_.back());
        return d && d->activation() == ActivationKind::sigmoid;
    }

    // Accumulates gradients of every parameter; call zero_grad() first.
    void backward(const Trace<T>& trace, const Matrix<T>& grad_output, bool grad_is_head_pre) {
        Matrix<T> g = grad_output;
        for (std::size_t li = layers_.size(); li-- > 0;) {
            const bool need_input = li > 0;
            const Matrix<T>& in = trace.activations[li];
            if (auto* d = std::get_if<Dense<T>>(&layers_[li])) {
                g = d->backward(in, trace.activations[li + 1], std::get<DenseCache<T>>(trace.caches[li]), g,
                                grad_is_head_pre && li + 1 == layers_.size(), need_input);
            } else {
                g = std::get<Lstm<T>>(layers_[li]).backward(in, std::get<LstmCache<T>>(trace.caches[li]), g, need_input);
            }
        }
    }

    void zero_grad() {
        for (auto& l : layers_) std::visit([](auto& layer) { layer.zero_grad(); }, l);
    }

    // f(values, grads) for every parameter block, in layer order.
    template <typename F>
    void for_each_parameter(F&& f) {
        for (auto& l : layers_) std::visit([&](auto& layer) { layer.for_each_parameter(f); }, l);
    }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for_each_parameter([&](std::span<T> v, std::span<T>) { n += v.size(); });
        return n;
    }

private:
    void check_shapes() const {
        if (layers_.empty()) return;
        // A dense layer after an LSTM must match its output width; a leading
        // LSTM accepts any multiple of its input_dim so it is not checked here.
        std::size_t w = input_dim();
        if (std::holds_alternative<Lstm<T>>(layers_.front())) return;
        (void)output_width(w);
    }

    std::vector<Layer<T>> layers_;
};

// Glorot-uniform input weights, uniform(+-1/sqrt(U)) recurrent weights, zero
// biases except the LSTM forget gate (1.0).
template <typename T>
void initialize(Network<T>& net, std::uint64_t seed) {
    Rng rng(seed);
    auto fill_uniform = [&](std::span<T> v, double limit) {
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (auto& x : v) x = static_cast<T>(dist(rng));
    };
    for (std::size_t i = 0; i < net.size(); ++i) {
        auto& l = net.layer(i);
        if (auto* d = std::get_if<Dense<T>>(&l)) {
            const double limit = std::sqrt(6.0 / static_cast<double>(d->input_dim() + d->output_dim()));
            fill_uniform(d->weights().values(), limit);
            std::fill(d->bias().begin(), d->bias().end(), T{0});
        } else {
            auto& r = std::get<Lstm<T>>(l);
            const double units = static_cast<double>(r.units());
            fill_uniform(r.input_weights().values(), std::sqrt(6.0 / (static_cast<double>(r.input_dim()) + 4.0 * units)));
            fill_uniform(r.recurrent_weights().values(), 1.0 / std::sqrt(units));
            std::fill(r.bias().begin(), r.bias().end(), T{0});
            for (std::size_t u = 0; u < r.units(); ++u) r.gate_bias(Gate::forget, u) = T{1};
        }
    }
}

}  // namespace latentwire::nn

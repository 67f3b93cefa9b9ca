#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "latentwire/nn/activation.hpp"
#include "latentwire/nn/kernels.hpp"
#include "latentwire/nn/matrix.hpp"

namespace latentwire::nn {

// Gate blocks inside the stacked 4U parameter rows.
enum class Gate : std::size_t { input = 0, forget = 1, cell = 2, output = 3 };

template <typename T>
struct LstmCache {
    std::size_t steps = 0;
    std::vector<Matrix<T>> gates;  // per step, B x 4U post-activation (i, f, g, o)
    std::vector<Matrix<T>> cell;   // per step, B x U
    std::vector<Matrix<T>> hidden; // per step, B x U
};

// Standard LSTM:
//   i = s(Wi x + Ui h + bi), f = s(Wf x + Uf h + bf), o = s(Wo x + Uo h + bo)
//   g = tanh(Wc x + Uc h + bc), c' = f*c + i*g, h' = o*tanh(c')
// The four gate matrices are stacked row-wise into one 4U x in matrix.
template <typename T>
class Lstm {
public:
    Lstm() = default;
    Lstm(std::size_t input_dim, std::size_t units, bool return_sequences)
        : units_(units), input_dim_(input_dim), return_sequences_(return_sequences), input_weights_(4 * units, input_dim),
          recurrent_weights_(4 * units, units), bias_(4 * units, T{0}), grad_input_weights_(4 * units, input_dim),
          grad_recurrent_weights_(4 * units, units), grad_bias_(4 * units, T{0}) {}

    std::size_t units() const noexcept { return units_; }
    std::size_t input_dim() const noexcept { return input_dim_; }
    bool return_sequences() const noexcept { return return_sequences_; }

    Matrix<T>& input_weights() noexcept { return input_weights_; }
    const Matrix<T>& input_weights() const noexcept { return input_weights_; }
    Matrix<T>& recurrent_weights() noexcept { return recurrent_weights_; }
    const Matrix<T>& recurrent_weights() const noexcept { return recurrent_weights_; }
    std::vector<T>& bias() noexcept { return bias_; }
    const std::vector<T>& bias() const noexcept { return bias_; }

    // Row `u` of one gate's input weight matrix.
    std::span<T> gate_input_row(Gate g, std::size_t u) { return input_weights_.row(static_cast<std::size_t>(g) * units_ + u); }
    std::span<T> gate_recurrent_row(Gate g, std::size_t u) {
        return recurrent_weights_.row(static_cast<std::size_t>(g) * units_ + u);
    }
    T& gate_bias(Gate g, std::size_t u) { return bias_[static_cast<std::size_t>(g) * units_ + u]; }

    std::size_t steps_for(std::size_t width) const {
        if (input_dim_ == 0 || width % input_dim_ != 0 || width == 0) {
            throw ShapeError("lstm input width " + std::to_string(width) + " is not a positive multiple of input_dim " +
                             std::to_string(input_dim_));
        }
        return width / input_dim_;
    }
    std::size_t output_width(std::size_t input_width) const {
        return return_sequences_ ? steps_for(input_width) * units_ : units_;
    }

    // One recurrence step for a single sample; h and c are updated in place.
    void step(std::span<const T> x, std::span<T> h, std::span<T> c) const {
        if (x.size() != input_dim_ || h.size() != units_ || c.size() != units_) throw ShapeError("lstm step: shape mismatch");
        std::vector<T> z(4 * units_);
        for (std::size_t r = 0; r < 4 * units_; ++r) {
            T acc{0};
            for (std::size_t k = 0; k < input_dim_; ++k) acc += x[k] * input_weights_(r, k);
            for (std::size_t k = 0; k < units_; ++k) acc += h[k] * recurrent_weights_(r, k);
            z[r] = acc + bias_[r];
        }
        for (std::size_t u = 0; u < units_; ++u) {
            T i = sigmoid(z[u]);
            T f = sigmoid(z[units_ + u]);
            T g = std::tanh(z[2 * units_ + u]);
            T o = sigmoid(z[3 * units_ + u]);
            c[u] = f * c[u] + i * g;
            h[u] = o * std::tanh(c[u]);
        }
    }

    Matrix<T> forward(const Matrix<T>& x, LstmCache<T>* cache) const {
        const std::size_t batch = x.rows(), steps = steps_for(x.cols()), U = units_, G = 4 * units_, I = input_dim_;
        const Matrix<T> wxt = transpose(input_weights_);
        const Matrix<T> wht = transpose(recurrent_weights_);
        Matrix<T> h(batch, U), c(batch, U), z(batch, G);
        Matrix<T> y(batch, return_sequences_ ? steps * U : U);
        if (cache) {
            cache->steps = steps;
            cache->gates.assign(steps, Matrix<T>());
            cache->cell.assign(steps, Matrix<T>());
            cache->hidden.assign(steps, Matrix<T>());
        }
        for (std::size_t t = 0; t < steps; ++t) {
            kernels::parallel::gemm_nn(batch, G, I, x.data() + t * I, x.cols(), wxt.data(), G, z.data(), G, false);
            if (t > 0) kernels::parallel::gemm_nn(batch, G, U, h.data(), U, wht.data(), G, z.data(), G, true);
            for (std::size_t b = 0; b < batch; ++b) {
                T* zb = &z(b, 0);
                for (std::size_t r = 0; r < G; ++r) zb[r] += bias_[r];
                for (std::size_t u = 0; u < U; ++u) {
                    T i = sigmoid(zb[u]);
                    T f = sigmoid(zb[U + u]);
                    T g = std::tanh(zb[2 * U + u]);
                    T o = sigmoid(zb[3 * U + u]);
                    zb[u] = i;
                    zb[U + u] = f;
                    zb[2 * U + u] = g;
                    zb[3 * U + u] = o;
                    T cn = f * c(b, u) + i * g;
                    c(b, u) = cn;
                    h(b, u) = o * std::tanh(cn);
                }
            }
            if (return_sequences_) {
                for (std::size_t b = 0; b < batch; ++b)
                    for (std::size_t u = 0; u < U; ++u) y(b, t * U + u) = h(b, u);
            }
            if (cache) {
                cache->gates[t] = z;
                cache->cell[t] = c;
                cache->hidden[t] = h;
            }
        }
        if (!return_sequences_) y = h;
        return y;
    }

    // Full backpropagation through time over the cached unroll.
    Matrix<T> backward(const Matrix<T>& x, const LstmCache<T>& cache, const Matrix<T>& grad, bool need_input_grad) {
        const std::size_t batch = x.rows(), steps = cache.steps, U = units_, G = 4 * units_, I = input_dim_;
        Matrix<T> dh(batch, U), dc(batch, U), dz(batch, G), dh_prev(batch, U);
        Matrix<T> dx;
        if (need_input_grad) dx.resize(batch, x.cols());

        for (std::size_t tt = steps; tt-- > 0;) {
            for (std::size_t b = 0; b < batch; ++b) {
                for (std::size_t u = 0; u < U; ++u) {
                    T g_out{0};
                    if (return_sequences_) g_out = grad(b, tt * U + u);
                    else if (tt == steps - 1) g_out = grad(b, u);
                    const T dhv = dh(b, u) + g_out;
                    const T* gb = &cache.gates[tt](b, 0);
                    const T i = gb[u], f = gb[U + u], g = gb[2 * U + u], o = gb[3 * U + u];
                    const T ct = cache.cell[tt](b, u);
                    const T cprev = tt > 0 ? cache.cell[tt - 1](b, u) : T{0};
                    const T tc = std::tanh(ct);
                    const T dcv = dc(b, u) + dhv * o * (T(1) - tc * tc);
                    T* dzb = &dz(b, 0);
                    dzb[u] = dcv * g * i * (T(1) - i);
                    dzb[U + u] = dcv * cprev * f * (T(1) - f);
                    dzb[2 * U + u] = dcv * i * (T(1) - g * g);
                    dzb[3 * U + u] = dhv * tc * o * (T(1) - o);
                    dc(b, u) = dcv * f;
                }
            }
            kernels::parallel::gemm_tn(batch, I, G, dz.data(), G, x.data() + tt * I, x.cols(), grad_input_weights_.data(), I);
            if (tt > 0) {
                kernels::parallel::gemm_tn(batch, U, G, dz.data(), G, cache.hidden[tt - 1].data(), U,
                                           grad_recurrent_weights_.data(), U);
            }
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t r = 0; r < G; ++r) grad_bias_[r] += dz(b, r);
            if (need_input_grad) {
                kernels::parallel::gemm_nn(batch, I, G, dz.data(), G, input_weights_.data(), I, dx.data() + tt * I, x.cols(),
                                           false);
            }
            kernels::parallel::gemm_nn(batch, U, G, dz.data(), G, recurrent_weights_.data(), U, dh.data(), U, false);
        }
        return dx;
    }

    void zero_grad() {
        grad_input_weights_.fill(T{0});
        grad_recurrent_weights_.fill(T{0});
        std::fill(grad_bias_.begin(), grad_bias_.end(), T{0});
    }

    template <typename F>
    void for_each_parameter(F&& f) {
        f(input_weights_.values(), grad_input_weights_.values());
        f(recurrent_weights_.values(), grad_recurrent_weights_.values());
        f(std::span<T>(bias_), std::span<T>(grad_bias_));
    }

private:
    std::size_t units_ = 0;
    std::size_t input_dim_ = 0;
    bool return_sequences_ = false;
    Matrix<T> input_weights_;
    Matrix<T> recurrent_weights_;
    std::vector<T> bias_;
    Matrix<T> grad_input_weights_;
    Matrix<T> grad_recurrent_weights_;
    std::vector<T> grad_bias_;
};

// Final hidden state of a single sequence.
template <typename T>
std::vector<T> lstm_forward(const Lstm<T>& layer, const std::vector<std::vector<T>>& sequence) {
    if (sequence.empty()) throw ShapeError("lstm_forward: empty sequence");
    std::vector<T> h(layer.units(), T{0}), c(layer.units(), T{0});
    for (const auto& x : sequence) layer.step(x, h, c);
    return h;
}

}  // namespace latentwire::nn

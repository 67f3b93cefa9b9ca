#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "latentwire/errors.hpp"
#include "latentwire/nn/network.hpp"

namespace latentwire::nn {

struct TrainingConfig {
    double learning_rate = 0.001;
    std::size_t epochs = 1;
    std::size_t batch_size = 256;
    double decay = 0.0;  // lr_t = learning_rate / (1 + decay * completed_epochs)
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate", "must be positive");
        if (epochs == 0) throw ConfigError("epochs", "must be positive (no training requested)");
        if (batch_size == 0) throw ConfigError("batch_size", "must be positive");
        if (!(decay >= 0.0)) throw ConfigError("decay", "must be non-negative");
    }
};

// decay = learning rate / epochs
inline double inverse_time_decay(double learning_rate, std::size_t epochs) {
    return learning_rate / static_cast<double>(epochs);
}

inline double effective_learning_rate(const TrainingConfig& cfg, std::size_t completed_epochs) {
    return cfg.learning_rate / (1.0 + cfg.decay * static_cast<double>(completed_epochs));
}

template <typename T>
class Adam {
public:
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double epsilon = 1e-8;

    explicit Adam(Network<T>& net) {
        net.for_each_parameter([&](std::span<T> v, std::span<T>) {
            m_.emplace_back(v.size(), 0.0);
            v_.emplace_back(v.size(), 0.0);
        });
    }

    std::size_t steps() const noexcept { return t_; }

    void step(Network<T>& net, double lr) {
        ++t_;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        std::size_t block = 0;
        net.for_each_parameter([&](std::span<T> values, std::span<T> grads) {
            auto& m = m_[block];
            auto& v = v_[block];
            for (std::size_t i = 0; i < values.size(); ++i) {
                const double g = static_cast<double>(grads[i]);
                m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                const double mhat = m[i] / c1;
                const double vhat = v[i] / c2;
                values[i] = static_cast<T>(static_cast<double>(values[i]) - lr * mhat / (std::sqrt(vhat) + epsilon));
            }
            ++block;
        });
    }

private:
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::size_t t_ = 0;
};

// Loss and parameter gradients for one batch, without updating.
template <typename T>
T compute_gradients(Network<T>& net, const Matrix<T>& x, const Matrix<T>& y, LossKind loss, Matrix<T>* outputs = nullptr) {
    Trace<T> trace;
    const Matrix<T>& out = net.forward(x, trace);
    const bool fused = loss == LossKind::binary_cross_entropy && net.has_sigmoid_head();
    Matrix<T> grad;
    const T value = batch_loss(loss, out, y, grad, fused);
    net.zero_grad();
    net.backward(trace, grad, fused);
    if (outputs) *outputs = out;
    return value;
}

template <typename T>
T backward_and_step(Network<T>& net, Adam<T>& opt, const Matrix<T>& x, const Matrix<T>& y, LossKind loss, double lr,
                    std::size_t epoch, std::size_t batch_index, Matrix<T>* outputs = nullptr) {
    const T value = compute_gradients(net, x, y, loss, outputs);
    if (!std::isfinite(static_cast<double>(value))) throw DivergedError(epoch, batch_index, "non-finite loss");
    bool finite = true;
    net.for_each_parameter([&](std::span<T>, std::span<T> g) {
        for (T v : g) finite = finite && std::isfinite(static_cast<double>(v));
    });
    if (!finite) throw DivergedError(epoch, batch_index, "non-finite gradient");
    opt.step(net, lr);
    return value;
}

template <typename T>
Matrix<T> gather_rows(const Matrix<T>& m, std::span<const std::size_t> idx) {
    Matrix<T> out(idx.size(), m.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) std::copy_n(m.row(idx[r]).data(), m.cols(), out.row(r).data());
    return out;
}

template <typename T>
using BatchObserver = std::function<void(std::span<const std::size_t> rows, const Matrix<T>& outputs)>;

// Mini-batch training with per-epoch shuffling. `on_epoch(epoch, mean_loss)`
// runs after each epoch; `on_batch` sees each batch's pre-update outputs.
template <typename T>
void fit(Network<T>& net, const Matrix<T>& x, const Matrix<T>& y, const TrainingConfig& cfg, LossKind loss,
         const std::function<void(std::size_t, double)>& on_epoch, const BatchObserver<T>& on_batch = {}) {
    cfg.validate();
    if (x.rows() == 0 || x.rows() != y.rows()) throw ShapeError("fit: inputs and targets must be non-empty and aligned");
    Adam<T> opt(net);
    Rng rng(mix_seed(cfg.seed, 0x5348u));
    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const double lr = effective_learning_rate(cfg, epoch);
        double total = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
            const std::size_t n = std::min(cfg.batch_size, order.size() - start);
            std::span<const std::size_t> idx(order.data() + start, n);
            Matrix<T> outputs;
            const T l = backward_and_step(net, opt, gather_rows(x, idx), gather_rows(y, idx), loss, lr, epoch, batch_index,
                                          on_batch ? &outputs : nullptr);
            if (on_batch) on_batch(idx, outputs);
            total += static_cast<double>(l) * static_cast<double>(n);
        }
        if (on_epoch) on_epoch(epoch, total / static_cast<double>(order.size()));
    }
}

// Mean loss over a dataset, evaluated in batches.
template <typename T>
double dataset_loss(const Network<T>& net, const Matrix<T>& x, const Matrix<T>& y, LossKind loss,
                    std::size_t batch_size = 1024) {
    double total = 0.0;
    for (std::size_t start = 0; start < x.rows(); start += batch_size) {
        const std::size_t n = std::min(batch_size, x.rows() - start);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), start);
        const Matrix<T> out = net.forward(gather_rows(x, idx));
        const Matrix<T> tgt = gather_rows(y, idx);
        for (std::size_t r = 0; r < n; ++r) total += static_cast<double>(loss_value<T>(loss, out.row(r), tgt.row(r)));
    }
    return total / static_cast<double>(x.rows());
}

template <typename T>
Matrix<T> predict(const Network<T>& net, const Matrix<T>& x, std::size_t batch_size = 1024) {
    Matrix<T> out;
    for (std::size_t start = 0; start < x.rows(); start += batch_size) {
        const std::size_t n = std::min(batch_size, x.rows() - start);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), start);
        const Matrix<T> part = net.forward(gather_rows(x, idx));
        if (start == 0) out.resize(x.rows(), part.cols());
        std::copy_n(part.data(), part.size(), out.row(start).data());
    }
    return out;
}

}  // namespace latentwire::nn

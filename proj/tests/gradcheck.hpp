#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "latentwire/nn/network.hpp"
#include "latentwire/nn/train.hpp"

namespace lwtest {

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t parameters = 0;
};

// Central differences with step h against the analytic gradient of the mean
// batch loss, over every parameter of `net`.
inline GradCheckResult grad_check(latentwire::nn::Network<double>& net, const latentwire::nn::Matrix<double>& x,
                                  const latentwire::nn::Matrix<double>& y, latentwire::nn::LossKind loss,
                                  double h = 1e-5) {
    using namespace latentwire::nn;
    compute_gradients(net, x, y, loss);
    std::vector<std::vector<double>> analytic;
    net.for_each_parameter([&](std::span<double>, std::span<double> g) { analytic.emplace_back(g.begin(), g.end()); });

    auto loss_at = [&]() {
        Matrix<double> grad;
        return batch_loss(loss, net.forward(x), y, grad, false);
    };
    GradCheckResult r;
    std::size_t block = 0;
    net.for_each_parameter([&](std::span<double> v, std::span<double>) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double keep = v[i];
            v[i] = keep + h;
            const double up = loss_at();
            v[i] = keep - h;
            const double down = loss_at();
            v[i] = keep;
            const double numeric = (up - down) / (2.0 * h);
            const double a = analytic[block][i];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
            r.max_relative_error = std::max(r.max_relative_error, std::abs(a - numeric) / denom);
            ++r.parameters;
        }
        ++block;
    });
    return r;
}

inline latentwire::nn::Matrix<double> random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0,
                                                    double hi = 1.0) {
    latentwire::Rng rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    latentwire::nn::Matrix<double> m(rows, cols);
    for (auto& v : m.values()) v = u(rng);
    return m;
}

// Encoder-shaped toy net: dense latent, two LSTMs, dense stack, sigmoid head.
inline latentwire::nn::Network<double> toy_recurrent_net(std::size_t input, std::size_t latent, std::uint64_t seed) {
    using namespace latentwire::nn;
    Network<double> net;
    net.add(Dense<double>(input, latent, ActivationKind::sigmoid));
    net.add(Lstm<double>(1, 5, true));
    net.add(Lstm<double>(5, 4, false));
    net.add(Dense<double>(4, 3, ActivationKind::tanh));
    net.add(Dense<double>(3, 1, ActivationKind::sigmoid));
    initialize(net, seed);
    // Non-zero biases so every bias gradient is exercised away from symmetry.
    latentwire::Rng rng(seed + 1);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    net.for_each_parameter([&](std::span<double> v, std::span<double>) {
        for (auto& p : v) p += u(rng) * 0.1;
    });
    return net;
}

// Decoder-shaped toy net: latent in, elu/tanh hidden layers, sigmoid out.
inline latentwire::nn::Network<double> toy_dense_net(std::size_t latent, std::size_t output, std::uint64_t seed) {
    using namespace latentwire::nn;
    Network<double> net;
    net.add(Dense<double>(latent, 8, ActivationKind::elu));
    net.add(Dense<double>(8, 6, ActivationKind::tanh));
    net.add(Dense<double>(6, output, ActivationKind::sigmoid));
    initialize(net, seed);
    return net;
}

}  // namespace lwtest

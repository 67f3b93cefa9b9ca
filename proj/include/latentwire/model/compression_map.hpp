#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/codec.hpp"
#include "latentwire/data/records.hpp"
#include "latentwire/nn/activation.hpp"
#include "latentwire/nn/matrix.hpp"

namespace latentwire::model {

inline constexpr int kMapFormatVersion = 1;

// Z = activation(W x + b): the whole computation a probe performs.
template <typename T>
struct LatentProjection {
    nn::Matrix<T> weights;  // latent_size x input_dim
    std::vector<T> bias;    // latent_size
    nn::ActivationKind activation = nn::ActivationKind::sigmoid;

    std::size_t latent_size() const noexcept { return weights.rows(); }
    std::size_t input_dim() const noexcept { return weights.cols(); }
};

struct NoOpCount {
    void multiply() noexcept {}
    void add() noexcept {}
    void activation() noexcept {}
};

struct OpCounter {
    std::uint64_t multiplies = 0;
    std::uint64_t adds = 0;
    std::uint64_t activations = 0;
    void multiply() noexcept { ++multiplies; }
    void add() noexcept { ++adds; }
    void activation() noexcept { ++activations; }
};

// One matrix-vector product, one bias add per output and one activation per
// output. The operation order matches nn::Dense exactly.
template <typename T, typename Ops = NoOpCount>
void project(const LatentProjection<T>& map, std::span<const T> x, std::span<T> z, Ops& ops) {
    const std::size_t in = map.input_dim(), out = map.latent_size();
    if (x.size() != in) {
        throw ShapeError("compress: input has " + std::to_string(x.size()) + " features, map expects " + std::to_string(in));
    }
    if (z.size() != out) throw ShapeError("compress: output buffer has the wrong size");
    for (std::size_t j = 0; j < out; ++j) {
        const T* w = map.weights.data() + j * in;
        T acc{0};
        for (std::size_t k = 0; k < in; ++k) {
            acc += x[k] * w[k];
            ops.multiply();
            ops.add();
        }
        const T pre = acc + map.bias[j];
        ops.add();
        z[j] = nn::activate(map.activation, pre);
        ops.activation();
    }
}

template <typename T>
void project(const LatentProjection<T>& map, std::span<const T> x, std::span<T> z) {
    NoOpCount ops;
    project(map, x, z, ops);
}

struct CompressionMap {
    LatentProjection<float> projection;
    std::string source_dataset;
    Sha256Digest preprocess_fingerprint{};

    std::size_t latent_size() const noexcept { return projection.latent_size(); }
    std::size_t input_dim() const noexcept { return projection.input_dim(); }

    nlohmann::json to_json() const;
    static CompressionMap from_json(const nlohmann::json& j);
};

std::vector<float> compress(const CompressionMap& map, std::span<const float> x);
std::vector<float> compress(const CompressionMap& map, const data::FeatureVector& x);
std::vector<data::FeatureVector> compress_all(const CompressionMap& map, std::span<const data::FeatureVector> data);

void save_map(const CompressionMap& map, const std::filesystem::path& path);
// Throws LoadError with kind version / shape / corrupt_payload / fingerprint.
CompressionMap load_map(const std::filesystem::path& path, std::optional<Sha256Digest> expected_fingerprint = std::nullopt);

}  // namespace latentwire::model

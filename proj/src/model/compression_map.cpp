#include "latentwire/model/compression_map.hpp"

#include "latentwire/errors.hpp"
#include "latentwire/nn/serialize.hpp"

namespace latentwire::model {

nlohmann::json CompressionMap::to_json() const {
    return {{"format_version", kMapFormatVersion},
            {"latent_size", latent_size()},
            {"input_dim", input_dim()},
            {"activation", nn::to_string(projection.activation)},
            {"weights", encode_f32_blob(projection.weights.values())},
            {"bias", encode_f32_blob(projection.bias)},
            {"preprocess_fingerprint", to_hex(preprocess_fingerprint)},
            {"source_dataset", source_dataset}};
}

CompressionMap CompressionMap::from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != kMapFormatVersion) {
            throw LoadError(LoadFailure::version, "unsupported compression map format_version");
        }
        const auto ls = j.at("latent_size").get<std::size_t>();
        const auto in = j.at("input_dim").get<std::size_t>();
        if (ls == 0 || in == 0 || ls >= in) {
            throw LoadError(LoadFailure::shape, "compression map needs 0 < latent_size < input_dim");
        }
        CompressionMap m;
        m.projection.weights = nn::Matrix<float>(ls, in, decode_f32_blob(j.at("weights").get<std::string>(), ls * in));
        m.projection.bias = decode_f32_blob(j.at("bias").get<std::string>(), ls);
        try {
            m.projection.activation = nn::activation_from_string(j.at("activation").get<std::string>());
        } catch (const ConfigError& e) {
            throw LoadError(LoadFailure::corrupt_payload, e.what());
        }
        m.preprocess_fingerprint = digest_from_hex(j.at("preprocess_fingerprint").get<std::string>());
        m.source_dataset = j.at("source_dataset").get<std::string>();
        return m;
    } catch (const LoadError& e) {
        // Wrong blob length means the declared shape and payload disagree.
        if (e.kind() == LoadFailure::corrupt_payload && std::string(e.what()).find("parameter blob holds") != std::string::npos) {
            throw LoadError(LoadFailure::shape, e.what());
        }
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(LoadFailure::corrupt_payload, std::string("compression map: ") + e.what());
    }
}

std::vector<float> compress(const CompressionMap& map, std::span<const float> x) {
    std::vector<float> z(map.latent_size());
    project(map.projection, x, std::span<float>(z));
    return z;
}

std::vector<float> compress(const CompressionMap& map, const data::FeatureVector& x) { return compress(map, x.features); }

std::vector<data::FeatureVector> compress_all(const CompressionMap& map, std::span<const data::FeatureVector> data) {
    std::vector<data::FeatureVector> out(data.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(data.size()); ++i) {
        const auto& src = data[static_cast<std::size_t>(i)];
        auto& dst = out[static_cast<std::size_t>(i)];
        dst.features = compress(map, src.features);
        dst.label = src.label;
        dst.record_id = src.record_id;
    }
    return out;
}

void save_map(const CompressionMap& map, const std::filesystem::path& path) { nn::write_json_file(path, map.to_json()); }

CompressionMap load_map(const std::filesystem::path& path, std::optional<Sha256Digest> expected_fingerprint) {
    auto map = CompressionMap::from_json(nn::read_json_file(path));
    if (expected_fingerprint && *expected_fingerprint != map.preprocess_fingerprint) {
        throw LoadError(LoadFailure::fingerprint, "compression map was exported for a different preprocessing model (" +
                                                      to_hex(map.preprocess_fingerprint) + ")");
    }
    return map;
}

}  // namespace latentwire::model

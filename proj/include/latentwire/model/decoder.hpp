#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/data/records.hpp"
#include "latentwire/model/compression_map.hpp"
#include "latentwire/nn/network.hpp"
#include "latentwire/nn/train.hpp"

namespace latentwire::model {

struct DecoderSpec {
    std::size_t latent_size = 3;
    std::vector<std::size_t> hidden_layers{10, 20, 40, 60, 80, 100, 120, 140, 160, 180};
    std::size_t output_dim = 0;
    nn::ActivationKind activation = nn::ActivationKind::relu;
    nn::TrainingConfig training{0.001, 100, 256, 0.0, 0};
    double validation_fraction = 0.1;

    void validate() const;
    nlohmann::json to_json() const;
    static DecoderSpec from_json(const nlohmann::json& j);
};

struct ReconstructionReport {
    double mse = 0.0;  // mean over samples of (1/N) sum (x - x_rec)^2, N = output_dim
    std::vector<double> per_feature_mae;
    std::size_t samples = 0;
};

struct TrainedDecoder {
    DecoderSpec spec;
    nn::Network<float> network;
    std::vector<double> train_loss_history;
};

nn::Network<float> build_decoder(const DecoderSpec& spec);

// Reconstruction error of `decoder` on pairs (compress(map, x), x).
ReconstructionReport reconstruction_report(const nn::Network<float>& decoder, const CompressionMap& map,
                                           std::span<const data::FeatureVector> data);

// Trains on (compress(map, x), x) with MSE; the map is only read. The report
// is computed on a held-out slice of `data` (spec.validation_fraction).
std::pair<TrainedDecoder, ReconstructionReport> train_decoder(const DecoderSpec& spec, const CompressionMap& map,
                                                              std::span<const data::FeatureVector> data);

std::vector<float> reconstruct(const TrainedDecoder& decoder, std::span<const float> z);
// Decoded feature vectors, labels and record ids carried over.
std::vector<data::FeatureVector> reconstruct_all(const TrainedDecoder& decoder, const CompressionMap& map,
                                                 std::span<const data::FeatureVector> data);

nlohmann::json decoder_to_json(const TrainedDecoder& decoder);
TrainedDecoder decoder_from_json(const nlohmann::json& j);

}  // namespace latentwire::model

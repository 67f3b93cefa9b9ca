#pragma once

#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/data/preprocess.hpp"
#include "latentwire/data/records.hpp"
#include "latentwire/errors.hpp"
#include "latentwire/model/compression_map.hpp"
#include "latentwire/nn/network.hpp"
#include "latentwire/nn/train.hpp"

namespace latentwire::model {

struct EncoderSpec {
    std::size_t input_dim = 0;
    std::size_t latent_size = 4;
    std::pair<std::size_t, std::size_t> lstm_units{180, 110};
    std::vector<std::size_t> mlp_layers{100, 80, 60, 40, 20, 10};
    nn::ActivationKind activation = nn::ActivationKind::relu;
    nn::ActivationKind latent_activation = nn::ActivationKind::sigmoid;
    nn::TrainingConfig training{0.0092278, 600, 256, 0.0, 0};

    void validate() const;
    nlohmann::json to_json() const;
    static EncoderSpec from_json(const nlohmann::json& j);
};

// Best configuration reported for the Bayesian search on UNSW-NB15.
EncoderSpec winner_encoder_spec(std::size_t input_dim);

struct EpochRecord {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double validation_loss = 0.0;
    double validation_accuracy = 0.0;
};

struct TrainedEncoder {
    EncoderSpec spec;
    nn::Network<float> network;
    std::vector<EpochRecord> history;

    // Output of the first (latent) layer for one input vector.
    std::vector<float> latent(std::span<const float> x) const;
    nn::Matrix<float> latent_batch(const nn::Matrix<float>& x) const;
};

class EncoderDiverged : public DivergedError {
public:
    EncoderDiverged(const DivergedError& cause, std::vector<EpochRecord> history)
        : DivergedError(cause), history_(std::move(history)) {}
    const std::vector<EpochRecord>& history() const noexcept { return history_; }

private:
    std::vector<EpochRecord> history_;
};

// dense(latent) -> LSTM(u0, full sequence) -> LSTM(u1, last state) ->
// dense stack -> dense(1, sigmoid). The latent vector is fed to the first
// LSTM as latent_size timesteps of one feature each.
nn::Network<float> build_encoder(const EncoderSpec& spec);

TrainedEncoder train_encoder(nn::Network<float> network, const EncoderSpec& spec,
                             std::span<const data::FeatureVector> train, std::span<const data::FeatureVector> validation);

CompressionMap export_compression_map(const TrainedEncoder& encoder, const data::PreprocessModel& preprocess);

nlohmann::json encoder_to_json(const TrainedEncoder& encoder);
TrainedEncoder encoder_from_json(const nlohmann::json& j);

// Per-epoch history as CSV: epoch,train_loss,train_accuracy,validation_loss,validation_accuracy
std::string history_csv(std::span<const EpochRecord> history);

}  // namespace latentwire::model

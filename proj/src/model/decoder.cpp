#include "latentwire/model/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latentwire/nn/evaluate.hpp"
#include "latentwire/nn/serialize.hpp"

namespace latentwire::model {

void DecoderSpec::validate() const {
    if (latent_size == 0 || output_dim == 0) throw ShapeError("decoder latent_size and output_dim must be positive");
    if (hidden_layers.size() != 10) {
        throw ShapeError("decoder needs 10 hidden layers (11 parameterized layers), got " + std::to_string(hidden_layers.size()));
    }
    for (auto w : hidden_layers)
        if (w == 0) throw ShapeError("decoder layer widths must be positive");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw ConfigError("decoder.validation_fraction", "must lie in (0, 1)");
    }
}

nlohmann::json DecoderSpec::to_json() const {
    return {{"latent_size", latent_size},
            {"hidden_layers", hidden_layers},
            {"output_dim", output_dim},
            {"activation", nn::to_string(activation)},
            {"validation_fraction", validation_fraction},
            {"training",
             {{"learning_rate", training.learning_rate},
              {"epochs", training.epochs},
              {"batch_size", training.batch_size},
              {"decay", training.decay},
              {"seed", training.seed}}}};
}

DecoderSpec DecoderSpec::from_json(const nlohmann::json& j) {
    DecoderSpec s;
    s.latent_size = j.value("latent_size", s.latent_size);
    s.hidden_layers = j.value("hidden_layers", s.hidden_layers);
    s.output_dim = j.value("output_dim", s.output_dim);
    if (j.contains("activation")) s.activation = nn::activation_from_string(j.at("activation").get<std::string>());
    s.validation_fraction = j.value("validation_fraction", s.validation_fraction);
    if (j.contains("training")) {
        const auto& t = j.at("training");
        s.training.learning_rate = t.value("learning_rate", s.training.learning_rate);
        s.training.epochs = t.value("epochs", s.training.epochs);
        s.training.batch_size = t.value("batch_size", s.training.batch_size);
        s.training.decay = t.value("decay", s.training.decay);
        s.training.seed = t.value("seed", s.training.seed);
    }
    return s;
}

nn::Network<float> build_decoder(const DecoderSpec& spec) {
    spec.validate();
    nn::Network<float> net;
    std::size_t width = spec.latent_size;
    for (auto w : spec.hidden_layers) {
        net.add(nn::Dense<float>(width, w, spec.activation));
        width = w;
    }
    net.add(nn::Dense<float>(width, spec.output_dim, nn::ActivationKind::sigmoid));
    nn::initialize(net, spec.training.seed);
    return net;
}

namespace {

nn::Matrix<float> latent_matrix(const CompressionMap& map, std::span<const data::FeatureVector> data) {
    nn::Matrix<float> z(data.size(), map.latent_size());
    for (std::size_t r = 0; r < data.size(); ++r) project(map.projection, std::span<const float>(data[r].features), z.row(r));
    return z;
}

}  // namespace

ReconstructionReport reconstruction_report(const nn::Network<float>& decoder, const CompressionMap& map,
                                           std::span<const data::FeatureVector> data) {
    if (data.empty()) throw Error("reconstruction_report: empty data");
    const auto x = nn::features_matrix(data);
    const auto rec = nn::predict(decoder, latent_matrix(map, data));
    if (rec.cols() != x.cols()) throw ShapeError("decoder output_dim differs from the feature dimension");
    ReconstructionReport report;
    report.samples = data.size();
    report.per_feature_mae.assign(x.cols(), 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double sample = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const double d = static_cast<double>(x(r, c)) - static_cast<double>(rec(r, c));
            sample += d * d;
            report.per_feature_mae[c] += std::abs(d);
        }
        total += sample / static_cast<double>(x.cols());
    }
    report.mse = total / static_cast<double>(x.rows());
    for (auto& m : report.per_feature_mae) m /= static_cast<double>(x.rows());
    return report;
}

std::pair<TrainedDecoder, ReconstructionReport> train_decoder(const DecoderSpec& spec, const CompressionMap& map,
                                                              std::span<const data::FeatureVector> data) {
    spec.validate();
    if (map.latent_size() != spec.latent_size) throw ShapeError("decoder latent_size differs from the compression map");
    if (data.size() < 2) throw Error("train_decoder: need at least two samples");
    if (data.front().features.size() != spec.output_dim) throw ShapeError("decoder output_dim differs from the data");

    // Deterministic held-out slice.
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(spec.training.seed, 0xDEC));
    std::shuffle(order.begin(), order.end(), rng);
    auto held = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(data.size())));
    held = std::clamp<std::size_t>(held, 1, data.size() - 1);
    std::vector<data::FeatureVector> fit_rows, held_rows;
    for (std::size_t i = 0; i < order.size(); ++i) (i < held ? held_rows : fit_rows).push_back(data[order[i]]);

    TrainedDecoder dec{spec, build_decoder(spec), {}};
    if (spec.training.epochs > 0) {
        const auto z = latent_matrix(map, fit_rows);
        const auto x = nn::features_matrix(fit_rows);
        nn::fit<float>(dec.network, z, x, spec.training, nn::LossKind::mean_squared_error,
                       [&](std::size_t, double loss) { dec.train_loss_history.push_back(loss); });
    }
    auto report = reconstruction_report(dec.network, map, held_rows);
    return {std::move(dec), std::move(report)};
}

std::vector<float> reconstruct(const TrainedDecoder& decoder, std::span<const float> z) {
    if (z.size() != decoder.spec.latent_size) throw ShapeError("reconstruct: latent vector has the wrong length");
    nn::Matrix<float> in(1, z.size(), std::vector<float>(z.begin(), z.end()));
    const auto out = decoder.network.forward(in);
    return {out.data(), out.data() + out.size()};
}

std::vector<data::FeatureVector> reconstruct_all(const TrainedDecoder& decoder, const CompressionMap& map,
                                                 std::span<const data::FeatureVector> data) {
    const auto rec = nn::predict(decoder.network, latent_matrix(map, data));
    std::vector<data::FeatureVector> out(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) {
        out[r].features.assign(rec.row(r).begin(), rec.row(r).end());
        out[r].label = data[r].label;
        out[r].record_id = data[r].record_id;
    }
    return out;
}

nlohmann::json decoder_to_json(const TrainedDecoder& decoder) {
    return {{"spec", decoder.spec.to_json()},
            {"model", nn::network_to_json(decoder.network)},
            {"train_loss_history", decoder.train_loss_history}};
}

TrainedDecoder decoder_from_json(const nlohmann::json& j) {
    try {
        return {DecoderSpec::from_json(j.at("spec")), nn::network_from_json(j.at("model")),
                j.value("train_loss_history", std::vector<double>{})};
    } catch (const nlohmann::json::exception& ex) {
        throw LoadError(LoadFailure::corrupt_payload, std::string("decoder document: ") + ex.what());
    }
}

}  // namespace latentwire::model

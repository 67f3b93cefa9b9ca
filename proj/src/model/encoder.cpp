#include "latentwire/model/encoder.hpp"

#include <sstream>

#include "latentwire/nn/evaluate.hpp"
#include "latentwire/nn/serialize.hpp"

namespace latentwire::model {

namespace {

nlohmann::json training_to_json(const nn::TrainingConfig& t) {
    return {{"learning_rate", t.learning_rate},
            {"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"decay", t.decay},
            {"seed", t.seed}};
}

nn::TrainingConfig training_from_json(const nlohmann::json& j, nn::TrainingConfig t) {
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.epochs = j.value("epochs", t.epochs);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.seed = j.value("seed", t.seed);
    if (j.contains("decay")) {
        // "lr_over_epochs" selects decay = learning_rate / epochs.
        const auto& d = j.at("decay");
        if (d.is_string()) {
            if (d.get<std::string>() != "lr_over_epochs") throw ConfigError("training.decay", "expected a number or \"lr_over_epochs\"");
            t.decay = nn::inverse_time_decay(t.learning_rate, t.epochs);
        } else {
            t.decay = d.get<double>();
        }
    }
    return t;
}

}  // namespace

void EncoderSpec::validate() const {
    if (input_dim == 0) throw ShapeError("encoder input_dim must be positive");
    if (latent_size == 0 || latent_size >= input_dim) {
        throw ShapeError("latent_size " + std::to_string(latent_size) + " must satisfy 0 < latent_size < input_dim " +
                         std::to_string(input_dim));
    }
    if (lstm_units.first == 0 || lstm_units.second == 0) throw ShapeError("lstm units must be positive");
    if (mlp_layers.empty()) throw ShapeError("mlp_layers must not be empty");
    for (auto w : mlp_layers)
        if (w == 0) throw ShapeError("mlp layer widths must be positive");
}

nlohmann::json EncoderSpec::to_json() const {
    return {{"input_dim", input_dim},
            {"latent_size", latent_size},
            {"lstm_units", {lstm_units.first, lstm_units.second}},
            {"mlp_layers", mlp_layers},
            {"activation", nn::to_string(activation)},
            {"latent_activation", nn::to_string(latent_activation)},
            {"training", training_to_json(training)}};
}

EncoderSpec EncoderSpec::from_json(const nlohmann::json& j) {
    EncoderSpec s;
    s.input_dim = j.value("input_dim", s.input_dim);
    s.latent_size = j.value("latent_size", s.latent_size);
    if (j.contains("lstm_units")) {
        auto u = j.at("lstm_units").get<std::vector<std::size_t>>();
        if (u.size() != 2) throw ConfigError("encoder.lstm_units", "expects two layer widths");
        s.lstm_units = {u[0], u[1]};
    }
    s.mlp_layers = j.value("mlp_layers", s.mlp_layers);
    if (j.contains("activation")) s.activation = nn::activation_from_string(j.at("activation").get<std::string>());
    if (j.contains("latent_activation")) {
        s.latent_activation = nn::activation_from_string(j.at("latent_activation").get<std::string>());
    }
    if (j.contains("training")) s.training = training_from_json(j.at("training"), s.training);
    return s;
}

EncoderSpec winner_encoder_spec(std::size_t input_dim) {
    EncoderSpec s;
    s.input_dim = input_dim;
    return s;
}

std::vector<float> TrainedEncoder::latent(std::span<const float> x) const {
    const auto& dense = std::get<nn::Dense<float>>(network.layer(0));
    std::vector<float> z(dense.output_dim());
    dense.forward_row(x, z);
    return z;
}

nn::Matrix<float> TrainedEncoder::latent_batch(const nn::Matrix<float>& x) const {
    return std::get<nn::Dense<float>>(network.layer(0)).forward(x, nullptr);
}

nn::Network<float> build_encoder(const EncoderSpec& spec) {
    spec.validate();
    nn::Network<float> net;
    net.add(nn::Dense<float>(spec.input_dim, spec.latent_size, spec.latent_activation));
    net.add(nn::Lstm<float>(1, spec.lstm_units.first, true));
    net.add(nn::Lstm<float>(spec.lstm_units.first, spec.lstm_units.second, false));
    std::size_t width = spec.lstm_units.second;
    for (auto w : spec.mlp_layers) {
        net.add(nn::Dense<float>(width, w, spec.activation));
        width = w;
    }
    net.add(nn::Dense<float>(width, 1, nn::ActivationKind::sigmoid));
    nn::initialize(net, spec.training.seed);
    return net;
}

TrainedEncoder train_encoder(nn::Network<float> network, const EncoderSpec& spec,
                             std::span<const data::FeatureVector> train, std::span<const data::FeatureVector> validation) {
    spec.training.validate();
    if (train.empty() || validation.empty()) throw Error("train_encoder: train and validation splits must be non-empty");
    if (train.front().features.size() != network.input_dim()) throw ShapeError("train_encoder: feature dimension mismatch");

    const auto x = nn::features_matrix(train);
    const auto y = nn::labels_matrix(train);
    const auto vx = nn::features_matrix(validation);
    const auto vy = nn::labels_matrix(validation);

    TrainedEncoder out{spec, std::move(network), {}};
    std::size_t correct = 0;
    auto on_batch = [&](std::span<const std::size_t> rows, const nn::Matrix<float>& outputs) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const int predicted = outputs(r, 0) >= 0.5f ? 1 : 0;
            if (predicted == train[rows[r]].label) ++correct;
        }
    };
    auto on_epoch = [&](std::size_t, double loss) {
        EpochRecord rec;
        rec.train_loss = loss;
        rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
        const auto vout = nn::predict(out.network, vx);
        double vloss = 0.0;
        for (std::size_t r = 0; r < vout.rows(); ++r) {
            vloss += nn::loss_value<float>(nn::LossKind::binary_cross_entropy, vout.row(r), vy.row(r));
        }
        rec.validation_loss = vloss / static_cast<double>(vout.rows());
        rec.validation_accuracy = nn::accuracy_from_outputs(vout, validation);
        out.history.push_back(rec);
        correct = 0;
    };
    try {
        nn::fit<float>(out.network, x, y, spec.training, nn::LossKind::binary_cross_entropy, on_epoch, on_batch);
    } catch (const DivergedError& e) {
        throw EncoderDiverged(e, out.history);
    }
    return out;
}

CompressionMap export_compression_map(const TrainedEncoder& encoder, const data::PreprocessModel& preprocess) {
    const auto& dense = std::get<nn::Dense<float>>(encoder.network.layer(0));
    CompressionMap map;
    map.projection.weights = dense.weights();
    map.projection.bias = dense.bias();
    map.projection.activation = dense.activation();
    map.source_dataset = preprocess.schema_name();
    map.preprocess_fingerprint = preprocess.fingerprint();
    return map;
}

nlohmann::json encoder_to_json(const TrainedEncoder& encoder) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& h : encoder.history) {
        hist.push_back({h.train_loss, h.train_accuracy, h.validation_loss, h.validation_accuracy});
    }
    return {{"spec", encoder.spec.to_json()}, {"model", nn::network_to_json(encoder.network)}, {"history", hist}};
}

TrainedEncoder encoder_from_json(const nlohmann::json& j) {
    try {
        TrainedEncoder e{EncoderSpec::from_json(j.at("spec")), nn::network_from_json(j.at("model")), {}};
        for (const auto& h : j.at("history")) {
            e.history.push_back({h.at(0).get<double>(), h.at(1).get<double>(), h.at(2).get<double>(), h.at(3).get<double>()});
        }
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw LoadError(LoadFailure::corrupt_payload, std::string("encoder document: ") + ex.what());
    }
}

std::string history_csv(std::span<const EpochRecord> history) {
    std::ostringstream os;
    os << "epoch,train_loss,train_accuracy,validation_loss,validation_accuracy\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& h = history[i];
        os << i + 1 << ',' << h.train_loss << ',' << h.train_accuracy << ',' << h.validation_loss << ','
           << h.validation_accuracy << '\n';
    }
    return os.str();
}

}  // namespace latentwire::model

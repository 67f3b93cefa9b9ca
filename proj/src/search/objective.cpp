#include <memory>

#include "latentwire/data/split.hpp"
#include "latentwire/nn/evaluate.hpp"
#include "latentwire/search/search.hpp"

namespace latentwire::search {

model::EncoderSpec spec_from_point(const SearchSpace& space, const Point& p, std::size_t input_dim) {
    model::EncoderSpec spec;
    spec.input_dim = input_dim;
    spec.latent_size = p.latent_size;
    spec.lstm_units = {p.lstm1_units, p.lstm2_units};
    spec.mlp_layers = space.mlp_confs.at(p.mlp_conf);
    spec.activation = p.activation;
    spec.training.learning_rate = p.learning_rate;
    spec.training.epochs = p.epochs;
    return spec;
}

Objective objective_from_encoder(const SearchSpace& space, std::span<const data::FeatureVector> train,
                                 std::span<const data::FeatureVector> validation, const DeskBudget& budget) {
    if (train.empty() || validation.empty()) throw ConfigError("search", "objective needs non-empty train and validation splits");
    if (budget.epoch_cap == 0) throw ConfigError("search.epoch_cap", "must be positive");
    auto rows = std::make_shared<std::vector<data::FeatureVector>>(data::stratified_subset(train, budget.row_cap, budget.seed));
    auto val = std::make_shared<std::vector<data::FeatureVector>>(validation.begin(), validation.end());
    const std::size_t dim = train.front().features.size();
    return [space, rows, val, dim, budget](const Point& p) {
        model::EncoderSpec spec = spec_from_point(space, p, dim);
        spec.training.epochs = std::min(spec.training.epochs, budget.epoch_cap);
        spec.training.batch_size = budget.batch_size;
        spec.training.seed = budget.seed;
        auto trained = model::train_encoder(model::build_encoder(spec), spec, *rows, *val);
        return nn::evaluate_accuracy(trained.network, *val);
    };
}

Objective quadratic_objective(const SearchSpace& space, const Point& optimum) {
    auto axis = [](double v, double centre, double span) {
        const double u = (v - centre) / span;
        return u * u;
    };
    return [space, optimum, axis](const Point& p) {
        const auto span = [](const QuantizedRange& r) { return static_cast<double>(r.high - r.low); };
        const auto& lr = space.learning_rate;
        return -(axis(static_cast<double>(p.lstm1_units), static_cast<double>(optimum.lstm1_units), span(space.lstm1_units)) +
                 axis(static_cast<double>(p.lstm2_units), static_cast<double>(optimum.lstm2_units), span(space.lstm2_units)) +
                 axis(static_cast<double>(p.epochs), static_cast<double>(optimum.epochs), span(space.epochs)) +
                 axis(p.learning_rate, optimum.learning_rate, lr.high - lr.low));
    };
}

}  // namespace latentwire::search

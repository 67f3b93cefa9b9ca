#include "latentwire/forest/forest.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "latentwire/errors.hpp"
#include "latentwire/nn/serialize.hpp"

namespace latentwire::forest {

nlohmann::json ForestConfig::to_json() const {
    return {{"n_trees", n_trees}, {"max_features", max_features}, {"max_depth", max_depth},
            {"min_leaf", min_leaf}, {"seed", seed},                 {"bootstrap", bootstrap}};
}

ForestConfig ForestConfig::from_json(const nlohmann::json& j) {
    ForestConfig c;
    c.n_trees = j.value("n_trees", c.n_trees);
    c.max_features = j.value("max_features", c.max_features);
    c.max_depth = j.value("max_depth", c.max_depth);
    c.min_leaf = j.value("min_leaf", c.min_leaf);
    c.seed = j.value("seed", c.seed);
    c.bootstrap = j.value("bootstrap", c.bootstrap);
    return c;
}

std::size_t default_max_features(std::size_t dim) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim)))));
}

namespace {

DecisionTree grow(const ColumnStore& store, const ForestConfig& config, std::size_t mtry, std::size_t tree_index) {
    Rng rng(mix_seed(config.seed, tree_index));
    std::vector<std::uint32_t> rows(store.rows);
    if (config.bootstrap) {
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(store.rows - 1));
        for (auto& r : rows) r = pick(rng);
    } else {
        std::iota(rows.begin(), rows.end(), 0u);
    }
    TreeConfig tc{mtry, config.max_depth, config.min_leaf};
    return build_tree(store, std::move(rows), tc, rng);
}

ForestModel empty_model(std::span<const data::FeatureVector> data, const ForestConfig& config) {
    if (config.n_trees == 0) throw ConfigError("forest.n_trees", "must be positive");
    if (data.empty()) throw Error("train_forest: no training rows");
    ForestModel m;
    m.n_trees = config.n_trees;
    m.n_features = data.front().features.size();
    m.max_features = config.max_features == 0 ? default_max_features(m.n_features) : std::min(config.max_features, m.n_features);
    m.seed = config.seed;
    m.trees.resize(config.n_trees);
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TrainedForest train_forest(std::span<const data::FeatureVector> data, const ForestConfig& config) {
    ForestModel m = empty_model(data, config);
    const ColumnStore store(data);
    const auto start = std::chrono::steady_clock::now();
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(m.n_trees); ++t) {
        m.trees[static_cast<std::size_t>(t)] = grow(store, config, m.max_features, static_cast<std::size_t>(t));
    }
    return {std::move(m), seconds_since(start)};
}

TrainedForest train_forest_serial(std::span<const data::FeatureVector> data, const ForestConfig& config) {
    ForestModel m = empty_model(data, config);
    const ColumnStore store(data);
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t t = 0; t < m.n_trees; ++t) m.trees[t] = grow(store, config, m.max_features, t);
    return {std::move(m), seconds_since(start)};
}

double vote_fraction(const ForestModel& model, std::span<const float> x) {
    if (x.size() != model.n_features) {
        throw ShapeError("forest expects " + std::to_string(model.n_features) + " features, got " + std::to_string(x.size()));
    }
    std::size_t attack = 0;
    for (const auto& t : model.trees) attack += t.predict(x);
    return static_cast<double>(attack) / static_cast<double>(model.trees.size());
}

std::uint8_t predict(const ForestModel& model, std::span<const float> x) { return vote_fraction(model, x) >= 0.5 ? 1 : 0; }

std::vector<std::uint8_t> predict_all(const ForestModel& model, std::span<const data::FeatureVector> data) {
    std::vector<std::uint8_t> out(data.size());
    for (const auto& d : data) {
        if (d.features.size() != model.n_features) throw ShapeError("forest: feature dimension mismatch");
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(data.size()); ++i) {
        out[static_cast<std::size_t>(i)] = predict(model, data[static_cast<std::size_t>(i)].features);
    }
    return out;
}

MetricsReport evaluate(const ForestModel& model, std::span<const data::FeatureVector> data) {
    const auto predicted = predict_all(model, data);
    ConfusionCounts c;
    for (std::size_t i = 0; i < data.size(); ++i) c.add(predicted[i], data[i].label);
    return metrics_from_counts(c);
}

nlohmann::json forest_to_json(const ForestModel& model) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : model.trees) trees.push_back(t.to_json());
    return {{"format_version", kForestFormatVersion},
            {"n_trees", model.n_trees},
            {"max_features", model.max_features},
            {"n_features", model.n_features},
            {"seed", model.seed},
            {"trees", trees}};
}

ForestModel forest_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != kForestFormatVersion) {
            throw LoadError(LoadFailure::version, "unsupported forest format_version");
        }
        ForestModel m;
        m.n_trees = j.at("n_trees").get<std::size_t>();
        m.max_features = j.at("max_features").get<std::size_t>();
        m.n_features = j.at("n_features").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& t : j.at("trees")) m.trees.push_back(DecisionTree::from_json(t));
        if (m.trees.size() != m.n_trees || m.n_trees == 0) throw LoadError(LoadFailure::shape, "forest tree count mismatch");
        for (const auto& t : m.trees)
            for (const auto& n : t.nodes())
                if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= m.n_features)
                    throw LoadError(LoadFailure::shape, "split feature out of range");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(LoadFailure::corrupt_payload, std::string("forest document: ") + e.what());
    }
}

void save_forest(const ForestModel& model, const std::filesystem::path& path) {
    nn::write_json_file(path, forest_to_json(model));
}

ForestModel load_forest(const std::filesystem::path& path) { return forest_from_json(nn::read_json_file(path)); }

}  // namespace latentwire::forest

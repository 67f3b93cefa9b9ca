#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/data/records.hpp"
#include "latentwire/forest/metrics.hpp"
#include "latentwire/forest/tree.hpp"

namespace latentwire::forest {

inline constexpr int kForestFormatVersion = 1;

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t max_features = 0;  // 0 = ceil(sqrt(d))
    std::size_t max_depth = 0;     // 0 = unlimited
    std::size_t min_leaf = 1;
    std::uint64_t seed = 0;
    bool bootstrap = true;  // false trains every tree on the full data (test hook)

    nlohmann::json to_json() const;
    static ForestConfig from_json(const nlohmann::json& j);
};

std::size_t default_max_features(std::size_t dim);

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::size_t n_trees = 0;
    std::size_t max_features = 0;
    std::size_t n_features = 0;
    std::uint64_t seed = 0;

    bool operator==(const ForestModel&) const = default;
};

struct TrainedForest {
    ForestModel model;
    double training_time_seconds = 0.0;
};

// Trees are built concurrently; each tree draws from its own stream seeded by
// mix_seed(seed, tree_index), so the result equals train_forest_serial.
TrainedForest train_forest(std::span<const data::FeatureVector> data, const ForestConfig& config);
TrainedForest train_forest_serial(std::span<const data::FeatureVector> data, const ForestConfig& config);

// Fraction of trees voting attack.
double vote_fraction(const ForestModel& model, std::span<const float> x);
// Majority vote; a tie goes to attack.
std::uint8_t predict(const ForestModel& model, std::span<const float> x);
std::vector<std::uint8_t> predict_all(const ForestModel& model, std::span<const data::FeatureVector> data);

MetricsReport evaluate(const ForestModel& model, std::span<const data::FeatureVector> data);

nlohmann::json forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const nlohmann::json& j);
void save_forest(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_forest(const std::filesystem::path& path);

}  // namespace latentwire::forest

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/data/records.hpp"
#include "latentwire/rng.hpp"

namespace latentwire::forest {

// Shannon entropy (bits) of a two-class count pair; 0 log 0 = 0.
double entropy(std::size_t n0, std::size_t n1);

struct ClassCounts {
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::size_t total() const noexcept { return n0 + n1; }
};

// H(parent) - (|L|/|P| H(L) + |R|/|P| H(R)), clamped below at 0.
double information_gain(ClassCounts parent, ClassCounts left, ClassCounts right);
// Label-list form; labels are 0/1. Throws on an empty parent or when the
// children are not a partition of the parent.
double information_gain(std::span<const std::uint8_t> parent, std::span<const std::uint8_t> left,
                        std::span<const std::uint8_t> right);

// Flat node storage. Internal nodes route x left iff x[feature] <= threshold.
struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint8_t label = 0;
    std::uint32_t n0 = 0;
    std::uint32_t n1 = 0;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct TreeConfig {
    std::size_t max_features = 0;  // 0 = all features
    std::size_t max_depth = 0;     // 0 = unlimited
    std::size_t min_leaf = 1;
};

class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    std::uint8_t predict(std::span<const float> x) const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::size_t depth() const;
    bool operator==(const DecisionTree&) const = default;

    nlohmann::json to_json() const;
    static DecisionTree from_json(const nlohmann::json& j);

private:
    std::vector<TreeNode> nodes_;
};

// Column-major copy of a dataset, the layout split search works on.
struct ColumnStore {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<float> values;  // dim x rows
    std::vector<std::uint8_t> labels;

    explicit ColumnStore(std::span<const data::FeatureVector> data);
    float at(std::size_t row, std::size_t feature) const noexcept { return values[feature * rows + row]; }
};

// Greedy information-gain tree over `rows` (indices into `store`, repeats
// allowed). At every node `config.max_features` distinct features are drawn
// from `rng`; thresholds are midpoints between consecutive distinct values;
// ties go to the lower feature index and then the lower threshold.
DecisionTree build_tree(const ColumnStore& store, std::vector<std::uint32_t> rows, const TreeConfig& config, Rng& rng);
DecisionTree build_tree(std::span<const data::FeatureVector> data, std::size_t max_features, Rng& rng,
                        const TreeConfig& config = {});

}  // namespace latentwire::forest

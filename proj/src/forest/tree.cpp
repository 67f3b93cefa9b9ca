#include "latentwire/forest/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latentwire/errors.hpp"

namespace latentwire::forest {

double entropy(std::size_t n0, std::size_t n1) {
    const std::size_t n = n0 + n1;
    if (n == 0) return 0.0;
    double h = 0.0;
    for (std::size_t c : {n0, n1}) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log2(p);
    }
    return h;
}

double information_gain(ClassCounts parent, ClassCounts left, ClassCounts right) {
    if (parent.total() == 0) throw Error("information_gain: empty parent");
    const double n = static_cast<double>(parent.total());
    const double children = static_cast<double>(left.total()) / n * entropy(left.n0, left.n1) +
                            static_cast<double>(right.total()) / n * entropy(right.n0, right.n1);
    return std::max(0.0, entropy(parent.n0, parent.n1) - children);
}

double information_gain(std::span<const std::uint8_t> parent, std::span<const std::uint8_t> left,
                        std::span<const std::uint8_t> right) {
    auto count = [](std::span<const std::uint8_t> labels) {
        ClassCounts c;
        for (auto l : labels) (l ? c.n1 : c.n0)++;
        return c;
    };
    const ClassCounts p = count(parent), l = count(left), r = count(right);
    if (p.total() == 0) throw Error("information_gain: empty parent");
    if (l.n0 + r.n0 != p.n0 || l.n1 + r.n1 != p.n1) throw Error("information_gain: children do not partition the parent");
    return information_gain(p, l, r);
}

std::uint8_t DecisionTree::predict(std::span<const float> x) const {
    std::uint32_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& n = nodes_[i];
        i = static_cast<double>(x[static_cast<std::size_t>(n.feature)]) <= n.threshold ? n.left : n.right;
    }
    return nodes_[i].label;
}

std::size_t DecisionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (!nodes_[i].is_leaf()) {
            stack.push_back({nodes_[i].left, d + 1});
            stack.push_back({nodes_[i].right, d + 1});
        }
    }
    return best;
}

// Flat node list: [feature, threshold, left, right, label, n0, n1] per node,
// the in-memory layout verbatim so a reload compares equal.
nlohmann::json DecisionTree::to_json() const {
    if (nodes_.empty()) throw Error("cannot serialize an empty tree");
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : nodes_) arr.push_back({n.feature, n.threshold, n.left, n.right, n.label, n.n0, n.n1});
    return arr;
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw LoadError(LoadFailure::shape, "tree must be a non-empty node array");
    std::vector<TreeNode> nodes;
    nodes.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 7) throw LoadError(LoadFailure::shape, "tree node must have 7 fields");
        TreeNode n;
        n.feature = e[0].get<std::int32_t>();
        n.threshold = e[1].get<double>();
        n.left = e[2].get<std::uint32_t>();
        n.right = e[3].get<std::uint32_t>();
        n.label = e[4].get<std::uint8_t>();
        n.n0 = e[5].get<std::uint32_t>();
        n.n1 = e[6].get<std::uint32_t>();
        nodes.push_back(n);
    }
    // Children must point forward so traversal always terminates.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.is_leaf()) {
            if (n.label > 1) throw LoadError(LoadFailure::shape, "leaf class must be 0 or 1");
            continue;
        }
        if (n.left <= i || n.right <= i || n.left >= nodes.size() || n.right >= nodes.size()) {
            throw LoadError(LoadFailure::shape, "tree child index out of range");
        }
    }
    return DecisionTree(std::move(nodes));
}

ColumnStore::ColumnStore(std::span<const data::FeatureVector> data) : rows(data.size()) {
    dim = data.empty() ? 0 : data.front().features.size();
    values.resize(rows * dim);
    labels.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        if (data[r].features.size() != dim) throw ShapeError("forest: feature vectors have inconsistent dimensions");
        for (std::size_t f = 0; f < dim; ++f) values[f * rows + r] = data[r].features[f];
        labels[r] = data[r].label ? 1 : 0;
    }
}

namespace {

constexpr double kMinGain = 1e-12;

struct Split {
    double gain = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
};

struct Pending {
    std::uint32_t node;
    std::size_t begin;
    std::size_t end;
    std::size_t depth;
};

}  // namespace

DecisionTree build_tree(const ColumnStore& store, std::vector<std::uint32_t> rows, const TreeConfig& config, Rng& rng) {
    if (rows.empty()) throw Error("build_tree: no training rows");
    const std::size_t dim = store.dim;
    const std::size_t mtry = config.max_features == 0 ? dim : std::min(config.max_features, dim);
    const std::size_t min_leaf = std::max<std::size_t>(1, config.min_leaf);

    std::vector<TreeNode> nodes(1);
    std::vector<Pending> stack{{0, 0, rows.size(), 0}};
    std::vector<std::size_t> features(dim);
    std::vector<std::pair<float, std::uint8_t>> sorted;
    // n * H(counts) = t[n] - t[n0] - t[n1] with t[k] = k log2 k, so the sweep
    // below evaluates the gain without calling log.
    std::vector<double> xlogx(rows.size() + 1, 0.0);
    for (std::size_t k = 2; k < xlogx.size(); ++k) xlogx[k] = static_cast<double>(k) * std::log2(static_cast<double>(k));
    auto weighted_entropy = [&](const ClassCounts& c) { return xlogx[c.total()] - xlogx[c.n0] - xlogx[c.n1]; };

    while (!stack.empty()) {
        const Pending p = stack.back();
        stack.pop_back();
        ClassCounts parent;
        for (std::size_t i = p.begin; i < p.end; ++i) (store.labels[rows[i]] ? parent.n1 : parent.n0)++;

        TreeNode leaf;
        leaf.n0 = static_cast<std::uint32_t>(parent.n0);
        leaf.n1 = static_cast<std::uint32_t>(parent.n1);
        leaf.label = parent.n1 >= parent.n0 ? 1 : 0;

        const bool pure = parent.n0 == 0 || parent.n1 == 0;
        const bool depth_hit = config.max_depth != 0 && p.depth >= config.max_depth;
        if (pure || depth_hit || parent.total() < 2 * min_leaf) {
            nodes[p.node] = leaf;
            continue;
        }

        // Partial Fisher-Yates draw of mtry distinct features, then sorted so
        // equal gains resolve to the lowest feature index.
        std::iota(features.begin(), features.end(), 0);
        for (std::size_t k = 0; k < mtry; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, dim - 1);
            std::swap(features[k], features[pick(rng)]);
        }
        std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(mtry));

        Split best;
        bool found = false;
        const std::size_t n = p.end - p.begin;
        const double parent_weighted = weighted_entropy(parent);
        for (std::size_t k = 0; k < mtry; ++k) {
            const std::size_t f = features[k];
            sorted.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto r = rows[p.begin + i];
                sorted[i] = {store.at(r, f), store.labels[r]};
            }
            std::sort(sorted.begin(), sorted.end());
            ClassCounts left;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                (sorted[i].second ? left.n1 : left.n0)++;
                if (!(sorted[i].first < sorted[i + 1].first)) continue;
                const ClassCounts right{parent.n0 - left.n0, parent.n1 - left.n1};
                if (left.total() < min_leaf || right.total() < min_leaf) continue;
                const double gain =
                    (parent_weighted - weighted_entropy(left) - weighted_entropy(right)) / static_cast<double>(n);
                if (gain > best.gain) {
                    best = {gain, f, (static_cast<double>(sorted[i].first) + static_cast<double>(sorted[i + 1].first)) * 0.5};
                    found = true;
                }
            }
        }

        if (!found || best.gain <= kMinGain) {
            nodes[p.node] = leaf;
            continue;
        }

        auto* first = rows.data() + p.begin;
        auto* last = rows.data() + p.end;
        auto* mid = std::partition(first, last, [&](std::uint32_t r) {
            return static_cast<double>(store.at(r, best.feature)) <= best.threshold;
        });
        const std::size_t split_at = p.begin + static_cast<std::size_t>(mid - first);

        TreeNode inner;
        inner.feature = static_cast<std::int32_t>(best.feature);
        inner.threshold = best.threshold;
        inner.left = static_cast<std::uint32_t>(nodes.size());
        inner.right = inner.left + 1;
        nodes[p.node] = inner;
        nodes.emplace_back();
        nodes.emplace_back();
        stack.push_back({inner.right, split_at, p.end, p.depth + 1});
        stack.push_back({inner.left, p.begin, split_at, p.depth + 1});
    }
    return DecisionTree(std::move(nodes));
}

DecisionTree build_tree(std::span<const data::FeatureVector> data, std::size_t max_features, Rng& rng,
                        const TreeConfig& config) {
    if (data.empty()) throw Error("build_tree: no training rows");
    ColumnStore store(data);
    std::vector<std::uint32_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), 0u);
    TreeConfig c = config;
    c.max_features = max_features;
    return build_tree(store, std::move(rows), c, rng);
}

}  // namespace latentwire::forest

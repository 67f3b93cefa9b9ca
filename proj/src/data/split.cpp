#include "latentwire/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latentwire/errors.hpp"
#include "latentwire/rng.hpp"

namespace latentwire::data {

void SplitSpec::validate() const {
    auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
    if (carve_test) {
        if (!in_unit(train_fraction)) throw ConfigError("split.train_fraction", "must lie in (0, 1)");
        if (!in_unit(validation_fraction)) throw ConfigError("split.validation_fraction", "must lie in (0, 1)");
        if (train_fraction + validation_fraction >= 1.0) {
            throw ConfigError("split", "train_fraction + validation_fraction must be < 1 when a test split is carved");
        }
    } else if (!in_unit(validation_fraction)) {
        throw ConfigError("split.validation_fraction", "must lie in (0, 1)");
    }
}

namespace {

struct Cut {
    std::size_t train;
    std::size_t validation;
};

Cut cut_sizes(std::size_t n, const SplitSpec& spec) {
    if (!spec.carve_test) {
        auto v = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(n)));
        return {n - v, v};
    }
    auto t = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    auto v = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(n)));
    t = std::min(t, n);
    v = std::min(v, n - t);
    return {t, v};
}

}  // namespace

Splits split(std::span<const FeatureVector> vectors, const SplitSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<std::size_t> train_idx, val_idx, test_idx;

    auto carve = [&](std::vector<std::size_t>& pool) {
        std::shuffle(pool.begin(), pool.end(), rng);
        Cut c = cut_sizes(pool.size(), spec);
        train_idx.insert(train_idx.end(), pool.begin(), pool.begin() + c.train);
        val_idx.insert(val_idx.end(), pool.begin() + c.train, pool.begin() + c.train + c.validation);
        test_idx.insert(test_idx.end(), pool.begin() + c.train + c.validation, pool.end());
    };

    if (spec.stratified) {
        std::vector<std::size_t> by_class[2];
        for (std::size_t i = 0; i < vectors.size(); ++i) by_class[vectors[i].label ? 1 : 0].push_back(i);
        if (by_class[0].empty() || by_class[1].empty()) {
            throw Error(std::string("stratified split: class ") + (by_class[0].empty() ? "0 (normal)" : "1 (attack)") +
                        " is absent from the input");
        }
        carve(by_class[0]);
        carve(by_class[1]);
        // Interleave classes so batches downstream are not class-sorted.
        std::shuffle(train_idx.begin(), train_idx.end(), rng);
        std::shuffle(val_idx.begin(), val_idx.end(), rng);
        std::shuffle(test_idx.begin(), test_idx.end(), rng);
    } else {
        std::vector<std::size_t> all(vectors.size());
        std::iota(all.begin(), all.end(), 0);
        carve(all);
    }

    auto gather = [&](const std::vector<std::size_t>& idx) {
        std::vector<FeatureVector> out;
        out.reserve(idx.size());
        for (auto i : idx) out.push_back(vectors[i]);
        return out;
    };
    return {gather(train_idx), gather(val_idx), gather(test_idx)};
}

std::vector<std::size_t> stratified_indices(std::span<const std::uint8_t> labels, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> chosen;
    if (count >= labels.size()) {
        chosen.resize(labels.size());
        std::iota(chosen.begin(), chosen.end(), 0);
        return chosen;
    }
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(i);
    Rng rng(seed);
    auto take0 = static_cast<std::size_t>(std::llround(static_cast<double>(count) * static_cast<double>(by_class[0].size()) /
                                                       static_cast<double>(labels.size())));
    take0 = std::min(take0, by_class[0].size());
    std::size_t take1 = std::min(count - take0, by_class[1].size());
    for (int c = 0; c < 2; ++c) {
        std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
        std::size_t take = c == 0 ? take0 : take1;
        chosen.insert(chosen.end(), by_class[c].begin(), by_class[c].begin() + take);
    }
    // Keep source order so record ids stay meaningful.
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<RawRecord> stratified_subset(std::span<const RawRecord> records, const DatasetSchema& schema,
                                         std::size_t count, std::uint64_t seed) {
    const std::size_t label_col = schema.label_index();
    std::vector<std::uint8_t> labels(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) labels[i] = schema.label_of(records[i].values[label_col], i);
    std::vector<RawRecord> out;
    for (auto i : stratified_indices(labels, count, seed)) out.push_back(records[i]);
    return out;
}

std::vector<FeatureVector> stratified_subset(std::span<const FeatureVector> vectors, std::size_t count, std::uint64_t seed) {
    std::vector<std::uint8_t> labels(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) labels[i] = vectors[i].label;
    std::vector<FeatureVector> out;
    for (auto i : stratified_indices(labels, count, seed)) out.push_back(vectors[i]);
    return out;
}

}  // namespace latentwire::data

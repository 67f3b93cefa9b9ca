#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "latentwire/data/records.hpp"

namespace latentwire::data {

struct SplitSpec {
    double train_fraction = 0.7;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;
    bool stratified = true;
    // false when the dataset ships its own test file: validation is carved
    // from the input and everything else is train.
    bool carve_test = true;

    void validate() const;
};

struct Splits {
    std::vector<FeatureVector> train;
    std::vector<FeatureVector> validation;
    std::vector<FeatureVector> test;
};

Splits split(std::span<const FeatureVector> vectors, const SplitSpec& spec);

// Stratified sample of `count` rows (class proportions kept within one row).
std::vector<RawRecord> stratified_subset(std::span<const RawRecord> records, const DatasetSchema& schema,
                                         std::size_t count, std::uint64_t seed);
std::vector<FeatureVector> stratified_subset(std::span<const FeatureVector> vectors, std::size_t count, std::uint64_t seed);
std::vector<std::size_t> stratified_indices(std::span<const std::uint8_t> labels, std::size_t count, std::uint64_t seed);

}  // namespace latentwire::data

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latentwire/data/schema.hpp"

namespace latentwire::data {

// Synthetic traffic records in the NSL-KDD column layout: 41 features and a
// label string, optionally followed by a difficulty column. Attack families
// overlap with normal traffic and a small fraction of labels is flipped, so
// the task is learnable but not trivially separable.
struct SynthOptions {
    std::size_t rows = 2000;
    std::uint64_t seed = 1;
    double attack_fraction = 0.47;
    double label_noise = 0.02;
    bool difficulty_column = false;
};

std::string synth_nsl_kdd_csv(const SynthOptions& options);

const std::vector<std::string>& nsl_kdd_feature_names();
const std::vector<std::string>& nsl_kdd_attack_labels();
DatasetSchema nsl_kdd_schema(bool difficulty_column = false);

}  // namespace latentwire::data

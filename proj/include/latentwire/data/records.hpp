#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "latentwire/data/schema.hpp"

namespace latentwire::data {

struct RawRecord {
    std::vector<std::string> values;
};

enum class Label : std::uint8_t { normal = 0, attack = 1 };

struct FeatureVector {
    std::vector<float> features;
    std::uint8_t label = 0;
    std::uint64_t record_id = 0;
};

// RFC 4180 field splitting over a whole document. Quoted fields may contain
// commas, doubled quotes and line breaks; CRLF and LF line endings both work.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::vector<RawRecord> load_csv(const std::filesystem::path& path, const DatasetSchema& schema);
std::vector<RawRecord> parse_records(std::string_view text, const DatasetSchema& schema);

}  // namespace latentwire::data

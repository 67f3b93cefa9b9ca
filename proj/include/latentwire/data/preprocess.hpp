#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/codec.hpp"
#include "latentwire/data/records.hpp"
#include "latentwire/data/schema.hpp"

namespace latentwire::data {

struct NumericRange {
    std::size_t column = 0;
    std::string name;
    double min = 0.0;
    double max = 0.0;
};

struct CategoryVocabulary {
    std::size_t column = 0;
    std::string name;
    std::vector<std::string> categories;  // sorted, unique
};

// Min-max ranges and one-hot vocabularies fitted on a training split. Output
// slots follow schema column order; each categorical column expands in place.
class PreprocessModel {
public:
    PreprocessModel() = default;
    PreprocessModel(std::string schema_name, std::vector<NumericRange> numeric, std::vector<CategoryVocabulary> categorical,
                    std::size_t column_count);

    std::size_t output_dimension() const noexcept { return output_dimension_; }
    const std::string& schema_name() const noexcept { return schema_name_; }
    std::span<const NumericRange> numeric() const noexcept { return numeric_; }
    std::span<const CategoryVocabulary> categorical() const noexcept { return categorical_; }
    std::size_t column_count() const noexcept { return column_count_; }

    nlohmann::json to_json() const;
    static PreprocessModel from_json(const nlohmann::json& j);
    // Canonical serialization; the fingerprint is SHA-256 over exactly these bytes.
    std::string canonical() const;
    Sha256Digest fingerprint() const;

    void save(const std::filesystem::path& path) const;
    static PreprocessModel load(const std::filesystem::path& path);

private:
    std::string schema_name_;
    std::vector<NumericRange> numeric_;
    std::vector<CategoryVocabulary> categorical_;
    std::size_t column_count_ = 0;
    std::size_t output_dimension_ = 0;
};

PreprocessModel fit_preprocessor(std::span<const RawRecord> records, const DatasetSchema& schema);

std::vector<FeatureVector> transform(std::span<const RawRecord> records, const PreprocessModel& model,
                                     const DatasetSchema& schema, std::uint64_t first_record_id = 0);

// Parses a numeric token; throws ParseError(row, column) for non-numeric or
// non-finite tokens.
double parse_numeric(std::string_view token, std::size_t row, std::size_t column);

}  // namespace latentwire::data

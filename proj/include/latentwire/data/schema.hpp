#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace latentwire::data {

enum class ColumnKind { numeric, categorical, label, drop };

struct Column {
    std::string name;
    ColumnKind kind;
};

struct DatasetSchema {
    std::string name;
    std::vector<Column> columns;
    std::set<std::string> attack_label_values;
    std::set<std::string> normal_label_values;
    bool has_header = false;

    // Throws ConfigError if the schema breaks its invariants (one label column,
    // unique names, disjoint label sets).
    void validate() const;
    std::size_t label_index() const;
    // 0 = normal, 1 = attack; throws ParseError naming the value otherwise.
    int label_of(const std::string& value, std::size_t row) const;
};

ColumnKind column_kind_from_string(const std::string& s);
std::string to_string(ColumnKind kind);

DatasetSchema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const DatasetSchema& schema);
DatasetSchema load_schema(const std::filesystem::path& path);

}  // namespace latentwire::data

#include "latentwire/data/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "latentwire/errors.hpp"

namespace latentwire::data {

double parse_numeric(std::string_view token, std::size_t row, std::size_t column) {
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
        throw ParseError("non-numeric token '" + std::string(token) + "' at row " + std::to_string(row) + ", column " +
                             std::to_string(column),
                         row, column);
    }
    return value;
}

PreprocessModel::PreprocessModel(std::string schema_name, std::vector<NumericRange> numeric,
                                 std::vector<CategoryVocabulary> categorical, std::size_t column_count)
    : schema_name_(std::move(schema_name)), numeric_(std::move(numeric)), categorical_(std::move(categorical)),
      column_count_(column_count) {
    output_dimension_ = numeric_.size();
    for (const auto& c : categorical_) output_dimension_ += c.categories.size();
}

nlohmann::json PreprocessModel::to_json() const {
    nlohmann::json num = nlohmann::json::array();
    for (const auto& n : numeric_) num.push_back({{"column", n.column}, {"name", n.name}, {"min", n.min}, {"max", n.max}});
    nlohmann::json cat = nlohmann::json::array();
    for (const auto& c : categorical_) {
        cat.push_back({{"column", c.column}, {"name", c.name}, {"categories", c.categories}});
    }
    return {{"format_version", 1},
            {"schema", schema_name_},
            {"column_count", column_count_},
            {"output_dimension", output_dimension_},
            {"numeric", num},
            {"categorical", cat}};
}

PreprocessModel PreprocessModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != 1) throw LoadError(LoadFailure::version, "unsupported preprocess format");
        std::vector<NumericRange> num;
        for (const auto& n : j.at("numeric")) {
            num.push_back({n.at("column").get<std::size_t>(), n.at("name").get<std::string>(), n.at("min").get<double>(),
                           n.at("max").get<double>()});
        }
        std::vector<CategoryVocabulary> cat;
        for (const auto& c : j.at("categorical")) {
            cat.push_back({c.at("column").get<std::size_t>(), c.at("name").get<std::string>(),
                           c.at("categories").get<std::vector<std::string>>()});
        }
        PreprocessModel m(j.at("schema").get<std::string>(), std::move(num), std::move(cat),
                          j.at("column_count").get<std::size_t>());
        if (m.output_dimension() != j.at("output_dimension").get<std::size_t>()) {
            throw LoadError(LoadFailure::shape, "preprocess output_dimension disagrees with its vocabularies");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(LoadFailure::corrupt_payload, std::string("preprocess model: ") + e.what());
    }
}

std::string PreprocessModel::canonical() const { return to_json().dump(); }

Sha256Digest PreprocessModel::fingerprint() const { return sha256(canonical()); }

void PreprocessModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw LoadError(LoadFailure::io, "cannot write " + path.string());
    out << canonical() << '\n';
}

PreprocessModel PreprocessModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(LoadFailure::io, "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(LoadFailure::corrupt_payload, path.string() + ": " + e.what());
    }
    return from_json(j);
}

PreprocessModel fit_preprocessor(std::span<const RawRecord> records, const DatasetSchema& schema) {
    if (records.empty()) throw Error("fit_preprocessor: no records");
    std::vector<NumericRange> numeric;
    std::vector<CategoryVocabulary> categorical;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& col = schema.columns[c];
        if (col.kind == ColumnKind::numeric) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t r = 0; r < records.size(); ++r) {
                double v = parse_numeric(records[r].values[c], r, c);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            numeric.push_back({c, col.name, lo, hi});
        } else if (col.kind == ColumnKind::categorical) {
            std::set<std::string> seen;
            for (const auto& rec : records) seen.insert(rec.values[c]);
            categorical.push_back({c, col.name, {seen.begin(), seen.end()}});
        }
    }
    return PreprocessModel(schema.name, std::move(numeric), std::move(categorical), schema.columns.size());
}

std::vector<FeatureVector> transform(std::span<const RawRecord> records, const PreprocessModel& model,
                                     const DatasetSchema& schema, std::uint64_t first_record_id) {
    if (model.column_count() != schema.columns.size() || model.schema_name() != schema.name) {
        throw ShapeError("preprocess model was fitted on a different schema");
    }
    // Slot offsets per schema column, in column order.
    struct Slot {
        std::size_t column;
        const NumericRange* range = nullptr;
        const CategoryVocabulary* vocab = nullptr;
    };
    std::vector<Slot> slots;
    {
        auto n = model.numeric().begin();
        auto v = model.categorical().begin();
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            if (n != model.numeric().end() && n->column == c) slots.push_back({c, &*n++, nullptr});
            else if (v != model.categorical().end() && v->column == c) slots.push_back({c, nullptr, &*v++});
        }
    }
    const std::size_t label_col = schema.label_index();

    std::vector<FeatureVector> out;
    out.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.values.size() != schema.columns.size()) {
            throw ParseError("row " + std::to_string(r) + " arity does not match schema", r);
        }
        FeatureVector fv;
        fv.features.reserve(model.output_dimension());
        for (const auto& s : slots) {
            if (s.range) {
                double x = parse_numeric(rec.values[s.column], r, s.column);
                double span = s.range->max - s.range->min;
                double scaled = span > 0.0 ? (x - s.range->min) / span : 0.0;
                fv.features.push_back(static_cast<float>(std::clamp(scaled, 0.0, 1.0)));
            } else {
                const auto& cats = s.vocab->categories;
                auto it = std::lower_bound(cats.begin(), cats.end(), rec.values[s.column]);
                std::size_t hit = (it != cats.end() && *it == rec.values[s.column]) ? std::size_t(it - cats.begin()) : cats.size();
                for (std::size_t k = 0; k < cats.size(); ++k) fv.features.push_back(k == hit ? 1.0f : 0.0f);
            }
        }
        fv.label = static_cast<std::uint8_t>(schema.label_of(rec.values[label_col], r));
        fv.record_id = first_record_id + r;
        out.push_back(std::move(fv));
    }
    return out;
}

}  // namespace latentwire::data

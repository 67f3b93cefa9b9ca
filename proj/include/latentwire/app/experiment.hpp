#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/data/schema.hpp"
#include "latentwire/data/split.hpp"
#include "latentwire/forest/forest.hpp"
#include "latentwire/model/decoder.hpp"
#include "latentwire/model/encoder.hpp"
#include "latentwire/search/search.hpp"

namespace latentwire::app {

struct SearchSettings {
    std::size_t budget = 0;  // 0 skips the search and trains `encoder` as given
    search::DeskBudget desk;
    search::SearchSpace space;
    search::TpeOptions tpe;
};

// One experiment, one JSON file. Relative paths resolve against the
// directory holding the config file. The master seed drives every stage.
struct ExperimentConfig {
    std::filesystem::path schema;
    std::filesystem::path train_csv;
    std::optional<std::filesystem::path> test_csv;
    std::optional<std::size_t> max_rows;
    data::SplitSpec split;
    model::EncoderSpec encoder;
    SearchSettings search;
    model::DecoderSpec decoder;
    std::vector<std::size_t> latent_sizes{3, 4};
    forest::ForestConfig forest;
    std::filesystem::path out{"out"};
    std::uint64_t seed = 0;

    nlohmann::json source;  // the document as read, before resolution

    // Throws ConfigError naming the field; checks that inputs exist.
    void validate() const;
    // Canonical form used for the manifest hash; excludes `out`.
    nlohmann::json canonical() const;
    std::string hash() const;
};

ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt,
                                 std::optional<std::filesystem::path> out_override = std::nullopt);

// Stage seeds derived from the master seed.
enum class Stage : std::uint64_t { split = 1, encoder = 2, decoder = 3, forest = 4, search = 5, subset = 6 };
std::uint64_t stage_seed(const ExperimentConfig& config, Stage stage);

// Artifact locations under the output directory.
struct Workspace {
    std::filesystem::path root;

    std::filesystem::path preprocess() const { return root / "preprocess.json"; }
    std::filesystem::path dataset(const std::string& split) const { return root / "data" / (split + ".lwds"); }
    std::filesystem::path encoder() const { return root / "encoder.json"; }
    std::filesystem::path encoder_history() const { return root / "encoder_history.csv"; }
    std::filesystem::path map() const { return root / "map.json"; }
    std::filesystem::path decoder() const { return root / "decoder.json"; }
    std::filesystem::path forest() const { return root / "forest.json"; }
    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path trial_log() const { return root / "search_trials.jsonl"; }
    std::filesystem::path search_best() const { return root / "search_best.json"; }
    std::filesystem::path comparison_json() const { return root / "comparison.json"; }
    std::filesystem::path comparison_text() const { return root / "comparison.txt"; }
    std::filesystem::path compression_report() const { return root / "compression.json"; }
    std::filesystem::path variant_dir(std::size_t latent_size) const {
        return root / "compare" / ("ls_" + std::to_string(latent_size));
    }
};

// manifest.json: config hash, seed and the SHA-256 of every artifact a
// command produced. Commands merge into an existing manifest.
class Manifest {
public:
    static Manifest load_or_create(const Workspace& ws, const ExperimentConfig& config);
    void record(const std::string& name, const std::filesystem::path& path);
    void save() const;
    const nlohmann::json& json() const noexcept { return doc_; }

private:
    Workspace ws_;
    nlohmann::json doc_;
};

}  // namespace latentwire::app

#include "latentwire/app/experiment.hpp"

#include <fstream>
#include <iterator>

#include "latentwire/codec.hpp"
#include "latentwire/rng.hpp"
#include "latentwire/nn/serialize.hpp"

namespace latentwire::app {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <typename T>
T field(const nlohmann::json& j, const char* name, T fallback) {
    if (!j.contains(name)) return fallback;
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(name, "has the wrong type");
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    auto must_exist = [](const std::filesystem::path& p, const char* name) {
        if (p.empty()) throw ConfigError(name, "is required");
        if (!std::filesystem::exists(p)) throw ConfigError(name, "file not found: " + p.string());
    };
    must_exist(schema, "schema");
    must_exist(train_csv, "train_csv");
    if (test_csv) must_exist(*test_csv, "test_csv");
    if (max_rows && *max_rows < 10) throw ConfigError("max_rows", "must be at least 10");
    split.validate();
    if (latent_sizes.empty()) throw ConfigError("latent_sizes", "must list at least one size");
    for (auto ls : latent_sizes)
        if (ls == 0) throw ConfigError("latent_sizes", "sizes must be positive");
    if (forest.n_trees == 0) throw ConfigError("forest.n_trees", "must be positive");
    if (encoder.latent_size == 0) throw ConfigError("encoder.latent_size", "must be positive");
    if (search.budget > 0) search.space.validate();
}

nlohmann::json ExperimentConfig::canonical() const {
    nlohmann::json j = source;
    j.erase("out");
    j["seed"] = seed;
    return j;
}

std::string ExperimentConfig::hash() const { return to_hex(sha256(canonical().dump())); }

ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
    ExperimentConfig c;
    c.source = j;
    try {
        c.schema = resolve(base_dir, field<std::string>(j, "schema", ""));
        c.train_csv = resolve(base_dir, field<std::string>(j, "train_csv", ""));
        if (j.contains("test_csv") && !j.at("test_csv").is_null()) c.test_csv = resolve(base_dir, field<std::string>(j, "test_csv", ""));
        if (j.contains("max_rows") && !j.at("max_rows").is_null()) c.max_rows = field<std::size_t>(j, "max_rows", 0);
        c.seed = field<std::uint64_t>(j, "seed", 0);
        c.out = resolve(base_dir, field<std::string>(j, "out", "out"));
        if (j.contains("split")) {
            const auto& s = j.at("split");
            c.split.train_fraction = field(s, "train_fraction", c.split.train_fraction);
            c.split.validation_fraction = field(s, "validation_fraction", c.split.validation_fraction);
            c.split.stratified = field(s, "stratified", c.split.stratified);
        }
        c.split.carve_test = !c.test_csv.has_value();
        if (j.contains("encoder")) c.encoder = model::EncoderSpec::from_json(j.at("encoder"));
        if (j.contains("decoder")) c.decoder = model::DecoderSpec::from_json(j.at("decoder"));
        if (j.contains("forest")) c.forest = forest::ForestConfig::from_json(j.at("forest"));
        c.latent_sizes = field(j, "latent_sizes", c.latent_sizes);
        if (j.contains("search")) {
            const auto& s = j.at("search");
            c.search.budget = field<std::size_t>(s, "budget", 0);
            c.search.desk.epoch_cap = field(s, "epoch_cap", c.search.desk.epoch_cap);
            c.search.desk.row_cap = field(s, "row_cap", c.search.desk.row_cap);
            c.search.desk.batch_size = field(s, "batch_size", c.search.desk.batch_size);
            c.search.tpe.gamma = field(s, "gamma", c.search.tpe.gamma);
            c.search.tpe.candidates = field(s, "candidates", c.search.tpe.candidates);
            if (s.contains("space")) c.search.space = search::SearchSpace::from_json(s.at("space"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config", e.what());
    }
    return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override,
                                 std::optional<std::filesystem::path> out_override) {
    if (!std::filesystem::exists(path)) throw ConfigError("config", "file not found: " + path.string());
    nlohmann::json j;
    try {
        j = nn::read_json_file(path);
    } catch (const LoadError& e) {
        throw ConfigError("config", e.what());
    }
    ExperimentConfig c = experiment_from_json(j, path.parent_path());
    if (seed_override) {
        c.seed = *seed_override;
        c.source["seed"] = *seed_override;
    }
    if (out_override) c.out = *out_override;
    c.validate();
    return c;
}

std::uint64_t stage_seed(const ExperimentConfig& config, Stage stage) {
    return mix_seed(config.seed, static_cast<std::uint64_t>(stage));
}

Manifest Manifest::load_or_create(const Workspace& ws, const ExperimentConfig& config) {
    Manifest m;
    m.ws_ = ws;
    if (std::filesystem::exists(ws.manifest())) {
        m.doc_ = nn::read_json_file(ws.manifest());
        if (m.doc_.value("config_sha256", "") != config.hash()) m.doc_ = nlohmann::json::object();
    }
    m.doc_["config_sha256"] = config.hash();
    m.doc_["seed"] = config.seed;
    if (!m.doc_.contains("artifacts")) m.doc_["artifacts"] = nlohmann::json::object();
    return m;
}

void Manifest::record(const std::string& name, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(LoadFailure::io, "cannot read artifact " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    doc_["artifacts"][name] = {{"path", std::filesystem::relative(path, ws_.root).generic_string()},
                               {"sha256", to_hex(sha256(bytes))}};
}

void Manifest::save() const { nn::write_json_file(ws_.manifest(), doc_); }

}  // namespace latentwire::app

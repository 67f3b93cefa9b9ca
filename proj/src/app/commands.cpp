#include "latentwire/app/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "latentwire/data/preprocess.hpp"
#include "latentwire/data/records.hpp"
#include "latentwire/model/compression_map.hpp"
#include "latentwire/nn/serialize.hpp"

namespace latentwire::app {

namespace {

Workspace workspace(const ExperimentConfig& config) {
    Workspace ws{config.out};
    std::filesystem::create_directories(ws.root / "data");
    return ws;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError(LoadFailure::io, "cannot write " + path.string());
    out << text;
}

std::vector<data::RawRecord> gather(const std::vector<data::RawRecord>& raw, const std::vector<data::FeatureVector>& picks) {
    std::vector<data::RawRecord> out;
    out.reserve(picks.size());
    for (const auto& p : picks) out.push_back(raw[p.record_id]);
    return out;
}

std::vector<data::FeatureVector> featurize(const std::vector<data::RawRecord>& raw,
                                           const std::vector<data::FeatureVector>& picks, const data::PreprocessModel& pp,
                                           const data::DatasetSchema& schema) {
    auto out = data::transform(gather(raw, picks), pp, schema);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].record_id = picks[i].record_id;
    return out;
}

model::EncoderSpec encoder_spec(const ExperimentConfig& config, const Workspace& ws, std::size_t dim) {
    model::EncoderSpec spec = config.encoder;
    if (config.search.budget > 0 && std::filesystem::exists(ws.search_best())) {
        const auto best = nn::read_json_file(ws.search_best());
        const auto point = search::point_from_json(config.search.space, best.at("point"));
        const auto tuned = search::spec_from_point(config.search.space, point, dim);
        spec.latent_size = tuned.latent_size;
        spec.lstm_units = tuned.lstm_units;
        spec.mlp_layers = tuned.mlp_layers;
        spec.activation = tuned.activation;
        spec.training.learning_rate = tuned.training.learning_rate;
        spec.training.epochs = tuned.training.epochs;
    }
    spec.input_dim = dim;
    spec.training.seed = stage_seed(config, Stage::encoder);
    return spec;
}

struct LatentArtifacts {
    model::CompressionMap map;
    model::TrainedDecoder decoder;
};

model::TrainedEncoder train_and_save_encoder(const model::EncoderSpec& spec, const PreparedData& data,
                                             const data::PreprocessModel& pp, const std::filesystem::path& encoder_path,
                                             const std::filesystem::path& map_path,
                                             const std::optional<std::filesystem::path>& history_path) {
    auto encoder = model::train_encoder(model::build_encoder(spec), spec, data.train.records, data.validation.records);
    nn::write_json_file(encoder_path, model::encoder_to_json(encoder));
    if (history_path) write_text(*history_path, model::history_csv(encoder.history));
    model::save_map(model::export_compression_map(encoder, pp), map_path);
    return encoder;
}

model::DecoderSpec decoder_spec(const ExperimentConfig& config, const model::CompressionMap& map) {
    model::DecoderSpec spec = config.decoder;
    spec.latent_size = map.latent_size();
    spec.output_dim = map.input_dim();
    spec.training.seed = stage_seed(config, Stage::decoder);
    return spec;
}

forest::ForestConfig forest_config(const ExperimentConfig& config) {
    auto f = config.forest;
    f.seed = stage_seed(config, Stage::forest);
    return f;
}

}  // namespace

IngestResult cmd_ingest(const ExperimentConfig& config) {
    config.validate();
    const auto schema = data::load_schema(config.schema);
    auto raw = data::load_csv(config.train_csv, schema);
    if (config.max_rows) raw = data::stratified_subset(raw, schema, *config.max_rows, stage_seed(config, Stage::subset));
    if (raw.empty()) throw ConfigError("train_csv", "contains no records");

    // Split on labels first so the preprocessor only sees training rows.
    const auto label_col = schema.label_index();
    std::vector<data::FeatureVector> stubs(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        stubs[i].record_id = i;
        stubs[i].label = static_cast<std::uint8_t>(schema.label_of(raw[i].values[label_col], i));
    }
    auto spec = config.split;
    spec.seed = stage_seed(config, Stage::split);
    const auto parts = data::split(stubs, spec);
    const auto pp = data::fit_preprocessor(gather(raw, parts.train), schema);

    PreparedData d;
    const auto dim = static_cast<std::uint32_t>(pp.output_dimension());
    d.train = {dim, featurize(raw, parts.train, pp, schema)};
    d.validation = {dim, featurize(raw, parts.validation, pp, schema)};
    if (config.test_csv) {
        d.test = {dim, data::transform(data::load_csv(*config.test_csv, schema), pp, schema)};
    } else {
        d.test = {dim, featurize(raw, parts.test, pp, schema)};
    }
    if (d.validation.records.empty() || d.test.records.empty()) throw ConfigError("split", "produced an empty partition");

    const auto ws = workspace(config);
    auto manifest = Manifest::load_or_create(ws, config);
    pp.save(ws.preprocess());
    manifest.record("preprocess", ws.preprocess());
    for (const auto& [name, part] : {std::pair<const char*, const data::Dataset*>{"train", &d.train},
                                     std::pair<const char*, const data::Dataset*>{"validation", &d.validation},
                                     std::pair<const char*, const data::Dataset*>{"test", &d.test}}) {
        data::write_container(ws.dataset(name), part->records, dim);
        manifest.record(std::string("data_") + name, ws.dataset(name));
    }
    manifest.save();
    return {dim, d.train.records.size(), d.validation.records.size(), d.test.records.size()};
}

PreparedData load_prepared(const Workspace& ws) {
    if (!std::filesystem::exists(ws.dataset("train"))) {
        throw LoadError(LoadFailure::io, "no ingested data under " + ws.root.string() + " (run ingest first)");
    }
    return {data::read_container(ws.dataset("train")), data::read_container(ws.dataset("validation")),
            data::read_container(ws.dataset("test"))};
}

search::SearchResult cmd_search(const ExperimentConfig& config) {
    if (config.search.budget == 0) throw ConfigError("search.budget", "must be at least 1 to run a search");
    const auto ws = workspace(config);
    const auto data = load_prepared(ws);
    auto desk = config.search.desk;
    desk.seed = stage_seed(config, Stage::search);
    const auto& space = config.search.space;
    auto objective = search::objective_from_encoder(space, data.train.records, data.validation.records, desk);
    std::ofstream log(ws.trial_log(), std::ios::binary | std::ios::trunc);
    auto result = search::run_search(space, config.search.budget, objective, desk.seed, config.search.tpe,
                                     [&](std::size_t i, const search::Trial& t) {
                                         log << search::trial_to_json(space, t, i).dump() << '\n';
                                         log.flush();
                                     });
    nn::write_json_file(ws.search_best(), {{"point", search::point_to_json(space, result.best.point)},
                                           {"objective", *result.best.objective},
                                           {"trials", result.trials.size()}});
    auto manifest = Manifest::load_or_create(ws, config);
    manifest.record("search_best", ws.search_best());
    manifest.save();
    return result;
}

model::TrainedEncoder cmd_train_encoder(const ExperimentConfig& config) {
    const auto ws = workspace(config);
    const auto data = load_prepared(ws);
    const auto pp = data::PreprocessModel::load(ws.preprocess());
    const auto spec = encoder_spec(config, ws, data.train.dimension);
    auto encoder = train_and_save_encoder(spec, data, pp, ws.encoder(), ws.map(), ws.encoder_history());
    auto manifest = Manifest::load_or_create(ws, config);
    manifest.record("encoder", ws.encoder());
    manifest.record("map", ws.map());
    manifest.save();
    return encoder;
}

model::ReconstructionReport cmd_train_decoder(const ExperimentConfig& config) {
    const auto ws = workspace(config);
    const auto data = load_prepared(ws);
    const auto map = model::load_map(ws.map());
    auto [decoder, report] = model::train_decoder(decoder_spec(config, map), map, data.train.records);
    nn::write_json_file(ws.decoder(), model::decoder_to_json(decoder));
    auto manifest = Manifest::load_or_create(ws, config);
    manifest.record("decoder", ws.decoder());
    manifest.save();
    return report;
}

forest::MetricsReport cmd_train_forest(const ExperimentConfig& config) {
    const auto ws = workspace(config);
    const auto data = load_prepared(ws);
    const auto map = model::load_map(ws.map());
    const auto train = model::compress_all(map, data.train.records);
    auto trained = forest::train_forest(train, forest_config(config));
    forest::save_forest(trained.model, ws.forest());
    auto report = forest::evaluate(trained.model, model::compress_all(map, data.test.records));
    report.training_time_seconds = trained.training_time_seconds;
    auto manifest = Manifest::load_or_create(ws, config);
    manifest.record("forest", ws.forest());
    manifest.save();
    return report;
}

void run_pipeline(const ExperimentConfig& config) {
    cmd_ingest(config);
    if (config.search.budget > 0) cmd_search(config);
    cmd_train_encoder(config);
    cmd_train_decoder(config);
    cmd_train_forest(config);
}

std::vector<std::string> comparison_variants(const std::vector<std::size_t>& latent_sizes) {
    std::vector<std::size_t> sizes = latent_sizes;
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    std::vector<std::string> v{"no_compression"};
    for (auto s : sizes) v.push_back("ls_" + std::to_string(s));
    for (auto s : sizes) v.push_back("recon_ls_" + std::to_string(s));
    return v;
}

void check_rows(const ComparisonReport& report, const std::vector<std::string>& variants) {
    std::vector<std::string> got;
    for (const auto& r : report.rows) got.push_back(r.variant);
    if (got != variants) throw ConfigError("comparison", "report rows do not match the requested variants");
}

namespace {

void evaluate_row(ComparisonRow& row, std::span<const data::FeatureVector> train, std::span<const data::FeatureVector> val,
                  std::span<const data::FeatureVector> test, const forest::ForestConfig& cfg) {
    auto trained = forest::train_forest(train, cfg);
    row.validation = forest::evaluate(trained.model, val);
    row.test = forest::evaluate(trained.model, test);
    row.validation->training_time_seconds = trained.training_time_seconds;
    row.test->training_time_seconds = trained.training_time_seconds;
}

LatentArtifacts latent_artifacts(const ExperimentConfig& config, const Workspace& ws, const PreparedData& data,
                                 std::size_t latent_size) {
    if (latent_size == config.encoder.latent_size && config.search.budget == 0 && std::filesystem::exists(ws.map()) &&
        std::filesystem::exists(ws.decoder())) {
        return {model::load_map(ws.map()), model::decoder_from_json(nn::read_json_file(ws.decoder()))};
    }
    const auto dir = ws.variant_dir(latent_size);
    std::filesystem::create_directories(dir);
    const auto pp = data::PreprocessModel::load(ws.preprocess());
    auto spec = encoder_spec(config, ws, data.train.dimension);
    spec.latent_size = latent_size;
    train_and_save_encoder(spec, data, pp, dir / "encoder.json", dir / "map.json", dir / "encoder_history.csv");
    auto map = model::load_map(dir / "map.json");
    auto decoder = model::train_decoder(decoder_spec(config, map), map, data.train.records).first;
    nn::write_json_file(dir / "decoder.json", model::decoder_to_json(decoder));
    return {std::move(map), std::move(decoder)};
}

}  // namespace

ComparisonReport cmd_compare(const ExperimentConfig& config) {
    const auto ws = workspace(config);
    if (!std::filesystem::exists(ws.dataset("train"))) cmd_ingest(config);
    const auto data = load_prepared(ws);
    const auto fcfg = forest_config(config);
    const auto variants = comparison_variants(config.latent_sizes);
    std::map<std::string, ComparisonRow> rows;
    for (const auto& v : variants) rows[v].variant = v;

    try {
        evaluate_row(rows["no_compression"], data.train.records, data.validation.records, data.test.records, fcfg);
    } catch (const Error& e) {
        rows["no_compression"].error = e.what();
    }
    for (const auto& v : variants) {
        if (v.rfind("ls_", 0) != 0) continue;
        const std::size_t ls = std::stoul(v.substr(3));
        auto& lrow = rows[v];
        auto& rrow = rows["recon_" + v];
        try {
            const auto art = latent_artifacts(config, ws, data, ls);
            evaluate_row(lrow, model::compress_all(art.map, data.train.records), model::compress_all(art.map, data.validation.records),
                         model::compress_all(art.map, data.test.records), fcfg);
            try {
                const auto rtrain = model::reconstruct_all(art.decoder, art.map, data.train.records);
                const auto rval = model::reconstruct_all(art.decoder, art.map, data.validation.records);
                const auto rtest = model::reconstruct_all(art.decoder, art.map, data.test.records);
                evaluate_row(rrow, rtrain, rval, rtest, fcfg);
                rrow.reconstruction_mse = model::reconstruction_report(art.decoder.network, art.map, data.test.records).mse;
            } catch (const Error& e) {
                rrow.error = e.what();
            }
        } catch (const Error& e) {
            lrow.error = e.what();
            rrow.error = std::string("latent variant failed: ") + e.what();
        }
    }
    ComparisonReport report;
    for (const auto& v : variants) report.rows.push_back(rows[v]);
    check_rows(report, variants);
    nn::write_json_file(ws.comparison_json(), report.to_json());
    write_text(ws.comparison_text(), report.to_text());
    return report;
}

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"variant", r.variant}};
        j["validation"] = r.validation ? forest::metrics_to_json(*r.validation) : nlohmann::json(nullptr);
        j["test"] = r.test ? forest::metrics_to_json(*r.test) : nlohmann::json(nullptr);
        j["reconstruction_mse"] = r.reconstruction_mse ? nlohmann::json(*r.reconstruction_mse) : nlohmann::json(nullptr);
        if (!r.error.empty()) j["error"] = r.error;
        arr.push_back(j);
    }
    return {{"rows", arr}};
}

ComparisonReport ComparisonReport::from_json(const nlohmann::json& j) {
    ComparisonReport r;
    for (const auto& row : j.at("rows")) {
        ComparisonRow c;
        c.variant = row.at("variant").get<std::string>();
        if (!row.at("validation").is_null()) c.validation = forest::metrics_from_json(row.at("validation"));
        if (!row.at("test").is_null()) c.test = forest::metrics_from_json(row.at("test"));
        if (!row.at("reconstruction_mse").is_null()) c.reconstruction_mse = row.at("reconstruction_mse").get<double>();
        c.error = row.value("error", "");
        r.rows.push_back(std::move(c));
    }
    return r;
}

namespace {

std::string variant_title(const std::string& v) {
    if (v == "no_compression") return "No Compression";
    if (v.rfind("recon_ls_", 0) == 0) return "Recon. of LS = " + v.substr(9);
    if (v.rfind("ls_", 0) == 0) return "LS = " + v.substr(3);
    return v;
}

std::string fixed(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string ComparisonReport::to_text() const {
    const std::vector<std::string> header{"Input", "Val. Acc.", "Test Acc.", "DR", "Test PR.", "Test FPR.",
                                          "Training Time (sec)", "Recon. MSE"};
    std::vector<std::vector<std::string>> table{header};
    for (const auto& r : rows) {
        std::vector<std::string> line{variant_title(r.variant)};
        const auto val = r.validation ? forest::percent(r.validation->accuracy) : "-";
        if (r.test) {
            line.insert(line.end(), {val, forest::percent(r.test->accuracy), forest::percent(r.test->detection_rate),
                                     forest::percent(r.test->precision), forest::percent(r.test->false_positive_rate),
                                     fixed(r.test->training_time_seconds, 3)});
        } else {
            line.insert(line.end(), {val, "-", "-", "-", "-", "-"});
        }
        line.push_back(r.reconstruction_mse ? fixed(*r.reconstruction_mse, 4) : "-");
        table.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : table)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    std::ostringstream os;
    for (const auto& line : table) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c == 0) {
                os << line[c] << std::string(width[c] - line[c].size(), ' ');
            } else {
                os << "  " << std::string(width[c] - line[c].size(), ' ') << line[c];
            }
        }
        os << '\n';
    }
    for (const auto& r : rows)
        if (!r.error.empty()) os << variant_title(r.variant) << ": " << r.error << '\n';
    return os.str();
}

nlohmann::json CompressionStats::to_json() const {
    return {{"records", records},
            {"input_dim", input_dim},
            {"latent_size", latent_size},
            {"original_bytes", original_bytes},
            {"compressed_bytes", compressed_bytes},
            {"ratio", ratio},
            {"predicted_ratio", predicted_ratio},
            {"reference_ratio", reference_ratio},
            {"reference_note", "872 MB to 29 MB on an unknown on-disk layout; not comparable byte for byte"}};
}

double predicted_compression_ratio(std::size_t input_dim, std::size_t latent_size) {
    const double per_original = static_cast<double>(data::kContainerRecordOverhead + 4 * input_dim);
    const double per_compressed = static_cast<double>(data::kContainerRecordOverhead + 4 * latent_size);
    return 1.0 - per_compressed / per_original;
}

CompressionStats cmd_report_compression(const std::filesystem::path& dataset, const std::filesystem::path& map_path,
                                        const std::filesystem::path& compressed_out) {
    const auto ds = data::read_container(dataset);
    const auto map = model::load_map(map_path);
    if (ds.dimension != map.input_dim()) {
        throw ShapeError("dataset has " + std::to_string(ds.dimension) + " features, map expects " + std::to_string(map.input_dim()));
    }
    const auto compressed = model::compress_all(map, ds.records);
    data::write_container(compressed_out, compressed, static_cast<std::uint32_t>(map.latent_size()));
    CompressionStats s;
    s.records = ds.records.size();
    s.input_dim = ds.dimension;
    s.latent_size = map.latent_size();
    s.original_bytes = std::filesystem::file_size(dataset);
    s.compressed_bytes = std::filesystem::file_size(compressed_out);
    s.ratio = 1.0 - static_cast<double>(s.compressed_bytes) / static_cast<double>(s.original_bytes);
    s.predicted_ratio = predicted_compression_ratio(s.input_dim, s.latent_size);
    s.reference_ratio = 1.0 - 29.0 / 872.0;
    return s;
}

int exit_code_for(const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (!err) return 1;
    static const std::map<std::string, int> codes{{"config", 2}, {"parse", 3},    {"shape", 4},  {"diverged", 5},
                                                  {"load", 6},   {"protocol", 7}, {"network", 7}};
    auto it = codes.find(err->code());
    return it == codes.end() ? 1 : it->second;
}

}  // namespace latentwire::app

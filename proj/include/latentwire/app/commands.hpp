#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/app/experiment.hpp"
#include "latentwire/data/container.hpp"
#include "latentwire/forest/metrics.hpp"

namespace latentwire::app {

struct IngestResult {
    std::size_t dimension = 0;
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
};

struct PreparedData {
    data::Dataset train;
    data::Dataset validation;
    data::Dataset test;
};

IngestResult cmd_ingest(const ExperimentConfig& config);
PreparedData load_prepared(const Workspace& ws);

search::SearchResult cmd_search(const ExperimentConfig& config);
model::TrainedEncoder cmd_train_encoder(const ExperimentConfig& config);
model::ReconstructionReport cmd_train_decoder(const ExperimentConfig& config);
forest::MetricsReport cmd_train_forest(const ExperimentConfig& config);

// ingest, search (when a budget is set), train-encoder, train-decoder, train-forest.
void run_pipeline(const ExperimentConfig& config);

struct ComparisonRow {
    std::string variant;  // no_compression, ls_k or recon_ls_k
    std::optional<forest::MetricsReport> validation;
    std::optional<forest::MetricsReport> test;
    std::optional<double> reconstruction_mse;
    std::string error;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;

    nlohmann::json to_json() const;
    static ComparisonReport from_json(const nlohmann::json& j);
    // Aligned table: Input, Val. Acc., Test Acc., DR, Test PR., Test FPR.,
    // Training Time (sec), Recon. MSE. Percentages carry 3 decimals.
    std::string to_text() const;
};

// no_compression, then ls_k for each size from largest to smallest, then
// recon_ls_k in the same order.
std::vector<std::string> comparison_variants(const std::vector<std::size_t>& latent_sizes);
// Throws ConfigError unless the report rows are exactly `variants`.
void check_rows(const ComparisonReport& report, const std::vector<std::string>& variants);

ComparisonReport cmd_compare(const ExperimentConfig& config);

struct CompressionStats {
    std::size_t records = 0;
    std::size_t input_dim = 0;
    std::size_t latent_size = 0;
    std::uint64_t original_bytes = 0;
    std::uint64_t compressed_bytes = 0;
    double ratio = 0.0;            // measured: 1 - compressed / original
    double predicted_ratio = 0.0;  // from the container layout alone
    double reference_ratio = 0.0;  // 1 - 29 MB / 872 MB, not layout comparable

    nlohmann::json to_json() const;
};

double predicted_compression_ratio(std::size_t input_dim, std::size_t latent_size);
CompressionStats cmd_report_compression(const std::filesystem::path& dataset, const std::filesystem::path& map,
                                        const std::filesystem::path& compressed_out);

// Machine-readable process exit code for a failure category.
int exit_code_for(const std::exception& e);

}  // namespace latentwire::app

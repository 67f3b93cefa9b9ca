#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

namespace latentwire::forest {

// Attack is the positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
    void add(int predicted, int truth) noexcept;
    bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts tally(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);

// Ratios with a zero denominator are absent rather than 0.
struct MetricsReport {
    std::optional<double> accuracy;
    std::optional<double> detection_rate;
    std::optional<double> precision;
    std::optional<double> false_positive_rate;
    double training_time_seconds = 0.0;
    ConfusionCounts counts;
};

MetricsReport metrics_from_counts(const ConfusionCounts& counts, double training_time_seconds = 0.0);

nlohmann::json metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::json& j);

// "88.206" style: ratio as a percentage with three decimals, "-" when absent.
std::string percent(std::optional<double> ratio);

}  // namespace latentwire::forest

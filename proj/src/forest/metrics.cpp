#include "latentwire/forest/metrics.hpp"

#include <cstdio>

#include "latentwire/errors.hpp"

namespace latentwire::forest {

void ConfusionCounts::add(int predicted, int truth) noexcept {
    if (truth) (predicted ? tp : fn)++;
    else (predicted ? fp : tn)++;
}

ConfusionCounts tally(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth) {
    if (predicted.size() != truth.size()) throw ShapeError("tally: prediction and label counts differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) c.add(predicted[i], truth[i]);
    return c;
}

namespace {
std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

MetricsReport metrics_from_counts(const ConfusionCounts& c, double training_time_seconds) {
    MetricsReport r;
    r.counts = c;
    r.training_time_seconds = training_time_seconds;
    r.accuracy = ratio(c.tp + c.tn, c.total());
    r.detection_rate = ratio(c.tp, c.tp + c.fn);
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.false_positive_rate = ratio(c.fp, c.fp + c.tn);
    return r;
}

nlohmann::json metrics_to_json(const MetricsReport& r) {
    auto opt = [](std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"accuracy", opt(r.accuracy)},
            {"detection_rate", opt(r.detection_rate)},
            {"precision", opt(r.precision)},
            {"false_positive_rate", opt(r.false_positive_rate)},
            {"training_time_seconds", r.training_time_seconds},
            {"counts", {{"tp", r.counts.tp}, {"tn", r.counts.tn}, {"fp", r.counts.fp}, {"fn", r.counts.fn}}}};
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
    const auto& c = j.at("counts");
    ConfusionCounts counts{c.at("tp").get<std::uint64_t>(), c.at("tn").get<std::uint64_t>(), c.at("fp").get<std::uint64_t>(),
                           c.at("fn").get<std::uint64_t>()};
    return metrics_from_counts(counts, j.value("training_time_seconds", 0.0));
}

std::string percent(std::optional<double> ratio) {
    if (!ratio) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *ratio * 100.0);
    return buf;
}

}  // namespace latentwire::forest

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/data/records.hpp"
#include "latentwire/errors.hpp"
#include "latentwire/model/encoder.hpp"
#include "latentwire/nn/activation.hpp"
#include "latentwire/rng.hpp"

namespace latentwire::search {

struct QuantizedRange {
    std::size_t low = 0;
    std::size_t high = 0;
    std::size_t step = 1;
};

struct TruncatedNormal {
    double mean = 0.0;
    double sd = 1.0;
    double low = 0.0;
    double high = 1.0;
};

struct SearchSpace {
    QuantizedRange lstm1_units{10, 200, 10};
    QuantizedRange lstm2_units{10, 200, 10};
    std::vector<nn::ActivationKind> activations{nn::ActivationKind::elu, nn::ActivationKind::relu,
                                                nn::ActivationKind::tanh, nn::ActivationKind::sigmoid};
    QuantizedRange epochs{100, 1000, 50};
    TruncatedNormal learning_rate{0.001, 0.01, 0.00001, 0.01};
    std::vector<std::vector<std::size_t>> mlp_confs{
        {60, 20}, {100, 70, 40, 10}, {50, 40, 30, 20, 10}, {100, 80, 60, 40, 20, 10}};
    std::vector<std::size_t> latent_sizes{2, 3, 4, 5};

    void validate() const;
    nlohmann::json to_json() const;
    static SearchSpace from_json(const nlohmann::json& j);
};

struct Point {
    std::size_t lstm1_units = 0;
    std::size_t lstm2_units = 0;
    nn::ActivationKind activation = nn::ActivationKind::relu;
    std::size_t epochs = 0;
    double learning_rate = 0.0;
    std::size_t mlp_conf = 0;  // index into SearchSpace::mlp_confs
    std::size_t latent_size = 0;

    bool operator==(const Point&) const = default;
};

bool contains(const SearchSpace& space, const Point& p);
nlohmann::json point_to_json(const SearchSpace& space, const Point& p);
Point point_from_json(const SearchSpace& space, const nlohmann::json& j);

// round(u / q) * q, clamped into [low, high].
std::size_t quantize(double value, const QuantizedRange& range);

Point sample_prior(const SearchSpace& space, Rng& rng);

enum class TrialStatus { ok, diverged };

struct Trial {
    Point point;
    std::optional<double> objective;
    TrialStatus status = TrialStatus::ok;
    double duration_seconds = 0.0;
};

struct SearchResult {
    std::vector<Trial> trials;
    Trial best;
};

struct TpeOptions {
    double gamma = 0.25;
    std::size_t candidates = 24;
    std::size_t n_startup = 0;  // 0: max(10, budget / 10)
};

// Maximized. A DivergedError thrown by the objective marks the trial diverged.
using Objective = std::function<double(const Point&)>;
using TrialObserver = std::function<void(std::size_t index, const Trial&)>;

class SearchFailed : public Error {
public:
    SearchFailed(const std::string& what, std::vector<Trial> trials) : Error(what), trials_(std::move(trials)) {}
    const std::vector<Trial>& trials() const noexcept { return trials_; }
    const char* code() const noexcept override { return "diverged"; }

private:
    std::vector<Trial> trials_;
};

SearchResult run_search(const SearchSpace& space, std::size_t budget, const Objective& objective, std::uint64_t seed,
                        const TpeOptions& options = {}, const TrialObserver& observer = {});

// Same budget, every point drawn from the prior.
SearchResult run_random_search(const SearchSpace& space, std::size_t budget, const Objective& objective,
                               std::uint64_t seed, const TrialObserver& observer = {});

// The next TPE proposal given a history; exposed for tests.
Point propose(const SearchSpace& space, std::span<const Trial> history, Rng& rng, const TpeOptions& options);

nlohmann::json trial_to_json(const SearchSpace& space, const Trial& trial, std::size_t index);
void write_trial_log(const std::filesystem::path& path, const SearchSpace& space, std::span<const Trial> trials);

struct DeskBudget {
    std::size_t epoch_cap = 50;
    std::size_t row_cap = 20000;
    std::size_t batch_size = 256;
    std::uint64_t seed = 0;
};

model::EncoderSpec spec_from_point(const SearchSpace& space, const Point& p, std::size_t input_dim);

// Trains an encoder for each point with epochs capped and the training rows
// limited to a stratified subset, and returns validation accuracy.
Objective objective_from_encoder(const SearchSpace& space, std::span<const data::FeatureVector> train,
                                 std::span<const data::FeatureVector> validation, const DeskBudget& budget);

// Smooth bowl over the numeric variables with its maximum (0) at `optimum`.
Objective quadratic_objective(const SearchSpace& space, const Point& optimum);

}  // namespace latentwire::search

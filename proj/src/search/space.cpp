#include <algorithm>
#include <cmath>
#include <fstream>

#include "latentwire/search/search.hpp"

namespace latentwire::search {

namespace {

void check_range(const QuantizedRange& r, const char* field) {
    if (r.step == 0 || r.low > r.high || r.low % r.step != 0 || r.high % r.step != 0) {
        throw ConfigError(field, "needs step > 0 and bounds that are multiples of step");
    }
}

nlohmann::json range_json(const QuantizedRange& r) { return {{"range", {r.low, r.high}}, {"q", r.step}}; }

QuantizedRange range_from(const nlohmann::json& j, QuantizedRange fallback) {
    if (j.is_null()) return fallback;
    return {j.at("range").at(0).get<std::size_t>(), j.at("range").at(1).get<std::size_t>(), j.at("q").get<std::size_t>()};
}

}  // namespace

void SearchSpace::validate() const {
    check_range(lstm1_units, "search.lstm1_units");
    check_range(lstm2_units, "search.lstm2_units");
    check_range(epochs, "search.epochs");
    if (lstm1_units.low == 0 || lstm2_units.low == 0 || epochs.low == 0) {
        throw ConfigError("search", "unit and epoch ranges must start above zero");
    }
    if (!(learning_rate.sd > 0) || !(learning_rate.low > 0) || !(learning_rate.low < learning_rate.high)) {
        throw ConfigError("search.learning_rate", "needs sd > 0 and 0 < low < high");
    }
    if (activations.empty()) throw ConfigError("search.activation", "no choices");
    if (mlp_confs.empty()) throw ConfigError("search.mlp_conf", "no choices");
    for (const auto& c : mlp_confs)
        if (c.empty()) throw ConfigError("search.mlp_conf", "an MLP configuration has no layers");
    if (latent_sizes.empty()) throw ConfigError("search.latent_size", "no choices");
}

nlohmann::json SearchSpace::to_json() const {
    nlohmann::json acts = nlohmann::json::array();
    for (auto a : activations) acts.push_back(nn::to_string(a));
    return {{"lstm1_units", range_json(lstm1_units)},
            {"lstm2_units", range_json(lstm2_units)},
            {"activation", acts},
            {"epochs", range_json(epochs)},
            {"learning_rate",
             {{"range", {learning_rate.low, learning_rate.high}}, {"normal", {learning_rate.mean, learning_rate.sd}}}},
            {"mlp_conf", mlp_confs},
            {"latent_size", latent_sizes}};
}

SearchSpace SearchSpace::from_json(const nlohmann::json& j) {
    SearchSpace s;
    s.lstm1_units = range_from(j.value("lstm1_units", nlohmann::json()), s.lstm1_units);
    s.lstm2_units = range_from(j.value("lstm2_units", nlohmann::json()), s.lstm2_units);
    s.epochs = range_from(j.value("epochs", nlohmann::json()), s.epochs);
    if (j.contains("activation")) {
        s.activations.clear();
        for (const auto& a : j.at("activation")) s.activations.push_back(nn::activation_from_string(a.get<std::string>()));
    }
    if (j.contains("learning_rate")) {
        const auto& lr = j.at("learning_rate");
        s.learning_rate = {lr.at("normal").at(0).get<double>(), lr.at("normal").at(1).get<double>(),
                           lr.at("range").at(0).get<double>(), lr.at("range").at(1).get<double>()};
    }
    if (j.contains("mlp_conf")) s.mlp_confs = j.at("mlp_conf").get<std::vector<std::vector<std::size_t>>>();
    if (j.contains("latent_size")) s.latent_sizes = j.at("latent_size").get<std::vector<std::size_t>>();
    s.validate();
    return s;
}

std::size_t quantize(double value, const QuantizedRange& range) {
    const double q = static_cast<double>(range.step);
    double v = std::round(value / q) * q;
    v = std::clamp(v, static_cast<double>(range.low), static_cast<double>(range.high));
    return static_cast<std::size_t>(v);
}

bool contains(const SearchSpace& space, const Point& p) {
    auto in = [](std::size_t v, const QuantizedRange& r) { return v >= r.low && v <= r.high && v % r.step == 0; };
    return in(p.lstm1_units, space.lstm1_units) && in(p.lstm2_units, space.lstm2_units) && in(p.epochs, space.epochs) &&
           std::find(space.activations.begin(), space.activations.end(), p.activation) != space.activations.end() &&
           p.learning_rate >= space.learning_rate.low && p.learning_rate <= space.learning_rate.high &&
           p.mlp_conf < space.mlp_confs.size() &&
           std::find(space.latent_sizes.begin(), space.latent_sizes.end(), p.latent_size) != space.latent_sizes.end();
}

Point sample_prior(const SearchSpace& space, Rng& rng) {
    auto uniform_q = [&](const QuantizedRange& r) {
        std::uniform_real_distribution<double> u(static_cast<double>(r.low), static_cast<double>(r.high));
        return quantize(u(rng), r);
    };
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    Point p;
    p.lstm1_units = uniform_q(space.lstm1_units);
    p.lstm2_units = uniform_q(space.lstm2_units);
    p.activation = space.activations[pick(space.activations.size())];
    p.epochs = uniform_q(space.epochs);
    const auto& lr = space.learning_rate;
    std::normal_distribution<double> normal(lr.mean, lr.sd);
    do {
        p.learning_rate = normal(rng);
    } while (p.learning_rate < lr.low || p.learning_rate > lr.high);
    p.mlp_conf = pick(space.mlp_confs.size());
    p.latent_size = space.latent_sizes[pick(space.latent_sizes.size())];
    return p;
}

nlohmann::json point_to_json(const SearchSpace& space, const Point& p) {
    return {{"lstm1_units", p.lstm1_units},
            {"lstm2_units", p.lstm2_units},
            {"activation", nn::to_string(p.activation)},
            {"epochs", p.epochs},
            {"learning_rate", p.learning_rate},
            {"mlp_conf", space.mlp_confs.at(p.mlp_conf)},
            {"latent_size", p.latent_size}};
}

Point point_from_json(const SearchSpace& space, const nlohmann::json& j) {
    Point p;
    p.lstm1_units = j.at("lstm1_units").get<std::size_t>();
    p.lstm2_units = j.at("lstm2_units").get<std::size_t>();
    p.activation = nn::activation_from_string(j.at("activation").get<std::string>());
    p.epochs = j.at("epochs").get<std::size_t>();
    p.learning_rate = j.at("learning_rate").get<double>();
    const auto conf = j.at("mlp_conf").get<std::vector<std::size_t>>();
    auto it = std::find(space.mlp_confs.begin(), space.mlp_confs.end(), conf);
    if (it == space.mlp_confs.end()) throw ConfigError("mlp_conf", "layer list is not one of the search choices");
    p.mlp_conf = static_cast<std::size_t>(it - space.mlp_confs.begin());
    p.latent_size = j.at("latent_size").get<std::size_t>();
    return p;
}

nlohmann::json trial_to_json(const SearchSpace& space, const Trial& trial, std::size_t index) {
    return {{"trial", index},
            {"status", trial.status == TrialStatus::ok ? "ok" : "diverged"},
            {"objective", trial.objective ? nlohmann::json(*trial.objective) : nlohmann::json(nullptr)},
            {"duration_seconds", trial.duration_seconds},
            {"point", point_to_json(space, trial.point)}};
}

void write_trial_log(const std::filesystem::path& path, const SearchSpace& space, std::span<const Trial> trials) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError(LoadFailure::io, "cannot write trial log " + path.string());
    for (std::size_t i = 0; i < trials.size(); ++i) out << trial_to_json(space, trials[i], i).dump() << '\n';
}

}  // namespace latentwire::search

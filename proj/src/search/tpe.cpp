#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "latentwire/search/search.hpp"

namespace latentwire::search {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Gaussian Parzen mixture on [low, high]: one component per observation
// plus one prior component, equal weights.
class Parzen {
public:
    Parzen(std::vector<double> obs, double prior_mu, double prior_sigma, double low, double high, double step)
        : low_(low), high_(high), step_(step) {
        const double span = high - low;
        std::vector<double> mus = std::move(obs);
        std::sort(mus.begin(), mus.end());
        const double sigma_min = span / std::min(100.0, static_cast<double>(mus.size() + 1));
        for (std::size_t i = 0; i < mus.size(); ++i) {
            double left = i > 0 ? mus[i] - mus[i - 1] : mus[i] - low;
            double right = i + 1 < mus.size() ? mus[i + 1] - mus[i] : high - mus[i];
            components_.push_back({mus[i], std::clamp(std::max(left, right), sigma_min, span)});
        }
        components_.push_back({prior_mu, prior_sigma});
    }

    double sample(Rng& rng) const {
        const auto& c = components_[std::uniform_int_distribution<std::size_t>(0, components_.size() - 1)(rng)];
        std::normal_distribution<double> draw(c.mu, c.sigma);
        for (int attempt = 0; attempt < 64; ++attempt) {
            double v = draw(rng);
            if (v >= low_ && v <= high_) return v;
        }
        return std::clamp(c.mu, low_, high_);
    }

    // Density for continuous variables, bin mass for quantized ones.
    double log_likelihood(double x) const {
        double total = 0.0;
        for (const auto& c : components_) {
            const double z = normal_cdf((high_ - c.mu) / c.sigma) - normal_cdf((low_ - c.mu) / c.sigma);
            if (z <= 0) continue;
            double p;
            if (step_ > 0) {
                const double a = std::max(low_, x - step_ / 2), b = std::min(high_, x + step_ / 2);
                p = normal_cdf((b - c.mu) / c.sigma) - normal_cdf((a - c.mu) / c.sigma);
            } else {
                const double u = (x - c.mu) / c.sigma;
                p = std::exp(-0.5 * u * u) / (c.sigma * std::sqrt(2.0 * 3.14159265358979323846));
            }
            total += p / z;
        }
        total /= static_cast<double>(components_.size());
        return std::log(std::max(total, std::numeric_limits<double>::min()));
    }

private:
    struct Component {
        double mu;
        double sigma;
    };
    std::vector<Component> components_;
    double low_, high_, step_;
};

class Categorical {
public:
    Categorical(const std::vector<std::size_t>& observed, std::size_t k) : weights_(k, 1.0) {
        for (auto c : observed) weights_[c] += 1.0;
        total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    }
    std::size_t sample(Rng& rng) const {
        return std::discrete_distribution<std::size_t>(weights_.begin(), weights_.end())(rng);
    }
    double log_likelihood(std::size_t c) const { return std::log(weights_[c] / total_); }

private:
    std::vector<double> weights_;
    double total_ = 0.0;
};

template <typename T>
std::size_t index_of(const std::vector<T>& values, const T& v) {
    return static_cast<std::size_t>(std::find(values.begin(), values.end(), v) - values.begin());
}

struct Model {
    Parzen lstm1, lstm2, epochs, lr;
    Categorical activation, mlp, latent;

    double log_likelihood(const SearchSpace& s, const Point& p) const {
        return lstm1.log_likelihood(static_cast<double>(p.lstm1_units)) +
               lstm2.log_likelihood(static_cast<double>(p.lstm2_units)) +
               epochs.log_likelihood(static_cast<double>(p.epochs)) + lr.log_likelihood(p.learning_rate) +
               activation.log_likelihood(index_of(s.activations, p.activation)) + mlp.log_likelihood(p.mlp_conf) +
               latent.log_likelihood(index_of(s.latent_sizes, p.latent_size));
    }
};

Parzen quantized_parzen(const std::vector<double>& obs, const QuantizedRange& r) {
    const double lo = static_cast<double>(r.low), hi = static_cast<double>(r.high);
    return Parzen(obs, 0.5 * (lo + hi), hi - lo, lo, hi, static_cast<double>(r.step));
}

Model fit_model(const SearchSpace& s, const std::vector<const Point*>& points) {
    std::vector<double> l1, l2, ep, lr;
    std::vector<std::size_t> act, mlp, lat;
    for (const auto* p : points) {
        l1.push_back(static_cast<double>(p->lstm1_units));
        l2.push_back(static_cast<double>(p->lstm2_units));
        ep.push_back(static_cast<double>(p->epochs));
        lr.push_back(p->learning_rate);
        act.push_back(index_of(s.activations, p->activation));
        mlp.push_back(p->mlp_conf);
        lat.push_back(index_of(s.latent_sizes, p->latent_size));
    }
    const auto& t = s.learning_rate;
    return Model{quantized_parzen(l1, s.lstm1_units),
                 quantized_parzen(l2, s.lstm2_units),
                 quantized_parzen(ep, s.epochs),
                 Parzen(lr, t.mean, t.sd, t.low, t.high, 0.0),
                 Categorical(act, s.activations.size()),
                 Categorical(mlp, s.mlp_confs.size()),
                 Categorical(lat, s.latent_sizes.size())};
}

Point sample_model(const SearchSpace& s, const Model& m, Rng& rng) {
    Point p;
    p.lstm1_units = quantize(m.lstm1.sample(rng), s.lstm1_units);
    p.lstm2_units = quantize(m.lstm2.sample(rng), s.lstm2_units);
    p.epochs = quantize(m.epochs.sample(rng), s.epochs);
    p.learning_rate = m.lr.sample(rng);
    p.activation = s.activations[m.activation.sample(rng)];
    p.mlp_conf = m.mlp.sample(rng);
    p.latent_size = s.latent_sizes[m.latent.sample(rng)];
    return p;
}

Trial evaluate(const Point& p, const Objective& objective) {
    Trial t;
    t.point = p;
    const auto start = std::chrono::steady_clock::now();
    try {
        double v = objective(p);
        if (std::isfinite(v)) t.objective = v;
        else t.status = TrialStatus::diverged;
    } catch (const DivergedError&) {
        t.status = TrialStatus::diverged;
    }
    t.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return t;
}

SearchResult finish(std::vector<Trial> trials) {
    const Trial* best = nullptr;
    for (const auto& t : trials)
        if (t.status == TrialStatus::ok && (!best || *t.objective > *best->objective)) best = &t;
    if (!best) throw SearchFailed("every search trial diverged", std::move(trials));
    Trial b = *best;
    return {std::move(trials), std::move(b)};
}

}  // namespace

Point propose(const SearchSpace& space, std::span<const Trial> history, Rng& rng, const TpeOptions& options) {
    std::vector<const Trial*> ok;
    for (const auto& t : history)
        if (t.status == TrialStatus::ok) ok.push_back(&t);
    if (ok.size() < 2) return sample_prior(space, rng);
    std::stable_sort(ok.begin(), ok.end(), [](const Trial* a, const Trial* b) { return *a->objective > *b->objective; });
    auto n_good = static_cast<std::size_t>(std::ceil(options.gamma * static_cast<double>(ok.size())));
    n_good = std::clamp<std::size_t>(n_good, 1, ok.size() - 1);
    std::vector<const Point*> good, bad;
    for (std::size_t i = 0; i < ok.size(); ++i) (i < n_good ? good : bad).push_back(&ok[i]->point);
    const Model l = fit_model(space, good), g = fit_model(space, bad);

    Point best_point;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < std::max<std::size_t>(1, options.candidates); ++c) {
        Point p = sample_model(space, l, rng);
        double score = l.log_likelihood(space, p) - g.log_likelihood(space, p);
        if (score > best_score) {
            best_score = score;
            best_point = p;
        }
    }
    return best_point;
}

SearchResult run_search(const SearchSpace& space, std::size_t budget, const Objective& objective, std::uint64_t seed,
                        const TpeOptions& options, const TrialObserver& observer) {
    space.validate();
    if (budget == 0) throw ConfigError("search.budget", "must be at least 1");
    if (!(options.gamma > 0 && options.gamma < 1)) throw ConfigError("search.gamma", "must lie in (0, 1)");
    const std::size_t n_startup = options.n_startup ? options.n_startup : std::max<std::size_t>(10, budget / 10);
    Rng rng(mix_seed(seed, 0x7E5));
    std::vector<Trial> trials;
    for (std::size_t i = 0; i < budget; ++i) {
        Point p = i < n_startup ? sample_prior(space, rng) : propose(space, trials, rng, options);
        trials.push_back(evaluate(p, objective));
        if (observer) observer(i, trials.back());
    }
    return finish(std::move(trials));
}

SearchResult run_random_search(const SearchSpace& space, std::size_t budget, const Objective& objective,
                               std::uint64_t seed, const TrialObserver& observer) {
    space.validate();
    if (budget == 0) throw ConfigError("search.budget", "must be at least 1");
    Rng rng(mix_seed(seed, 0x7E5));
    std::vector<Trial> trials;
    for (std::size_t i = 0; i < budget; ++i) {
        trials.push_back(evaluate(sample_prior(space, rng), objective));
        if (observer) observer(i, trials.back());
    }
    return finish(std::move(trials));
}

}  // namespace latentwire::search

#include <doctest.h>

#include <cmath>
#include <omp.h>

#include "latentwire/forest/forest.hpp"
#include "test_util.hpp"

using namespace latentwire;
using namespace latentwire::forest;

namespace {

double oracle_entropy(const std::vector<std::uint8_t>& labels) {
    if (labels.empty()) return 0.0;
    double ones = 0.0;
    for (auto l : labels) ones += l;
    const double n = static_cast<double>(labels.size());
    double h = 0.0;
    for (double c : {n - ones, ones})
        if (c > 0.0) h -= (c / n) * std::log2(c / n);
    return h;
}

double oracle_gain(const std::vector<std::uint8_t>& parent, const std::vector<std::uint8_t>& left,
                   const std::vector<std::uint8_t>& right) {
    const double n = static_cast<double>(parent.size());
    const double weighted = static_cast<double>(left.size()) / n * oracle_entropy(left) +
                            static_cast<double>(right.size()) / n * oracle_entropy(right);
    return std::max(0.0, oracle_entropy(parent) - weighted);
}

std::vector<std::uint8_t> labels_of(std::size_t zeros, std::size_t ones) {
    std::vector<std::uint8_t> v(zeros, 0);
    v.insert(v.end(), ones, 1);
    return v;
}

// Noisy but learnable: label = x0 + x1 > 1, 10% flipped.
std::vector<data::FeatureVector> noisy_set(std::size_t n, std::size_t dim, std::uint64_t seed) {
    auto v = lwtest::random_vectors(n, dim, seed);
    Rng rng(seed + 100);
    for (auto& r : v) {
        r.label = r.features[0] + r.features[1] > 1.0f;
        if (rng() % 10 == 0) r.label ^= 1;
    }
    return v;
}

DecisionTree leaf(std::uint8_t label) {
    TreeNode n;
    n.label = label;
    return DecisionTree({n});
}

ForestModel forest_of(std::vector<DecisionTree> trees, std::size_t features) {
    ForestModel m;
    m.n_trees = trees.size();
    m.trees = std::move(trees);
    m.n_features = features;
    m.max_features = features;
    return m;
}

}  // namespace

TEST_SUITE("forest") {

TEST_CASE("information gain examples") {
    CHECK(information_gain(labels_of(4, 4), labels_of(4, 0), labels_of(0, 4)) == 1.0);
    CHECK(information_gain(labels_of(4, 4), labels_of(2, 2), labels_of(2, 2)) == 0.0);
    CHECK(information_gain(labels_of(6, 2), labels_of(4, 0), labels_of(2, 2)) == doctest::Approx(0.3113).epsilon(1e-4));
    CHECK_THROWS_AS(information_gain(ClassCounts{}, ClassCounts{}, ClassCounts{}), Error);
    CHECK_THROWS_AS(information_gain(labels_of(2, 2), labels_of(2, 0), labels_of(0, 1)), Error);
}

TEST_CASE("information gain equals entropy arithmetic on every small split") {
    std::size_t cases = 0;
    for (std::size_t n = 1; n <= 8; ++n) {
        for (std::size_t n1 = 0; n1 <= n; ++n1) {
            const std::size_t n0 = n - n1;
            for (std::size_t l0 = 0; l0 <= n0; ++l0) {
                for (std::size_t l1 = 0; l1 <= n1; ++l1) {
                    auto p = labels_of(n0, n1), l = labels_of(l0, l1), r = labels_of(n0 - l0, n1 - l1);
                    CHECK(information_gain(p, l, r) == oracle_gain(p, l, r));
                    ++cases;
                }
            }
        }
    }
    CHECK(cases > 0);
}

TEST_CASE("pure data gives one leaf") {
    auto d = lwtest::random_vectors(20, 3, 1);
    for (auto& r : d) r.label = 1;
    Rng rng(1);
    auto t = build_tree(d, 3, rng);
    REQUIRE(t.nodes().size() == 1);
    CHECK(t.nodes()[0].is_leaf());
    CHECK(t.nodes()[0].label == 1);
}

TEST_CASE("one-dimensional midpoint threshold") {
    std::vector<data::FeatureVector> d{{{0.1f}, 0, 0}, {{0.2f}, 0, 1}, {{0.8f}, 1, 2}, {{0.9f}, 1, 3}};
    // Candidates by hand: 0.15 (gain 0.311), 0.5 (gain 1), 0.85 (gain 0.311).
    Rng rng(2);
    auto t = build_tree(d, 1, rng);
    REQUIRE(t.nodes().size() == 3);
    CHECK(t.nodes()[0].feature == 0);
    CHECK(t.nodes()[0].threshold == doctest::Approx(0.5).epsilon(1e-7));
    for (const auto& r : d) CHECK(t.predict(r.features) == r.label);
}

TEST_CASE("root split has the maximal gain") {
    auto d = noisy_set(60, 4, 3);
    Rng rng(3);
    auto t = build_tree(d, 4, rng);
    const auto& root = t.nodes()[0];
    REQUIRE(!root.is_leaf());
    std::vector<std::uint8_t> parent;
    for (const auto& r : d) parent.push_back(r.label);
    double best = 0.0;
    for (std::size_t f = 0; f < 4; ++f) {
        std::vector<float> values;
        for (const auto& r : d) values.push_back(r.features[f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double thr = (static_cast<double>(values[i]) + static_cast<double>(values[i + 1])) / 2.0;
            std::vector<std::uint8_t> l, r;
            for (const auto& row : d) (static_cast<double>(row.features[f]) <= thr ? l : r).push_back(row.label);
            best = std::max(best, oracle_gain(parent, l, r));
        }
    }
    std::vector<std::uint8_t> l, r;
    for (const auto& row : d)
        (static_cast<double>(row.features[static_cast<std::size_t>(root.feature)]) <= root.threshold ? l : r).push_back(row.label);
    CHECK(oracle_gain(parent, l, r) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("unlimited tree fits its own training set") {
    auto d = noisy_set(300, 5, 4);
    Rng rng(4);
    auto t = build_tree(d, 5, rng);
    for (const auto& r : d) CHECK(t.predict(r.features) == r.label);
    CHECK(t.depth() > 0);
}

TEST_CASE("depth and leaf limits hold") {
    auto d = noisy_set(300, 5, 5);
    Rng rng(5);
    TreeConfig cfg{5, 3, 10};
    auto t = build_tree(d, 5, rng, cfg);
    CHECK(t.depth() <= 3);
    for (const auto& n : t.nodes())
        if (n.is_leaf()) CHECK(n.n0 + n.n1 >= 10);
}

TEST_CASE("one tree without bootstrap equals build_tree") {
    auto d = noisy_set(200, 6, 6);
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.seed = 77;
    auto f = train_forest(d, cfg);
    Rng rng(mix_seed(77, 0));
    auto t = build_tree(d, default_max_features(6), rng);
    CHECK(f.model.trees.front() == t);
}

TEST_CASE("forest config checks") {
    auto d = noisy_set(20, 2, 7);
    ForestConfig cfg;
    cfg.n_trees = 0;
    CHECK_THROWS_AS(train_forest(d, cfg), ConfigError);
    CHECK(default_max_features(72) == 9);
    CHECK(default_max_features(3) == 2);
    CHECK(default_max_features(1) == 1);
    CHECK(ForestConfig::from_json(ForestConfig{}.to_json()).to_json() == ForestConfig{}.to_json());
}

TEST_CASE("voting rules") {
    auto zeros = forest_of({leaf(0), leaf(0), leaf(0)}, 2);
    std::vector<float> x{0.1f, 0.2f};
    CHECK(predict(zeros, x) == 0);
    CHECK(vote_fraction(zeros, x) == 0.0);
    auto tie = forest_of({leaf(0), leaf(1)}, 2);
    CHECK(predict(tie, x) == 1);
    CHECK(vote_fraction(tie, x) == 0.5);
    CHECK_THROWS_AS(predict(tie, std::vector<float>{1.0f}), ShapeError);
}

TEST_CASE("majority vote equals a per-tree tally") {
    auto d = noisy_set(400, 4, 8);
    ForestConfig cfg;
    cfg.n_trees = 15;
    cfg.seed = 8;
    auto f = train_forest(d, cfg).model;
    auto probe = lwtest::random_vectors(500, 4, 9);
    auto all = predict_all(f, probe);
    for (std::size_t i = 0; i < probe.size(); ++i) {
        std::size_t votes = 0;
        for (const auto& t : f.trees) votes += t.predict(probe[i].features);
        CHECK(all[i] == (2 * votes >= f.trees.size() ? 1 : 0));
        CHECK(vote_fraction(f, probe[i].features) == static_cast<double>(votes) / static_cast<double>(f.trees.size()));
    }
}

TEST_CASE("parallel training equals serial and repeats exactly") {
    auto d = noisy_set(500, 6, 10);
    ForestConfig cfg;
    cfg.n_trees = 12;
    cfg.seed = 10;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(4);
    auto p = train_forest(d, cfg).model;
    omp_set_num_threads(saved);
    auto s = train_forest_serial(d, cfg).model;
    CHECK(p == s);
    CHECK(train_forest(d, cfg).model == p);
    cfg.seed = 11;
    CHECK(!(train_forest(d, cfg).model == p));
}

TEST_CASE("forest generalizes on a noisy threshold task") {
    auto train = noisy_set(2000, 4, 12), test = noisy_set(1000, 4, 13);
    ForestConfig cfg;
    cfg.n_trees = 30;
    cfg.seed = 12;
    auto report = evaluate(train_forest(train, cfg).model, test);
    REQUIRE(report.accuracy);
    CHECK(*report.accuracy > 0.8);
    CHECK(report.counts.total() == 1000);
}

TEST_CASE("forest file round trip and load errors") {
    auto d = noisy_set(100, 3, 14);
    ForestConfig cfg;
    cfg.n_trees = 4;
    auto f = train_forest(d, cfg).model;
    lwtest::TempDir dir("forest");
    save_forest(f, dir / "f.json");
    CHECK(load_forest(dir / "f.json") == f);

    auto j = forest_to_json(f);
    j["format_version"] = 2;
    try {
        forest_from_json(j);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(e.kind() == LoadFailure::version);
    }
    j = forest_to_json(f);
    j["n_trees"] = 5;
    CHECK_THROWS_AS(forest_from_json(j), LoadError);
    j = forest_to_json(f);
    j["n_features"] = 0;
    CHECK_THROWS_AS(forest_from_json(j), LoadError);
}

TEST_CASE("metrics examples") {
    ConfusionCounts perfect{10, 20, 0, 0};
    auto m = metrics_from_counts(perfect);
    CHECK(*m.accuracy == 1.0);
    CHECK(*m.false_positive_rate == 0.0);

    auto reported = metrics_from_counts(ConfusionCounts{84136, 96879, 3121, 15864});
    CHECK(percent(reported.detection_rate) == "84.136");
    CHECK(percent(reported.false_positive_rate) == "3.121");

    auto no_attacks = metrics_from_counts(ConfusionCounts{0, 5, 0, 0});
    CHECK(!no_attacks.detection_rate);
    CHECK(!no_attacks.precision);
    CHECK(percent(no_attacks.detection_rate) == "-");
    CHECK(!metrics_from_counts(ConfusionCounts{}).accuracy);
}

TEST_CASE("metrics match an independent tally") {
    Rng rng(15);
    std::vector<std::uint8_t> pred(1000), truth(1000);
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred[i] = rng() & 1u;
        truth[i] = rng() & 1u;
        if (pred[i] && truth[i]) ++tp;
        else if (!pred[i] && !truth[i]) ++tn;
        else if (pred[i]) ++fp;
        else ++fn;
    }
    auto c = tally(pred, truth);
    CHECK(c == ConfusionCounts{tp, tn, fp, fn});
    auto m = metrics_from_counts(c, 1.5);
    CHECK(*m.accuracy == static_cast<double>(tp + tn) / 1000.0);
    CHECK(*m.detection_rate == static_cast<double>(tp) / static_cast<double>(tp + fn));
    CHECK(*m.precision == static_cast<double>(tp) / static_cast<double>(tp + fp));
    CHECK(*m.false_positive_rate == static_cast<double>(fp) / static_cast<double>(fp + tn));
    auto back = metrics_from_json(metrics_to_json(m));
    CHECK(back.counts == c);
    CHECK(back.training_time_seconds == 1.5);
    CHECK(*back.accuracy == *m.accuracy);
    pred.pop_back();
    CHECK_THROWS_AS(tally(pred, truth), ShapeError);
}

}  // TEST_SUITE

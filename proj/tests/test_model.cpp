#include <doctest.h>

#include <cstring>

#include "latentwire/data/preprocess.hpp"
#include "latentwire/model/compression_map.hpp"
#include "latentwire/model/decoder.hpp"
#include "latentwire/model/encoder.hpp"
#include "latentwire/nn/evaluate.hpp"
#include "latentwire/nn/serialize.hpp"
#include "test_util.hpp"

using namespace latentwire;
using namespace latentwire::model;

namespace {

// Two informative coordinates split by x0 + x1 > 1 with a margin, plus two
// uniform noise coordinates.
std::vector<data::FeatureVector> separable_set(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<data::FeatureVector> out;
    while (out.size() < n) {
        const float a = u(rng), b = u(rng);
        if (std::abs(a + b - 1.0f) < 0.1f) continue;
        out.push_back({{a, b, u(rng), u(rng)}, static_cast<std::uint8_t>(a + b > 1.0f), out.size()});
    }
    return out;
}

EncoderSpec small_spec(std::size_t input_dim, std::size_t ls, std::size_t epochs) {
    EncoderSpec s;
    s.input_dim = input_dim;
    s.latent_size = ls;
    s.lstm_units = {8, 6};
    s.mlp_layers = {8};
    s.activation = nn::ActivationKind::tanh;
    s.training = {0.01, epochs, 32, 0.0, 5};
    return s;
}

CompressionMap random_map(std::size_t ls, std::size_t in, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    CompressionMap m;
    m.projection.weights = nn::Matrix<float>(ls, in);
    for (auto& w : m.projection.weights.values()) w = u(rng);
    m.projection.bias.resize(ls);
    for (auto& b : m.projection.bias) b = u(rng);
    m.source_dataset = "toy";
    m.preprocess_fingerprint = sha256("toy");
    return m;
}

CompressionMap selector_map(std::size_t ls, std::size_t in) {
    CompressionMap m;
    m.projection.weights = nn::Matrix<float>(ls, in, 0.0f);
    for (std::size_t j = 0; j < ls; ++j) m.projection.weights(j, j) = 1.0f;
    m.projection.bias.assign(ls, 0.0f);
    m.projection.activation = nn::ActivationKind::linear;
    m.source_dataset = "toy";
    return m;
}

DecoderSpec small_decoder(std::size_t ls, std::size_t out, std::size_t epochs) {
    DecoderSpec d;
    d.latent_size = ls;
    d.output_dim = out;
    d.hidden_layers = {16, 16, 16, 16, 16, 16, 16, 16, 16, 16};
    d.training = {0.002, epochs, 32, 0.0, 4};
    return d;
}

std::vector<float> all_parameters(nn::Network<float>& net) {
    std::vector<float> out;
    net.for_each_parameter([&](std::span<float> v, std::span<float>) { out.insert(out.end(), v.begin(), v.end()); });
    return out;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("winner encoder layout") {
    auto spec = winner_encoder_spec(72);
    CHECK(spec.latent_size == 4);
    CHECK(spec.lstm_units == std::pair<std::size_t, std::size_t>{180, 110});
    CHECK(spec.mlp_layers == std::vector<std::size_t>{100, 80, 60, 40, 20, 10});
    auto net = build_encoder(spec);
    CHECK(net.size() == 10);
    const auto& latent = std::get<nn::Dense<float>>(net.layer(0));
    CHECK(latent.weights().rows() == 4);
    CHECK(latent.weights().cols() == 72);
    CHECK(std::holds_alternative<nn::Lstm<float>>(net.layer(1)));
    CHECK(std::holds_alternative<nn::Lstm<float>>(net.layer(2)));
    CHECK(net.output_width(72) == 1);

    spec.latent_size = 3;
    auto ls3 = build_encoder(spec);
    CHECK(ls3.size() == 10);
    CHECK(std::get<nn::Dense<float>>(ls3.layer(0)).weights().rows() == 3);
}

TEST_CASE("latent size must be below the input dimension") {
    auto spec = winner_encoder_spec(4);
    CHECK_THROWS_AS(spec.validate(), ShapeError);
    spec.latent_size = 3;
    CHECK_NOTHROW(spec.validate());
}

TEST_CASE("encoder config JSON and the decay keyword") {
    auto spec = small_spec(4, 2, 50);
    auto back = EncoderSpec::from_json(spec.to_json());
    CHECK(back.to_json() == spec.to_json());
    auto j = spec.to_json();
    j["training"]["decay"] = "lr_over_epochs";
    CHECK(EncoderSpec::from_json(j).training.decay == doctest::Approx(0.01 / 50));
    j["training"]["decay"] = "something";
    CHECK_THROWS_AS(EncoderSpec::from_json(j), ConfigError);
}

TEST_CASE("encoder learns a separable toy set") {
    auto train = separable_set(400, 1);
    auto val = separable_set(100, 2);
    // The labelling rule is linear: check it reproduces every label.
    for (const auto& r : train) CHECK((r.features[0] + r.features[1] > 1.0f) == (r.label == 1));
    auto spec = small_spec(4, 2, 200);
    auto enc = train_encoder(build_encoder(spec), spec, train, val);
    CHECK(nn::evaluate_accuracy(enc.network, train) >= 0.95);
    CHECK(enc.history.size() == 200);
}

TEST_CASE("zero epochs is rejected") {
    auto spec = small_spec(4, 2, 1);
    spec.training.epochs = 0;
    auto d = separable_set(10, 3);
    CHECK_THROWS_AS(train_encoder(build_encoder(spec), spec, d, d), ConfigError);
}

TEST_CASE("encoder training is deterministic") {
    auto train = separable_set(120, 4);
    auto val = separable_set(40, 5);
    auto spec = small_spec(4, 3, 3);
    auto a = train_encoder(build_encoder(spec), spec, train, val);
    auto b = train_encoder(build_encoder(spec), spec, train, val);
    auto pa = all_parameters(a.network), pb = all_parameters(b.network);
    REQUIRE(pa.size() == pb.size());
    CHECK(std::memcmp(pa.data(), pb.data(), pa.size() * sizeof(float)) == 0);
}

TEST_CASE("exported map taps the latent layer bit for bit") {
    auto spec = small_spec(6, 3, 1);
    auto d = lwtest::random_vectors(64, 6, 6);
    auto enc = train_encoder(build_encoder(spec), spec, d, d);
    data::PreprocessModel pre;
    auto map = export_compression_map(enc, pre);
    CHECK(map.latent_size() == 3);
    CHECK(map.input_dim() == 6);
    CHECK(map.preprocess_fingerprint == pre.fingerprint());
    auto probe = lwtest::random_vectors(1000, 6, 7);
    for (const auto& r : probe) {
        auto z = compress(map, r);
        auto tap = enc.latent(r.features);
        REQUIRE(z.size() == tap.size());
        CHECK(std::memcmp(z.data(), tap.data(), z.size() * sizeof(float)) == 0);
    }
}

TEST_CASE("winner architecture exports a 4 x d map") {
    auto spec = winner_encoder_spec(12);
    TrainedEncoder enc{spec, build_encoder(spec), {}};
    auto map = export_compression_map(enc, data::PreprocessModel{});
    CHECK(map.projection.weights.rows() == 4);
    CHECK(map.projection.weights.cols() == 12);
}

TEST_CASE("compress examples") {
    CompressionMap zero;
    zero.projection.weights = nn::Matrix<float>(3, 5, 0.0f);
    zero.projection.bias.assign(3, 0.0f);
    zero.projection.activation = nn::ActivationKind::sigmoid;
    CHECK(compress(zero, std::vector<float>{1, 2, 3, 4, 5}) == std::vector<float>{0.5f, 0.5f, 0.5f});

    auto sel = selector_map(3, 5);
    CHECK(compress(sel, std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f, 0.5f}) == std::vector<float>{0.1f, 0.2f, 0.3f});
    CHECK_THROWS_AS(compress(sel, std::vector<float>{1, 2}), ShapeError);
}

TEST_CASE("64-bit projection matches a scalar oracle and counts its multiplies") {
    Rng rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LatentProjection<double> p;
    p.weights = nn::Matrix<double>(3, 42);
    for (auto& w : p.weights.values()) w = u(rng);
    p.bias = {u(rng), u(rng), u(rng)};
    p.activation = nn::ActivationKind::sigmoid;
    std::vector<double> x(42), z(3);
    for (auto& v : x) v = u(rng);
    OpCounter ops;
    project(p, std::span<const double>(x), std::span<double>(z), ops);
    for (std::size_t j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 42; ++k) acc += p.weights(j, k) * x[k];
        const double expect = 1.0 / (1.0 + std::exp(-(acc + p.bias[j])));
        CHECK(std::abs(z[j] - expect) <= 1e-12 * std::abs(expect));
    }
    CHECK(ops.multiplies == 3 * 42);
    CHECK(ops.activations == 3);
}

TEST_CASE("map files") {
    lwtest::TempDir dir("map");
    auto map = random_map(3, 10, 9);
    save_map(map, dir / "m.json");
    auto back = load_map(dir / "m.json", map.preprocess_fingerprint);
    CHECK(back.projection.weights.rows() == 3);
    CHECK(std::memcmp(back.projection.weights.data(), map.projection.weights.data(), 30 * sizeof(float)) == 0);
    CHECK(back.projection.bias == map.projection.bias);
    save_map(back, dir / "m2.json");
    CHECK(lwtest::read_text(dir / "m.json") == lwtest::read_text(dir / "m2.json"));

    auto expect_kind = [](const std::filesystem::path& p, LoadFailure kind, std::optional<Sha256Digest> fp = std::nullopt) {
        try {
            (void)load_map(p, fp);
            FAIL("expected LoadError");
        } catch (const LoadError& e) {
            CHECK(e.kind() == kind);
        }
    };
    expect_kind(dir / "m.json", LoadFailure::fingerprint, sha256("other"));
    auto text = lwtest::read_text(dir / "m.json");
    lwtest::write_text(dir / "trunc.json", text.substr(0, text.size() / 2));
    expect_kind(dir / "trunc.json", LoadFailure::corrupt_payload);

    auto j = map.to_json();
    j["format_version"] = 99;
    nn::write_json_file(dir / "v.json", j);
    expect_kind(dir / "v.json", LoadFailure::version);
    j = map.to_json();
    j["latent_size"] = 4;
    nn::write_json_file(dir / "s.json", j);
    expect_kind(dir / "s.json", LoadFailure::shape);
    j = map.to_json();
    j["weights"] = "@@not base64@@";
    nn::write_json_file(dir / "b.json", j);
    expect_kind(dir / "b.json", LoadFailure::corrupt_payload);
}

TEST_CASE("decoder layout and zero weights") {
    DecoderSpec spec;
    spec.latent_size = 3;
    spec.output_dim = 42;
    auto net = build_decoder(spec);
    CHECK(net.size() == 11);
    CHECK(net.output_width(3) == 42);
    net.for_each_parameter([](std::span<float> v, std::span<float>) { std::fill(v.begin(), v.end(), 0.0f); });
    TrainedDecoder dec{spec, net, {}};
    for (float v : reconstruct(dec, std::vector<float>{0.3f, 0.1f, 0.9f})) CHECK(v == 0.5f);
    CHECK_THROWS_AS(reconstruct(dec, std::vector<float>{1.0f}), ShapeError);
    spec.hidden_layers.pop_back();
    CHECK_THROWS_AS(spec.validate(), ShapeError);
}

TEST_CASE("decoder reproduces selected coordinates") {
    auto data = lwtest::random_vectors(1000, 6, 10);
    auto map = selector_map(2, 6);
    auto spec = small_decoder(2, 6, 150);
    auto [dec, report] = train_decoder(spec, map, data);
    REQUIRE(report.per_feature_mae.size() == 6);
    CHECK(report.per_feature_mae[0] < 0.05);
    CHECK(report.per_feature_mae[1] < 0.05);
    // The rest is independent of the latent: the best guess is the mean.
    for (std::size_t k = 2; k < 6; ++k) CHECK(report.per_feature_mae[k] < 0.3);
}

TEST_CASE("zero-epoch decoder reports the untrained error") {
    auto data = lwtest::random_vectors(50, 5, 11);
    auto map = random_map(2, 5, 12);
    auto spec = small_decoder(2, 5, 0);
    auto [dec, report] = train_decoder(spec, map, data);
    CHECK(std::isfinite(report.mse));
    CHECK(dec.train_loss_history.empty());
    auto again = train_decoder(spec, map, data).second;
    CHECK(again.mse == report.mse);
}

TEST_CASE("constant data is reconstructed almost exactly") {
    std::vector<data::FeatureVector> data(200, data::FeatureVector{{0.2f, 0.7f, 0.4f, 0.9f}, 0, 0});
    auto map = random_map(2, 4, 13);
    auto spec = small_decoder(2, 4, 60);
    auto report = train_decoder(spec, map, data).second;
    CHECK(report.mse < 1e-4);
}

TEST_CASE("decoder JSON round trip") {
    auto data = lwtest::random_vectors(40, 5, 14);
    auto spec = small_decoder(2, 5, 1);
    auto dec = train_decoder(spec, random_map(2, 5, 15), data).first;
    auto back = decoder_from_json(decoder_to_json(dec));
    std::vector<float> z{0.4f, 0.6f};
    CHECK(reconstruct(back, z) == reconstruct(dec, z));
}

}  // TEST_SUITE

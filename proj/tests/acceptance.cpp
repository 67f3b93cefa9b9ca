// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <thread>

#include "gradcheck.hpp"
#include "latentwire/app/commands.hpp"
#include "latentwire/data/container.hpp"
#include "latentwire/data/synth.hpp"
#include "latentwire/model/encoder.hpp"
#include "latentwire/nn/serialize.hpp"
#include "latentwire/search/search.hpp"
#include "net_rig.hpp"

using namespace latentwire;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    int id = 0;
    std::string title;
    bool pass = true;
    std::vector<std::string> details;

    void note(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
        char buf[512];
        va_list args;
        va_start(args, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, args);
        va_end(args);
        details.emplace_back(buf);
    }
    void require(bool ok, const char* what) {
        if (!ok) {
            pass = false;
            details.push_back(std::string("failed: ") + what);
        }
    }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void progress(const std::string& msg) { std::cerr << "[acceptance] " << msg << std::endl; }

std::size_t rss_kib() {
    std::ifstream in("/proc/self/status");
    for (std::string line; std::getline(in, line);)
        if (line.rfind("VmRSS:", 0) == 0) return std::stoul(line.substr(6));
    return 0;
}

// ---------------------------------------------------------------- criterion 1

Outcome gradients() {
    Outcome o{1, "gradient correctness (dense, LSTM, BCE, MSE; float64)", true, {}};
    const auto start = Clock::now();
    double worst = 0.0;
    std::size_t params = 0, nets = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Rng rng(seed * 31);
        const std::size_t input = 3 + rng() % 6;  // 3..8
        const std::size_t latent = 2 + rng() % std::min<std::size_t>(input - 1, 4);
        auto rec = lwtest::toy_recurrent_net(input, latent, seed);
        auto x = lwtest::random_matrix(4, input, seed + 100, 0.0, 1.0);
        nn::Matrix<double> labels(4, 1);
        for (std::size_t r = 0; r < 4; ++r) labels(r, 0) = static_cast<double>((seed + r) % 2);
        auto a = lwtest::grad_check(rec, x, labels, nn::LossKind::binary_cross_entropy);
        auto b = lwtest::grad_check(rec, x, lwtest::random_matrix(4, 1, seed + 200, 0.0, 1.0), nn::LossKind::mean_squared_error);
        auto dense = lwtest::toy_dense_net(latent, input, seed + 300);
        auto c = lwtest::grad_check(dense, lwtest::random_matrix(5, latent, seed + 400, 0.0, 1.0),
                                    lwtest::random_matrix(5, input, seed + 500, 0.0, 1.0), nn::LossKind::mean_squared_error);
        worst = std::max({worst, a.max_relative_error, b.max_relative_error, c.max_relative_error});
        params += a.parameters + b.parameters + c.parameters;
        nets += 3;
    }
    const double t = seconds_since(start);
    o.note("%zu networks, %zu parameters checked, max relative error %.3e, %.2f s", nets, params, worst, t);
    o.require(worst < 1e-4, "max relative error < 1e-4");
    o.require(t < 30.0, "runtime < 30 s");
    return o;
}

// ---------------------------------------------------------------- criterion 2

Outcome projection_conformance() {
    Outcome o{2, "latent projection and sigmoid conformance", true, {}};
    double worst = 0.0;
    bool counts_exact = true;
    std::size_t records = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Rng rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const std::size_t ls = 2 + seed % 4, in = 42 + 5 * seed;
        model::LatentProjection<double> p;
        p.weights = nn::Matrix<double>(ls, in);
        for (auto& w : p.weights.values()) w = u(rng);
        p.bias.resize(ls);
        for (auto& b : p.bias) b = u(rng);
        p.activation = nn::ActivationKind::sigmoid;
        std::vector<double> x(in), z(ls);
        model::OpCounter ops;
        const std::size_t n = 125;
        for (std::size_t r = 0; r < n; ++r) {
            for (auto& v : x) v = u(rng);
            model::project(p, std::span<const double>(x), std::span<double>(z), ops);
            for (std::size_t j = 0; j < ls; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < in; ++k) acc += p.weights(j, k) * x[k];
                const double expect = 1.0 / (1.0 + std::exp(-(acc + p.bias[j])));
                worst = std::max(worst, std::abs(z[j] - expect) / std::abs(expect));
            }
        }
        counts_exact = counts_exact && ops.multiplies == n * ls * in && ops.activations == n * ls;
        records += n;
    }
    double sym = std::abs(nn::sigmoid(0.0) - 0.5);
    Rng rng(99);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = u(rng);
        sym = std::max(sym, std::abs(nn::sigmoid(v) + nn::sigmoid(-v) - 1.0));
    }
    o.note("%zu records vs triple-loop oracle: max relative error %.3e", records, worst);
    o.note("sigmoid: |s(0)-0.5| and max |s(x)+s(-x)-1| over 1e4 points = %.3e", sym);
    o.note("op count: %s latent_size x input_dim multiplies per record", counts_exact ? "exactly" : "NOT");
    o.require(worst <= 1e-12, "oracle agreement within 1e-12");
    o.require(sym <= 1e-12, "sigmoid identities within 1e-12");
    o.require(counts_exact, "exact multiply count");
    return o;
}

// ---------------------------------------------------------------- criterion 4

double oracle_entropy(std::size_t n0, std::size_t n1) {
    const double n = static_cast<double>(n0 + n1);
    if (n == 0.0) return 0.0;
    double h = 0.0;
    for (double c : {static_cast<double>(n0), static_cast<double>(n1)})
        if (c > 0.0) h -= (c / n) * std::log2(c / n);
    return h;
}

Outcome forest_oracles(const forest::ForestModel& forest, std::span<const data::FeatureVector> test) {
    Outcome o{4, "random-forest oracle suite", true, {}};
    std::size_t splits = 0, mismatches = 0;
    for (std::size_t n = 1; n <= 8; ++n) {
        for (std::size_t n1 = 0; n1 <= n; ++n1) {
            const std::size_t n0 = n - n1;
            for (std::size_t l0 = 0; l0 <= n0; ++l0) {
                for (std::size_t l1 = 0; l1 <= n1; ++l1) {
                    std::vector<std::uint8_t> p(n0, 0), l(l0, 0), r(n0 - l0, 0);
                    p.insert(p.end(), n1, 1);
                    l.insert(l.end(), l1, 1);
                    r.insert(r.end(), n1 - l1, 1);
                    const double nd = static_cast<double>(n);
                    const double expect = std::max(
                        0.0, oracle_entropy(n0, n1) - (static_cast<double>(l0 + l1) / nd * oracle_entropy(l0, l1) +
                                                       static_cast<double>(n - l0 - l1) / nd * oracle_entropy(n0 - l0, n1 - l1)));
                    mismatches += forest::information_gain(p, l, r) != expect;
                    ++splits;
                }
            }
        }
    }
    o.note("information gain: %zu exhaustive splits, %zu mismatches", splits, mismatches);
    o.require(mismatches == 0, "exact information gain");

    std::size_t vote_mismatch = 0;
    const auto predicted = forest::predict_all(forest, test);
    for (std::size_t i = 0; i < test.size(); ++i) {
        std::size_t votes = 0;
        for (const auto& t : forest.trees) votes += t.predict(test[i].features);
        vote_mismatch += predicted[i] != (2 * votes >= forest.trees.size() ? 1 : 0);
    }
    o.note("majority vote vs per-tree tally: %zu records, %zu trees, %zu mismatches", test.size(), forest.trees.size(),
           vote_mismatch);
    o.require(vote_mismatch == 0, "vote equals tally");

    Rng rng(4);
    std::vector<std::uint8_t> pred(10000), truth(10000);
    forest::ConfusionCounts oracle;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred[i] = rng() & 1u;
        truth[i] = rng() & 1u;
        if (pred[i] == 1 && truth[i] == 1) ++oracle.tp;
        if (pred[i] == 0 && truth[i] == 0) ++oracle.tn;
        if (pred[i] == 1 && truth[i] == 0) ++oracle.fp;
        if (pred[i] == 0 && truth[i] == 1) ++oracle.fn;
    }
    const auto got = forest::tally(pred, truth);
    const auto m = forest::metrics_from_counts(got);
    const bool ratios = *m.accuracy == static_cast<double>(oracle.tp + oracle.tn) / 10000.0 &&
                        *m.detection_rate == static_cast<double>(oracle.tp) / static_cast<double>(oracle.tp + oracle.fn) &&
                        *m.false_positive_rate == static_cast<double>(oracle.fp) / static_cast<double>(oracle.fp + oracle.tn);
    o.note("confusion tally on 1e4 pairs: tp=%llu tn=%llu fp=%llu fn=%llu (oracle %s)",
           static_cast<unsigned long long>(got.tp), static_cast<unsigned long long>(got.tn),
           static_cast<unsigned long long>(got.fp), static_cast<unsigned long long>(got.fn),
           got == oracle ? "identical" : "DIFFERENT");
    o.require(got == oracle && ratios, "metrics equal the independent tally");
    return o;
}

// ---------------------------------------------------------------- criterion 7

Outcome compression_ratio(const std::filesystem::path& dir) {
    Outcome o{7, "compression ratio for the container layout (42 features, LS = 3)", true, {}};
    auto records = lwtest::random_vectors(10000, 42, 7);
    data::write_container(dir / "d42.lwds", records, 42);
    Rng rng(7);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    model::CompressionMap map;
    map.projection.weights = nn::Matrix<float>(3, 42);
    for (auto& w : map.projection.weights.values()) w = u(rng);
    map.projection.bias = {0.0f, 0.0f, 0.0f};
    map.source_dataset = "d42";
    model::save_map(map, dir / "d42_map.json");
    const auto s = app::cmd_report_compression(dir / "d42.lwds", dir / "d42_map.json", dir / "d42_ls3.lwds");
    const double payload_only = 1.0 - 12.0 / 168.0;
    o.note("on disk: %llu -> %llu bytes, measured ratio %.3f %%", static_cast<unsigned long long>(s.original_bytes),
           static_cast<unsigned long long>(s.compressed_bytes), 100.0 * s.ratio);
    o.note("byte-arithmetic prediction 1 - (9 + 12)/(9 + 168) = %.3f %%", 100.0 * s.predicted_ratio);
    o.note("feature payload alone (168 B -> 12 B): %.3f %%", 100.0 * payload_only);
    o.note("reference only, not layout comparable: 872 MB -> 29 MB = %.3f %%", 100.0 * s.reference_ratio);
    o.require(std::abs(s.ratio - s.predicted_ratio) <= 0.01, "measured within 1 point of prediction");
    return o;
}

// ---------------------------------------------------------------- criterion 9

Outcome search_sanity() {
    Outcome o{9, "hyper-search sanity on the quadratic objective", true, {}};
    search::SearchSpace space;
    search::Point optimum;
    optimum.lstm1_units = 150;
    optimum.lstm2_units = 60;
    optimum.epochs = 700;
    optimum.learning_rate = 0.003;
    optimum.mlp_conf = 1;
    optimum.latent_size = 3;
    auto f = search::quadratic_objective(space, optimum);

    Rng rng(2024);
    std::vector<double> oracle;
    for (int i = 0; i < 10000; ++i) oracle.push_back(f(search::sample_prior(space, rng)));
    std::sort(oracle.begin(), oracle.end());
    const double top5 = oracle[9500];

    auto on_grid = [&](const search::Point& p) {
        auto q = [](std::size_t v, const search::QuantizedRange& r) { return v >= r.low && v <= r.high && v % r.step == 0; };
        return q(p.lstm1_units, space.lstm1_units) && q(p.lstm2_units, space.lstm2_units) && q(p.epochs, space.epochs) &&
               p.learning_rate >= space.learning_rate.low && p.learning_rate <= space.learning_rate.high &&
               search::contains(space, p);
    };
    int wins = 0, in_top = 0;
    std::size_t off_grid = 0, points = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto tpe = search::run_search(space, 60, f, seed);
        auto rnd = search::run_random_search(space, 60, f, seed);
        for (const auto* r : {&tpe, &rnd})
            for (const auto& t : r->trials) {
                off_grid += !on_grid(t.point);
                ++points;
            }
        wins += *tpe.best.objective > *rnd.best.objective;
        in_top += *tpe.best.objective >= top5;
        o.note("seed %2llu: tpe best %.5f, random best %.5f", static_cast<unsigned long long>(seed), *tpe.best.objective,
               *rnd.best.objective);
    }
    o.note("top-5%% threshold of the 1e4-point oracle: %.5f; TPE in top 5%%: %d/10; TPE beats random: %d/10", top5, in_top,
           wins);
    o.note("%zu sampled points, %zu outside quantization/bounds", points, off_grid);
    o.require(in_top == 10, "every TPE run lands in the oracle's top 5%");
    o.require(wins >= 8, "TPE beats random in >= 8 of 10 seeds");
    o.require(off_grid == 0, "all points on the grid");
    return o;
}

// ---------------------------------------------------------------- desk-scale pipeline

struct DeskRun {
    app::ExperimentConfig config;
    app::PreparedData data;
    model::TrainedEncoder encoder;
    model::CompressionMap map;
    model::ReconstructionReport decoder_report;
    forest::MetricsReport compressed;
    forest::ForestModel forest;
    double pipeline_seconds = 0.0;
};

constexpr std::size_t kEncoderEpochs = 10;
constexpr std::size_t kDecoderEpochs = 30;

nlohmann::json desk_config(const std::filesystem::path& csv, const std::filesystem::path& out) {
    return {{"schema", (lwtest::source_dir() / "schemas" / "nsl_kdd.json").string()},
            {"train_csv", csv.string()},
            {"max_rows", 20000},
            {"split", {{"train_fraction", 0.7}, {"validation_fraction", 0.1}, {"stratified", true}}},
            {"encoder",
             {{"latent_size", 3},
              {"lstm_units", {180, 110}},
              {"mlp_layers", {100, 80, 60, 40, 20, 10}},
              {"activation", "relu"},
              {"latent_activation", "sigmoid"},
              {"training", {{"learning_rate", 0.0092278}, {"epochs", kEncoderEpochs}, {"batch_size", 256}, {"decay", "lr_over_epochs"}}}}},
            {"decoder", {{"training", {{"learning_rate", 0.001}, {"epochs", kDecoderEpochs}, {"batch_size", 256}}}}},
            {"latent_sizes", {3}},
            {"forest", {{"n_trees", 100}}},
            {"out", out.string()},
            {"seed", 2024}};
}

DeskRun desk_pipeline(const std::filesystem::path& csv, const std::filesystem::path& out) {
    DeskRun r;
    r.config = app::experiment_from_json(desk_config(csv, out), out);
    const auto start = Clock::now();
    auto ingest = app::cmd_ingest(r.config);
    progress("ingested " + std::to_string(ingest.train) + "/" + std::to_string(ingest.validation) + "/" +
             std::to_string(ingest.test) + " rows, dimension " + std::to_string(ingest.dimension));
    r.encoder = app::cmd_train_encoder(r.config);
    progress("encoder trained, validation accuracy " + std::to_string(r.encoder.history.back().validation_accuracy));
    r.decoder_report = app::cmd_train_decoder(r.config);
    progress("decoder trained, validation MSE " + std::to_string(r.decoder_report.mse));
    r.compressed = app::cmd_train_forest(r.config);
    r.pipeline_seconds = seconds_since(start);
    app::Workspace ws{out};
    r.data = app::load_prepared(ws);
    r.map = model::load_map(ws.map());
    r.forest = forest::load_forest(ws.forest());
    return r;
}

Outcome latent_tap(const DeskRun& run) {
    Outcome o{3, "latent-tap equivalence of the exported map", true, {}};
    auto probe = lwtest::random_vectors(1000, run.map.input_dim(), 3);
    std::size_t differ = 0;
    for (const auto& r : probe) {
        auto z = model::compress(run.map, r);
        auto tap = run.encoder.latent(r.features);
        differ += z.size() != tap.size() || std::memcmp(z.data(), tap.data(), z.size() * sizeof(float)) != 0;
    }
    o.note("1000 random %zu-feature vectors, %zu not bit-identical", run.map.input_dim(), differ);
    o.require(differ == 0, "bit-identical latents");
    return o;
}

Outcome accuracy_direction(const DeskRun& run, double& baseline_seconds) {
    Outcome o{5, "desk-scale accuracy direction (20 000 rows, LS = 3)", true, {}};
    const auto start = Clock::now();
    auto cfg = run.config.forest;
    cfg.seed = app::stage_seed(run.config, app::Stage::forest);
    auto original = forest::train_forest(run.data.train.records, cfg);
    auto report = forest::evaluate(original.model, run.data.test.records);
    baseline_seconds = seconds_since(start);
    const double total = run.pipeline_seconds + baseline_seconds;
    const double a_orig = 100.0 * *report.accuracy, a_ls3 = 100.0 * *run.compressed.accuracy;
    o.note("encoder: %zu epochs, final validation accuracy %.3f %%", run.encoder.history.size(),
           100.0 * run.encoder.history.back().validation_accuracy);
    o.note("RF test accuracy: original %.3f %%, LS = 3 %.3f %% (delta %.3f points)", a_orig, a_ls3, a_orig - a_ls3);
    o.note("LS = 3 test DR %s %%, PR %s %%, FPR %s %%", forest::percent(run.compressed.detection_rate).c_str(),
           forest::percent(run.compressed.precision).c_str(), forest::percent(run.compressed.false_positive_rate).c_str());
    o.note("runtime: pipeline %.1f s + original-feature forest %.1f s = %.1f s on %u hardware threads", run.pipeline_seconds,
           baseline_seconds, total, std::thread::hardware_concurrency());
    o.require(a_ls3 >= a_orig - 5.0, "compressed accuracy >= original - 5 points");
    o.require(total < 1800.0, "total runtime < 30 min");
    return o;
}

Outcome training_time(const DeskRun& run) {
    Outcome o{6, "forest training-time direction (LS = 3 vs original features)", true, {}};
    const auto latents = model::compress_all(run.map, run.data.train.records);
    int faster = 0;
    for (std::uint64_t rep = 1; rep <= 3; ++rep) {
        auto cfg = run.config.forest;
        cfg.seed = mix_seed(app::stage_seed(run.config, app::Stage::forest), rep);
        const double t_orig = forest::train_forest(run.data.train.records, cfg).training_time_seconds;
        const double t_ls3 = forest::train_forest(latents, cfg).training_time_seconds;
        faster += t_ls3 < t_orig;
        o.note("repetition %llu: original %.3f s, LS = 3 %.3f s", static_cast<unsigned long long>(rep), t_orig, t_ls3);
    }
    o.require(faster == 3, "LS = 3 faster in all 3 repetitions");
    return o;
}

Outcome decoder_progress(const DeskRun& run) {
    Outcome o{10, "decoder progress (20 000 rows, LS = 3)", true, {}};
    auto spec = run.config.decoder;
    spec.latent_size = run.map.latent_size();
    spec.output_dim = run.map.input_dim();
    spec.training.seed = app::stage_seed(run.config, app::Stage::decoder);
    auto untrained = spec;
    untrained.training.epochs = 0;
    const auto before = model::train_decoder(untrained, run.map, run.data.train.records).second;
    o.note("validation MSE: untrained %.5f, trained (%zu epochs) %.5f; reference scale 0.0021 not asserted", before.mse,
           spec.training.epochs, run.decoder_report.mse);
    o.require(run.decoder_report.mse < before.mse, "trained < untrained");
    o.require(run.decoder_report.mse < 0.05, "trained < 0.05");
    return o;
}

Outcome determinism(const DeskRun& run, const std::filesystem::path& csv, const std::filesystem::path& out) {
    Outcome o{11, "determinism of the full pipeline", true, {}};
    app::run_pipeline(app::experiment_from_json(desk_config(csv, out), out));
    const auto a = nn::read_json_file(app::Workspace{run.config.out}.manifest());
    const auto b = nn::read_json_file(app::Workspace{out}.manifest());
    std::size_t same = 0;
    for (const auto& [name, entry] : a.at("artifacts").items()) {
        const bool eq = b.at("artifacts").contains(name) && b.at("artifacts").at(name).at("sha256") == entry.at("sha256");
        same += eq;
        if (!eq) o.note("artifact %s differs", name.c_str());
    }
    o.note("%zu/%zu artifact hashes identical, config hash %s", same, a.at("artifacts").size(),
           a.at("config_sha256") == b.at("config_sha256") ? "identical" : "DIFFERENT");
    o.require(a == b, "identical manifests");
    return o;
}

// ---------------------------------------------------------------- criterion 8

struct FaultRig {
    const DeskRun& run;
    std::vector<data::FeatureVector> records;
    lwtest::TempDir& dir;

    net::ServerConfig server_config(const std::string& tag) const {
        net::ServerConfig c;
        c.expected_fingerprint = run.map.preprocess_fingerprint;
        c.verdict_log_path = dir / (tag + "_verdicts.jsonl");
        c.alert_log_path = dir / (tag + "_alerts.jsonl");
        c.metrics_output_path = dir / (tag + "_metrics.json");
        c.idle_poll = 20ms;
        c.frame_stall = 300ms;
        return c;
    }
    net::ProbeConfig probe_config(std::uint16_t port, std::uint64_t stream) const {
        net::ProbeConfig p;
        p.server_address = "127.0.0.1:" + std::to_string(port);
        p.evaluation_mode = true;
        p.stream_id = stream;
        p.ack_timeout = 300ms;
        p.retry.base = 20ms;
        return p;
    }
};

bool one_verdict_each(const std::filesystem::path& log, std::size_t expected) {
    const auto ids = lwtest::verdict_ids(log);
    return ids.size() == expected && std::set<std::uint64_t>(ids.begin(), ids.end()).size() == expected;
}

Outcome protocol(const DeskRun& run) {
    Outcome o{8, "protocol soundness under fault injection", true, {}};
    lwtest::TempDir dir("accept-proto");
    FaultRig rig{run, std::vector<data::FeatureVector>(run.data.test.records.begin(), run.data.test.records.end()), dir};
    const std::size_t n = rig.records.size();

    // Dropped ACKs on the first delivery of frames 2 and 5.
    auto live = rig.server_config("live");
    std::atomic<int> drops{0};
    std::set<std::uint32_t> dropped;
    std::mutex mu;
    live.hooks.drop_ack = [&](std::uint64_t, std::uint32_t seq) {
        std::lock_guard lock(mu);
        if ((seq == 2 || seq == 5) && dropped.insert(seq).second) {
            ++drops;
            return true;
        }
        return false;
    };
    net::TransferStats stats;
    {
        net::IdsServer server(live, run.forest);
        server.start();
        net::CompressStream stream(run.map, true, net::span_source(rig.records));
        stats = net::send_batches(stream, run.map, rig.probe_config(server.port(), 21));
        server.stop();
    }
    const bool once = one_verdict_each(*live.verdict_log_path, n);
    o.note("dropped ACKs: %d dropped, %zu resends, %zu records, exactly one verdict each: %s", drops.load(), stats.retries, n,
           once ? "yes" : "NO");
    o.require(stats.retries == 2 && once, "dropped ACKs resend without duplicate verdicts");

    // Offline replay of the same stream.
    lwtest::TempDir maps("accept-map");
    model::save_map(run.map, maps / "map.json");
    net::ProbeConfig off;
    off.map_path = maps / "map.json";
    off.output_path = dir / "stream.lwof";
    off.evaluation_mode = true;
    off.stream_id = 21;
    net::run_probe(off, rig.records);
    auto replay = rig.server_config("replay");
    net::replay_offline(dir / "stream.lwof", run.forest, replay);
    const bool identical = lwtest::read_text(*live.verdict_log_path) == lwtest::read_text(*replay.verdict_log_path) &&
                           lwtest::read_text(*live.alert_log_path) == lwtest::read_text(*replay.alert_log_path) &&
                           lwtest::read_text(*live.metrics_output_path) == lwtest::read_text(*replay.metrics_output_path);
    o.note("live vs offline replay verdict/alert/metrics files byte-identical: %s", identical ? "yes" : "NO");
    o.require(identical, "live and replay logs identical");

    // Raw-socket faults against one server.
    auto faults = rig.server_config("faults");
    net::IdsServer server(faults, run.forest);
    server.start();
    const auto port = server.port();
    const net::Hello hello{22, 3, run.map.preprocess_fingerprint, true};
    net::CompressStream stream(run.map, true, net::span_source(std::span(rig.records).first(200)));
    auto b1 = *net::next_batch(stream, 100, 1), b2 = *net::next_batch(stream, 100, 2);
    auto f1 = net::encode_frame(net::MsgType::record_batch, net::encode_batch(b1, 3));
    auto f2 = net::encode_frame(net::MsgType::record_batch, net::encode_batch(b2, 3));
    {
        net::Socket s = net::connect_tcp({"127.0.0.1", port});
        s.send_all(lwtest::hello_frame(hello));
        std::vector<std::uint16_t> acked;
        for (const auto* f : {&f1, &f2, &f1, &f2, &f2}) {
            s.send_all(*f);
            auto reply = net::read_frame(s, 3000ms);
            if (reply && reply->header.type == net::MsgType::ack) acked.push_back(net::decode_ack(reply->payload).accepted);
        }
        const bool acks_ok = acked == std::vector<std::uint16_t>{100, 100, 100, 100, 100};
        o.note("duplicated frames: 5 deliveries of 2 frames, ACK counts %s", acks_ok ? "repeated" : "WRONG");
        o.require(acks_ok, "duplicates are re-acknowledged");
    }
    auto wrong = hello;
    wrong.fingerprint = sha256("another preprocessing model");
    auto bad_version = lwtest::hello_frame(hello);
    bad_version[4] = 2;
    auto truncated = f1;
    truncated.resize(truncated.size() / 2);
    auto miscount = f1;
    miscount[net::kFrameHeaderBytes + 4] = 101;
    const auto r_fp = lwtest::reject_of(lwtest::exchange(port, {lwtest::hello_frame(wrong), f1}));
    const auto r_ver = lwtest::reject_of(lwtest::exchange(port, {bad_version}));
    const auto r_trunc = lwtest::reject_of(lwtest::exchange(port, {lwtest::hello_frame(hello), truncated}));
    const auto r_count = lwtest::reject_of(lwtest::exchange(port, {lwtest::hello_frame(hello), miscount}));
    auto code = [](std::optional<net::RejectCode> c) { return c ? static_cast<int>(*c) : -1; };
    o.note("REJECT codes: wrong fingerprint %d, foreign version %d, truncated frame %d, count mismatch %d", code(r_fp),
           code(r_ver), code(r_trunc), code(r_count));
    o.require(code(r_fp) == 1 && code(r_ver) == 2 && code(r_trunc) == 3 && code(r_count) == 3, "REJECT codes");
    server.stop();
    const bool dedup_once = one_verdict_each(*faults.verdict_log_path, 200);
    o.note("fault server verdict log: exactly one verdict per record_id: %s", dedup_once ? "yes" : "NO");
    o.require(dedup_once, "one verdict per record under duplicates");

    // Soak: 1e5 records cycling the test split with fresh record ids.
    auto soak = rig.server_config("soak");
    soak.dedup_window = 64;
    soak.alert_log_path.reset();
    net::IdsServer soak_server(soak, run.forest);
    soak_server.start();
    const std::size_t total = 100000;
    std::size_t next = 0, rss_warm = 0;
    auto source = [&]() -> std::optional<data::FeatureVector> {
        if (next == total) return std::nullopt;
        if (next == 10000) rss_warm = rss_kib();
        data::FeatureVector v = rig.records[next % n];
        v.record_id = next++;
        return v;
    };
    net::CompressStream soak_stream(run.map, true, source);
    const auto soak_start = Clock::now();
    auto soak_stats = net::send_batches(soak_stream, run.map, rig.probe_config(soak_server.port(), 23));
    const std::size_t rss_end = rss_kib();
    const auto entries = soak_server.engine().dedup_entries(23);
    soak_server.stop();
    const auto counters = soak_server.engine().counters(23);
    const bool soak_once = one_verdict_each(*soak.verdict_log_path, total);
    const long growth = static_cast<long>(rss_end) - static_cast<long>(rss_warm);
    o.note("soak: %zu records in %zu frames, %.1f s, verdicts %llu, one per record_id: %s",
           soak_stats.records_sent, soak_stats.frames_sent, seconds_since(soak_start),
           static_cast<unsigned long long>(counters.verdicts_emitted), soak_once ? "yes" : "NO");
    o.note("soak: dedup entries %zu (window %zu), RSS %zu KiB after 1e4 records, %zu KiB at end (growth %ld KiB)", entries,
           soak.dedup_window, rss_warm, rss_end, growth);
    o.require(soak_once && counters.verdicts_emitted == total, "soak conservation");
    o.require(entries <= soak.dedup_window, "dedup state bounded by the window");
    o.require(growth < 4096, "RSS growth < 4 MiB after warm-up");
    return o;
}

}  // namespace

int main() {
    const auto start = Clock::now();
    std::vector<Outcome> results;
    auto guarded = [&](int id, const char* title, const std::function<Outcome()>& f) {
        progress("criterion " + std::to_string(id));
        try {
            results.push_back(f());
        } catch (const std::exception& e) {
            Outcome o{id, title, false, {std::string("exception: ") + e.what()}};
            results.push_back(o);
        }
    };

    lwtest::TempDir dir("acceptance");
    guarded(1, "gradient correctness", gradients);
    guarded(2, "latent projection and sigmoid conformance", projection_conformance);
    guarded(7, "compression ratio", [&] { return compression_ratio(dir.path()); });
    guarded(9, "hyper-search sanity", search_sanity);

    data::SynthOptions synth;
    synth.rows = 24000;
    synth.seed = 99;
    lwtest::write_text(dir / "synth.csv", data::synth_nsl_kdd_csv(synth));
    std::optional<DeskRun> run;
    try {
        progress("desk-scale pipeline");
        run = desk_pipeline(dir / "synth.csv", dir / "run_a");
    } catch (const std::exception& e) {
        for (int id : {3, 4, 5, 6, 8, 10, 11}) results.push_back({id, "desk-scale pipeline", false, {std::string("pipeline failed: ") + e.what()}});
    }
    if (run) {
        double baseline = 0.0;
        guarded(3, "latent-tap equivalence", [&] { return latent_tap(*run); });
        guarded(4, "random-forest oracle suite", [&] {
            return forest_oracles(run->forest, model::compress_all(run->map, run->data.test.records));
        });
        guarded(5, "desk-scale accuracy direction", [&] { return accuracy_direction(*run, baseline); });
        guarded(6, "training-time direction", [&] { return training_time(*run); });
        guarded(10, "decoder progress", [&] { return decoder_progress(*run); });
        guarded(8, "protocol soundness", [&] { return protocol(*run); });
        guarded(11, "determinism", [&] { return determinism(*run, dir / "synth.csv", dir / "run_b"); });
    }

    std::sort(results.begin(), results.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s criterion %d: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str());
        for (const auto& d : r.details) std::printf("    %s\n", d.c_str());
        failed += !r.pass;
    }
    std::printf("%zu criteria, %d failed, %.1f s\n", results.size(), failed, seconds_since(start));
    return failed ? 1 : 0;
}

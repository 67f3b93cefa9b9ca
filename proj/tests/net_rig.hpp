#pragma once

#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "latentwire/forest/forest.hpp"
#include "latentwire/model/compression_map.hpp"
#include "latentwire/net/probe.hpp"
#include "latentwire/net/server.hpp"
#include "latentwire/net/socket.hpp"
#include "latentwire/net/wire.hpp"
#include "test_util.hpp"

namespace lwtest {

// A random 3 x dim sigmoid map, a small forest trained on its latents and a
// labeled record set, all seeded.
struct NetRig {
    latentwire::model::CompressionMap map;
    latentwire::forest::ForestModel forest;
    std::vector<latentwire::data::FeatureVector> records;

    NetRig(std::size_t n_records, std::size_t dim = 8, std::uint64_t seed = 1, std::size_t trees = 10) {
        using namespace latentwire;
        Rng rng(seed);
        std::uniform_real_distribution<float> u(-1.0f, 1.0f);
        map.projection.weights = nn::Matrix<float>(3, dim);
        for (auto& w : map.projection.weights.values()) w = u(rng);
        map.projection.bias = {u(rng), u(rng), u(rng)};
        map.source_dataset = "rig";
        map.preprocess_fingerprint = sha256("rig-" + std::to_string(seed));
        records = random_vectors(n_records, dim, seed + 1);
        for (auto& r : records) r.label = r.features[0] + r.features[1] > 1.0f;
        auto train = random_vectors(600, dim, seed + 2);
        for (auto& r : train) r.label = r.features[0] + r.features[1] > 1.0f;
        forest::ForestConfig cfg;
        cfg.n_trees = trees;
        cfg.seed = seed;
        forest = forest::train_forest(model::compress_all(map, train), cfg).model;
    }

    latentwire::net::ServerConfig server_config(const TempDir& dir, const std::string& tag) const {
        latentwire::net::ServerConfig c;
        c.expected_fingerprint = map.preprocess_fingerprint;
        c.verdict_log_path = dir / (tag + "_verdicts.jsonl");
        c.alert_log_path = dir / (tag + "_alerts.jsonl");
        c.metrics_output_path = dir / (tag + "_metrics.json");
        c.idle_poll = std::chrono::milliseconds(20);
        c.frame_stall = std::chrono::milliseconds(300);
        return c;
    }

    latentwire::net::ProbeConfig probe_config(std::uint16_t port, std::uint64_t stream_id = 1) const {
        latentwire::net::ProbeConfig p;
        p.server_address = "127.0.0.1:" + std::to_string(port);
        p.evaluation_mode = true;
        p.stream_id = stream_id;
        p.ack_timeout = std::chrono::milliseconds(300);
        p.retry.base = std::chrono::milliseconds(20);
        return p;
    }
};

// Sends raw bytes after connecting and returns the first frame the server
// answers with, if any.
inline std::optional<latentwire::net::Frame> exchange(std::uint16_t port, const std::vector<std::vector<std::uint8_t>>& chunks) {
    using namespace latentwire::net;
    Socket s = connect_tcp({"127.0.0.1", port});
    for (const auto& c : chunks) s.send_all(c);
    try {
        return read_frame(s, std::chrono::milliseconds(3000));
    } catch (const latentwire::Error&) {
        return std::nullopt;
    }
}

inline std::optional<latentwire::net::RejectCode> reject_of(const std::optional<latentwire::net::Frame>& f) {
    if (!f || f->header.type != latentwire::net::MsgType::reject) return std::nullopt;
    return latentwire::net::decode_reject(f->payload);
}

inline std::vector<std::uint8_t> hello_frame(const latentwire::net::Hello& h) {
    return latentwire::net::encode_frame(latentwire::net::MsgType::hello, latentwire::net::encode_hello(h));
}

inline std::multiset<std::uint64_t> verdict_ids(const std::filesystem::path& log) {
    std::multiset<std::uint64_t> ids;
    std::istringstream in(read_text(log));
    for (std::string line; std::getline(in, line);) ids.insert(nlohmann::json::parse(line).at("record_id").get<std::uint64_t>());
    return ids;
}

inline std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

}  // namespace lwtest

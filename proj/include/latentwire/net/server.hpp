#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentwire/forest/forest.hpp"
#include "latentwire/net/socket.hpp"
#include "latentwire/net/wire.hpp"

namespace latentwire::net {

struct Verdict {
    std::uint64_t stream_id = 0;
    std::uint64_t record_id = 0;
    std::uint8_t predicted = 0;
    double vote_fraction = 0.0;

    bool operator==(const Verdict&) const = default;
};

std::vector<Verdict> classify_batch(const forest::ForestModel& forest, std::span<const CompressedRecord> records,
                                    std::uint64_t stream_id = 0);
// One verdict-log line without the trailing newline.
std::string verdict_line(const Verdict& v);

struct ServerHooks {
    // Return true to withhold the ACK for this delivery of a frame.
    std::function<bool(std::uint64_t stream_id, std::uint32_t frame_seq)> drop_ack;
};

struct ServerConfig {
    std::string listen_address = "127.0.0.1:0";
    std::filesystem::path forest_path;
    std::optional<Sha256Digest> expected_fingerprint;
    std::optional<std::filesystem::path> verdict_log_path;
    std::optional<std::filesystem::path> alert_log_path;
    std::optional<std::filesystem::path> metrics_output_path;
    std::size_t dedup_window = 1024;
    std::chrono::milliseconds idle_poll{100};
    std::chrono::milliseconds frame_stall{2000};
    ServerHooks hooks;

    void validate() const;
};

// The last `window` frame sequence numbers of one stream with the accepted
// count sent in their ACK.
class DedupRing {
public:
    explicit DedupRing(std::size_t window) : window_(window) {}
    std::optional<std::uint16_t> find(std::uint32_t frame_seq) const;
    void insert(std::uint32_t frame_seq, std::uint16_t accepted);
    std::size_t size() const noexcept { return order_.size(); }

private:
    std::size_t window_;
    std::deque<std::uint32_t> order_;
    std::unordered_map<std::uint32_t, std::uint16_t> accepted_;
};

struct StreamCounters {
    std::uint64_t records_received = 0;
    std::uint64_t verdicts_emitted = 0;
    std::uint64_t rejected_malformed = 0;
    std::uint64_t frames_accepted = 0;
    std::uint64_t duplicate_frames = 0;
};

struct MetricsOutcome {
    std::optional<forest::MetricsReport> report;
    std::uint64_t labeled = 0;
    std::uint64_t unlabeled = 0;
    std::string reason;

    nlohmann::json to_json() const;
};

// Handshake checks, dedup, classification and logging shared by the live
// server and offline replay. Thread-safe; log lines are written under one
// lock so they never interleave.
class VerdictEngine {
public:
    VerdictEngine(const forest::ForestModel& forest, const ServerConfig& config);

    std::optional<RejectCode> admit(const Hello& hello) const;
    // ACK accepted count. Frames already inside the dedup window are not
    // classified again and return their original count.
    std::uint16_t accept_batch(const Hello& hello, const RecordBatch& batch);
    void note_malformed(std::uint64_t stream_id, std::size_t declared_records);

    StreamCounters counters(std::uint64_t stream_id) const;
    std::size_t dedup_entries(std::uint64_t stream_id) const;
    MetricsOutcome metrics() const;
    void flush();

private:
    struct StreamState {
        DedupRing ring;
        StreamCounters counters;
    };
    StreamState& state(std::uint64_t stream_id);

    const forest::ForestModel& forest_;
    const ServerConfig& config_;
    mutable std::mutex mu_;
    std::map<std::uint64_t, StreamState> streams_;
    std::ofstream verdicts_;
    std::ofstream alerts_;
    forest::ConfusionCounts counts_;
    std::uint64_t labeled_ = 0;
    std::uint64_t unlabeled_ = 0;
};

void write_metrics(const std::filesystem::path& path, const MetricsOutcome& outcome);

class IdsServer {
public:
    IdsServer(ServerConfig config, forest::ForestModel forest);
    ~IdsServer();
    IdsServer(const IdsServer&) = delete;
    IdsServer& operator=(const IdsServer&) = delete;

    void start();
    std::uint16_t port() const noexcept { return port_; }
    // Stops accepting, lets open connections finish the frame in hand,
    // joins every handler and writes the metrics file.
    void stop();
    bool running() const noexcept { return running_; }

    VerdictEngine& engine() noexcept { return *engine_; }
    MetricsOutcome finalize_metrics();

private:
    void accept_loop();
    void handle(Socket sock);

    ServerConfig config_;
    forest::ForestModel forest_;
    std::unique_ptr<VerdictEngine> engine_;
    std::unique_ptr<Listener> listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{false};
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex threads_mu_;
    struct Handler {
        std::thread thread;
        std::shared_ptr<std::atomic<bool>> done;
    };
    std::vector<Handler> handlers_;
};

// Feeds an offline transfer file through a fresh engine: same checks, same
// logs, same metrics as a live stream.
MetricsOutcome replay_offline(const std::filesystem::path& file, const forest::ForestModel& forest,
                              const ServerConfig& config);

}  // namespace latentwire::net

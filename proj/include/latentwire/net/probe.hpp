#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "latentwire/data/records.hpp"
#include "latentwire/model/compression_map.hpp"
#include "latentwire/net/wire.hpp"

namespace latentwire::net {

struct RetryPolicy {
    std::chrono::milliseconds base{100};
    double factor = 2.0;
    std::chrono::milliseconds cap{5000};
    std::size_t max_retries = 5;

    std::chrono::milliseconds delay(std::size_t attempt) const;
};

struct ProbeConfig {
    std::filesystem::path map_path;
    std::optional<std::string> server_address;
    std::optional<std::filesystem::path> output_path;
    std::size_t batch_size = 128;
    bool evaluation_mode = false;
    std::uint64_t stream_id = 1;
    RetryPolicy retry;
    std::chrono::milliseconds ack_timeout{2000};

    void validate() const;
};

struct CompressStats {
    std::size_t records_in = 0;
    std::size_t records_out = 0;
    std::size_t dimension_errors = 0;
};

// Pull-based compression stage: each next() reads at most one upstream
// record, so a slow consumer stalls the reader.
class CompressStream {
public:
    using Source = std::function<std::optional<data::FeatureVector>()>;
    using Clock = std::function<std::uint64_t()>;

    CompressStream(const model::CompressionMap& map, bool evaluation_mode, Source source, Clock clock = {});

    std::optional<CompressedRecord> next();
    const CompressStats& stats() const noexcept { return stats_; }

private:
    const model::CompressionMap& map_;
    bool evaluation_mode_;
    Source source_;
    Clock clock_;
    std::uint64_t last_timestamp_ = 0;
    CompressStats stats_;
};

CompressStream::Source span_source(std::span<const data::FeatureVector> records);
std::uint64_t unix_micros();

// Drains the stream into frames of at most `batch_size` records.
std::optional<RecordBatch> next_batch(CompressStream& stream, std::size_t batch_size, std::uint32_t frame_seq);

struct TransferStats {
    std::size_t records_sent = 0;
    std::size_t frames_sent = 0;
    std::uint64_t bytes_on_wire = 0;
    std::size_t retries = 0;
    std::size_t reconnects = 0;
    CompressStats compression;
};

Hello hello_for(const model::CompressionMap& map, const ProbeConfig& config);

// At-least-once delivery: each frame is resent until its ACK arrives. ACK
// timeouts resend on the open connection; connection failures reconnect
// with exponential backoff and repeat the HELLO. A REJECT is fatal.
TransferStats send_batches(CompressStream& stream, const model::CompressionMap& map, const ProbeConfig& config);

TransferStats write_offline(CompressStream& stream, const model::CompressionMap& map, const ProbeConfig& config);

TransferStats run_probe(const ProbeConfig& config, std::span<const data::FeatureVector> records);

}  // namespace latentwire::net

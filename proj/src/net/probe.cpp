#include "latentwire/net/probe.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "latentwire/net/socket.hpp"

namespace latentwire::net {

std::chrono::milliseconds RetryPolicy::delay(std::size_t attempt) const {
    const double ms = static_cast<double>(base.count()) * std::pow(factor, static_cast<double>(attempt));
    return std::chrono::milliseconds(static_cast<long long>(std::min(ms, static_cast<double>(cap.count()))));
}

void ProbeConfig::validate() const {
    if (server_address.has_value() == output_path.has_value()) {
        throw ConfigError("probe", "exactly one of --server and --out must be given");
    }
    if (batch_size == 0 || batch_size > 0xFFFF) throw ConfigError("probe.batch", "must lie in [1, 65535]");
    if (server_address) parse_endpoint(*server_address);
}

std::uint64_t unix_micros() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

CompressStream::CompressStream(const model::CompressionMap& map, bool evaluation_mode, Source source, Clock clock)
    : map_(map), evaluation_mode_(evaluation_mode), source_(std::move(source)), clock_(clock ? std::move(clock) : Clock(unix_micros)) {}

std::optional<CompressedRecord> CompressStream::next() {
    while (auto fv = source_()) {
        ++stats_.records_in;
        if (fv->features.size() != map_.input_dim()) {
            ++stats_.dimension_errors;
            continue;
        }
        CompressedRecord rec;
        rec.record_id = fv->record_id;
        rec.latent = model::compress(map_, fv->features);
        rec.truth_label = evaluation_mode_ ? fv->label : kUnlabeled;
        last_timestamp_ = std::max(last_timestamp_, clock_());
        rec.timestamp_micros = last_timestamp_;
        ++stats_.records_out;
        return rec;
    }
    return std::nullopt;
}

CompressStream::Source span_source(std::span<const data::FeatureVector> records) {
    return [records, i = std::size_t{0}]() mutable -> std::optional<data::FeatureVector> {
        if (i >= records.size()) return std::nullopt;
        return records[i++];
    };
}

std::optional<RecordBatch> next_batch(CompressStream& stream, std::size_t batch_size, std::uint32_t frame_seq) {
    RecordBatch batch;
    batch.frame_seq = frame_seq;
    while (batch.records.size() < batch_size) {
        auto rec = stream.next();
        if (!rec) break;
        batch.records.push_back(std::move(*rec));
    }
    if (batch.records.empty()) return std::nullopt;
    return batch;
}

Hello hello_for(const model::CompressionMap& map, const ProbeConfig& config) {
    Hello h;
    h.stream_id = config.stream_id;
    h.latent_size = static_cast<std::uint16_t>(map.latent_size());
    h.fingerprint = map.preprocess_fingerprint;
    h.evaluation_mode = config.evaluation_mode;
    return h;
}

namespace {

class Session {
public:
    Session(const Endpoint& ep, const Hello& hello, const ProbeConfig& config, TransferStats& stats)
        : ep_(ep), hello_(encode_frame(MsgType::hello, encode_hello(hello))), config_(config), stats_(stats) {}

    // Sends one frame and blocks until its ACK.
    void deliver(const std::vector<std::uint8_t>& frame, std::uint32_t frame_seq) {
        std::size_t failures = 0;
        for (;;) {
            try {
                if (!sock_.valid()) open();
                sock_.send_all(frame);
                stats_.bytes_on_wire += frame.size();
                if (await_ack(frame_seq)) return;
            } catch (const NetworkError&) {
                sock_.close();
                if (failures >= config_.retry.max_retries) throw;
                std::this_thread::sleep_for(config_.retry.delay(failures));
                ++stats_.reconnects;
            }
            if (++failures > config_.retry.max_retries) {
                throw NetworkError("frame " + std::to_string(frame_seq) + " unacknowledged after " +
                                   std::to_string(config_.retry.max_retries) + " retries");
            }
            ++stats_.retries;
        }
    }

private:
    void open() {
        sock_ = connect_tcp(ep_);
        sock_.send_all(hello_);
        stats_.bytes_on_wire += hello_.size();
    }

    bool await_ack(std::uint32_t frame_seq) {
        const auto deadline = std::chrono::steady_clock::now() + config_.ack_timeout;
        for (;;) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) return false;
            auto f = read_frame(sock_, left);
            if (!f) return false;
            if (f->header.type == MsgType::reject) {
                const auto code = decode_reject(f->payload);
                throw ProtocolError(static_cast<std::uint8_t>(code),
                                    "server rejected the stream (code " + std::to_string(static_cast<int>(code)) + ")");
            }
            if (f->header.type != MsgType::ack) continue;
            if (decode_ack(f->payload).frame_seq == frame_seq) return true;
        }
    }

    Endpoint ep_;
    std::vector<std::uint8_t> hello_;
    const ProbeConfig& config_;
    TransferStats& stats_;
    Socket sock_;
};

}  // namespace

TransferStats send_batches(CompressStream& stream, const model::CompressionMap& map, const ProbeConfig& config) {
    TransferStats stats;
    const Endpoint ep = parse_endpoint(config.server_address.value());
    Session session(ep, hello_for(map, config), config, stats);
    std::uint32_t seq = 1;
    while (auto batch = next_batch(stream, config.batch_size, seq)) {
        const auto frame = encode_frame(MsgType::record_batch, encode_batch(*batch, map.latent_size()));
        session.deliver(frame, seq);
        stats.records_sent += batch->records.size();
        ++stats.frames_sent;
        ++seq;
    }
    stats.compression = stream.stats();
    return stats;
}

TransferStats write_offline(CompressStream& stream, const model::CompressionMap& map, const ProbeConfig& config) {
    TransferStats stats;
    OfflineWriter writer(config.output_path.value(), hello_for(map, config));
    std::uint32_t seq = 1;
    while (auto batch = next_batch(stream, config.batch_size, seq++)) {
        writer.write(*batch);
        stats.records_sent += batch->records.size();
        ++stats.frames_sent;
    }
    writer.close();
    stats.bytes_on_wire = writer.bytes_written();
    stats.compression = stream.stats();
    return stats;
}

TransferStats run_probe(const ProbeConfig& config, std::span<const data::FeatureVector> records) {
    config.validate();
    const auto map = model::load_map(config.map_path);
    CompressStream stream(map, config.evaluation_mode, span_source(records));
    return config.server_address ? send_batches(stream, map, config) : write_offline(stream, map, config);
}

}  // namespace latentwire::net

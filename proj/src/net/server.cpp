#include "latentwire/net/server.hpp"

#include <sys/socket.h>

#include <nlohmann/json.hpp>

#include "latentwire/nn/serialize.hpp"

namespace latentwire::net {

std::vector<Verdict> classify_batch(const forest::ForestModel& forest, std::span<const CompressedRecord> records,
                                    std::uint64_t stream_id) {
    std::vector<Verdict> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        const double v = forest::vote_fraction(forest, r.latent);
        out.push_back({stream_id, r.record_id, static_cast<std::uint8_t>(v >= 0.5 ? 1 : 0), v});
    }
    return out;
}

std::string verdict_line(const Verdict& v) {
    nlohmann::ordered_json j;
    j["stream_id"] = v.stream_id;
    j["record_id"] = v.record_id;
    j["predicted"] = v.predicted;
    j["vote_fraction"] = v.vote_fraction;
    return j.dump();
}

void ServerConfig::validate() const {
    if (dedup_window == 0) throw ConfigError("server.dedup_window", "must be positive");
    parse_endpoint(listen_address);
}

std::optional<std::uint16_t> DedupRing::find(std::uint32_t frame_seq) const {
    auto it = accepted_.find(frame_seq);
    if (it == accepted_.end()) return std::nullopt;
    return it->second;
}

void DedupRing::insert(std::uint32_t frame_seq, std::uint16_t accepted) {
    if (accepted_.emplace(frame_seq, accepted).second) order_.push_back(frame_seq);
    while (order_.size() > window_) {
        accepted_.erase(order_.front());
        order_.pop_front();
    }
}

nlohmann::json MetricsOutcome::to_json() const {
    nlohmann::json j;
    j["labeled_records"] = labeled;
    j["unlabeled_records"] = unlabeled;
    if (report) {
        j["status"] = "ok";
        j["report"] = forest::metrics_to_json(*report);
    } else {
        j["status"] = "absent";
        j["reason"] = reason;
    }
    return j;
}

namespace {

std::ofstream open_log(const std::optional<std::filesystem::path>& path) {
    std::ofstream out;
    if (path) {
        out.open(*path, std::ios::binary | std::ios::trunc);
        if (!out) throw LoadError(LoadFailure::io, "cannot write " + path->string());
    }
    return out;
}

}  // namespace

VerdictEngine::VerdictEngine(const forest::ForestModel& forest, const ServerConfig& config)
    : forest_(forest), config_(config), verdicts_(open_log(config.verdict_log_path)), alerts_(open_log(config.alert_log_path)) {}

std::optional<RejectCode> VerdictEngine::admit(const Hello& hello) const {
    if (config_.expected_fingerprint && hello.fingerprint != *config_.expected_fingerprint) {
        return RejectCode::fingerprint_mismatch;
    }
    if (hello.latent_size != forest_.n_features) return RejectCode::malformed;
    return std::nullopt;
}

VerdictEngine::StreamState& VerdictEngine::state(std::uint64_t stream_id) {
    auto it = streams_.find(stream_id);
    if (it == streams_.end()) it = streams_.emplace(stream_id, StreamState{DedupRing(config_.dedup_window), {}}).first;
    return it->second;
}

std::uint16_t VerdictEngine::accept_batch(const Hello& hello, const RecordBatch& batch) {
    {
        std::lock_guard lock(mu_);
        auto& s = state(hello.stream_id);
        if (auto seen = s.ring.find(batch.frame_seq)) {
            ++s.counters.duplicate_frames;
            return *seen;
        }
    }
    // Classification runs outside the lock; verdicts are pure.
    const auto verdicts = classify_batch(forest_, batch.records, hello.stream_id);
    std::lock_guard lock(mu_);
    auto& s = state(hello.stream_id);
    if (auto seen = s.ring.find(batch.frame_seq)) {
        ++s.counters.duplicate_frames;
        return *seen;
    }
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const auto& v = verdicts[i];
        if (verdicts_.is_open() || (alerts_.is_open() && v.predicted)) {
            const std::string line = verdict_line(v);
            if (verdicts_.is_open()) verdicts_ << line << '\n';
            if (alerts_.is_open() && v.predicted) alerts_ << line << '\n';
        }
        const auto truth = batch.records[i].truth_label;
        if (truth == kUnlabeled) {
            ++unlabeled_;
        } else {
            ++labeled_;
            counts_.add(v.predicted, truth);
        }
    }
    const auto accepted = static_cast<std::uint16_t>(verdicts.size());
    s.ring.insert(batch.frame_seq, accepted);
    s.counters.records_received += batch.records.size();
    s.counters.verdicts_emitted += verdicts.size();
    ++s.counters.frames_accepted;
    return accepted;
}

void VerdictEngine::note_malformed(std::uint64_t stream_id, std::size_t declared_records) {
    std::lock_guard lock(mu_);
    auto& c = state(stream_id).counters;
    c.records_received += declared_records;
    c.rejected_malformed += declared_records;
}

StreamCounters VerdictEngine::counters(std::uint64_t stream_id) const {
    std::lock_guard lock(mu_);
    auto it = streams_.find(stream_id);
    return it == streams_.end() ? StreamCounters{} : it->second.counters;
}

std::size_t VerdictEngine::dedup_entries(std::uint64_t stream_id) const {
    std::lock_guard lock(mu_);
    auto it = streams_.find(stream_id);
    return it == streams_.end() ? 0 : it->second.ring.size();
}

MetricsOutcome VerdictEngine::metrics() const {
    std::lock_guard lock(mu_);
    MetricsOutcome m;
    m.labeled = labeled_;
    m.unlabeled = unlabeled_;
    if (labeled_ == 0) m.reason = "no labeled records";
    else m.report = forest::metrics_from_counts(counts_);
    return m;
}

void VerdictEngine::flush() {
    std::lock_guard lock(mu_);
    if (verdicts_.is_open()) verdicts_.flush();
    if (alerts_.is_open()) alerts_.flush();
}

void write_metrics(const std::filesystem::path& path, const MetricsOutcome& outcome) {
    nn::write_json_file(path, outcome.to_json());
}

IdsServer::IdsServer(ServerConfig config, forest::ForestModel forest)
    : config_(std::move(config)), forest_(std::move(forest)) {
    config_.validate();
    engine_ = std::make_unique<VerdictEngine>(forest_, config_);
}

IdsServer::~IdsServer() {
    try {
        stop();
    } catch (...) {
    }
}

void IdsServer::start() {
    if (running_) return;
    listener_ = std::make_unique<Listener>(parse_endpoint(config_.listen_address));
    port_ = listener_->port();
    stopping_ = false;
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void IdsServer::accept_loop() {
    while (!stopping_) {
        Socket s = listener_->accept(config_.idle_poll);
        if (!s.valid()) continue;
        std::lock_guard lock(threads_mu_);
        // Join finished connections so a long-lived server does not accumulate threads.
        std::erase_if(handlers_, [](Handler& h) {
            if (!h.done->load()) return false;
            h.thread.join();
            return true;
        });
        auto done = std::make_shared<std::atomic<bool>>(false);
        handlers_.push_back({std::thread([this, done, sock = std::move(s)]() mutable {
                                 handle(std::move(sock));
                                 done->store(true);
                             }),
                             done});
    }
}

namespace {

// Half-close and drain so the peer reads the REJECT before any reset.
void reject_and_close(Socket& sock, RejectCode code) {
    try {
        send_frame(sock, MsgType::reject, encode_reject(code));
        ::shutdown(sock.fd(), SHUT_WR);
        std::array<std::uint8_t, 4096> sink{};
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(500);
        while (std::chrono::steady_clock::now() < deadline) {
            if (!sock.recv_exact(std::span<std::uint8_t>(sink).first(1), std::chrono::milliseconds(100))) continue;
        }
    } catch (const Error&) {
    }
    sock.close();
}

}  // namespace

void IdsServer::handle(Socket sock) {
    std::optional<Hello> hello;
    try {
        while (!stopping_) {
            auto frame = read_frame(sock, config_.idle_poll, config_.frame_stall);
            if (!frame) continue;
            if (!hello) {
                if (frame->header.type != MsgType::hello) {
                    reject_and_close(sock, RejectCode::malformed);
                    return;
                }
                Hello h = decode_hello(frame->payload);
                if (auto code = engine_->admit(h)) {
                    reject_and_close(sock, *code);
                    return;
                }
                hello = h;
                continue;
            }
            if (frame->header.type != MsgType::record_batch) {
                reject_and_close(sock, RejectCode::malformed);
                return;
            }
            RecordBatch batch;
            try {
                batch = decode_batch(frame->payload, hello->latent_size);
            } catch (const ProtocolError&) {
                engine_->note_malformed(hello->stream_id, declared_count(frame->payload));
                throw;
            }
            const auto accepted = engine_->accept_batch(*hello, batch);
            if (config_.hooks.drop_ack && config_.hooks.drop_ack(hello->stream_id, batch.frame_seq)) continue;
            send_frame(sock, MsgType::ack, encode_ack({batch.frame_seq, accepted}));
        }
    } catch (const ProtocolError& e) {
        reject_and_close(sock, static_cast<RejectCode>(e.reject_code()));
    } catch (const Error&) {
        // Peer went away or sent something unusable; the stream just ends.
    }
    engine_->flush();
}

void IdsServer::stop() {
    if (!running_) return;
    stopping_ = true;
    if (acceptor_.joinable()) acceptor_.join();
    listener_->close();
    std::vector<Handler> handlers;
    {
        std::lock_guard lock(threads_mu_);
        handlers.swap(handlers_);
    }
    for (auto& h : handlers) h.thread.join();
    engine_->flush();
    running_ = false;
    finalize_metrics();
}

MetricsOutcome IdsServer::finalize_metrics() {
    auto m = engine_->metrics();
    if (config_.metrics_output_path) write_metrics(*config_.metrics_output_path, m);
    return m;
}

MetricsOutcome replay_offline(const std::filesystem::path& file, const forest::ForestModel& forest,
                              const ServerConfig& config) {
    const auto stream = read_offline(file);
    VerdictEngine engine(forest, config);
    MetricsOutcome m;
    if (auto code = engine.admit(stream.hello)) {
        m.reason = "stream rejected with code " + std::to_string(static_cast<int>(*code));
    } else {
        for (const auto& b : stream.batches) engine.accept_batch(stream.hello, b);
        engine.flush();
        m = engine.metrics();
    }
    if (config.metrics_output_path) write_metrics(*config.metrics_output_path, m);
    return m;
}

}  // namespace latentwire::net

#include "latentwire/net/wire.hpp"

#include <algorithm>
#include <cstring>
#include <iterator>

#include "latentwire/bytes.hpp"

namespace latentwire::net {

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw ProtocolError(static_cast<std::uint8_t>(RejectCode::malformed), what);
}

bool known_type(std::uint8_t t) { return t >= 0x01 && t <= 0x04; }

}  // namespace

std::vector<std::uint8_t> encode_frame(MsgType type, std::span<const std::uint8_t> payload) {
    if (payload.size() > kMaxPayloadBytes) malformed("frame payload exceeds the size limit");
    ByteWriter w;
    w.put_bytes(kFrameMagic);
    w.put<std::uint8_t>(kProtocolVersion);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(type));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(payload.size()));
    w.put_bytes(payload);
    return std::move(w.bytes());
}

FrameHeader decode_frame_header(std::span<const std::uint8_t> header) {
    if (header.size() != kFrameHeaderBytes) malformed("frame header truncated");
    if (!std::equal(kFrameMagic.begin(), kFrameMagic.end(), header.begin())) malformed("bad frame magic");
    ByteReader r(header.subspan(4));
    FrameHeader h;
    h.version = r.get<std::uint8_t>();
    const auto type = r.get<std::uint8_t>();
    h.payload_len = r.get<std::uint32_t>();
    if (h.version != kProtocolVersion) {
        throw ProtocolError(static_cast<std::uint8_t>(RejectCode::version),
                            "unsupported protocol version " + std::to_string(h.version));
    }
    if (!known_type(type)) malformed("unknown message type " + std::to_string(type));
    if (h.payload_len > kMaxPayloadBytes) malformed("frame payload exceeds the size limit");
    h.type = static_cast<MsgType>(type);
    return h;
}

std::vector<std::uint8_t> encode_hello(const Hello& hello) {
    ByteWriter w;
    w.put<std::uint64_t>(hello.stream_id);
    w.put<std::uint16_t>(hello.latent_size);
    w.put_bytes(hello.fingerprint);
    w.put<std::uint8_t>(hello.evaluation_mode ? 1 : 0);
    return std::move(w.bytes());
}

Hello decode_hello(std::span<const std::uint8_t> payload) {
    if (payload.size() != kHelloPayloadBytes) malformed("HELLO payload has the wrong length");
    ByteReader r(payload);
    Hello h;
    h.stream_id = r.get<std::uint64_t>();
    h.latent_size = r.get<std::uint16_t>();
    auto fp = r.get_bytes(32);
    std::copy(fp.begin(), fp.end(), h.fingerprint.begin());
    const auto mode = r.get<std::uint8_t>();
    if (mode > 1) malformed("HELLO evaluation_mode must be 0 or 1");
    if (h.latent_size == 0) malformed("HELLO latent_size is zero");
    h.evaluation_mode = mode == 1;
    return h;
}

void append_batch(std::vector<std::uint8_t>& out, const RecordBatch& batch, std::size_t latent_size) {
    if (batch.records.size() > 0xFFFF) malformed("a batch holds at most 65535 records");
    ByteWriter w;
    w.put<std::uint32_t>(batch.frame_seq);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(batch.records.size()));
    for (const auto& rec : batch.records) {
        if (rec.latent.size() != latent_size) throw ShapeError("record latent width differs from the stream latent_size");
        w.put<std::uint64_t>(rec.record_id);
        w.put<std::uint64_t>(rec.timestamp_micros);
        w.put<std::uint8_t>(rec.truth_label);
        for (float v : rec.latent) w.put<float>(v);
    }
    out.insert(out.end(), w.bytes().begin(), w.bytes().end());
}

std::vector<std::uint8_t> encode_batch(const RecordBatch& batch, std::size_t latent_size) {
    std::vector<std::uint8_t> out;
    out.reserve(kBatchHeaderBytes + batch.records.size() * record_wire_bytes(latent_size));
    append_batch(out, batch, latent_size);
    return out;
}

namespace {

RecordBatch read_batch(ByteReader& r, std::size_t latent_size) {
    RecordBatch b;
    b.frame_seq = r.get<std::uint32_t>();
    const auto count = r.get<std::uint16_t>();
    if (!r.ok()) malformed("RECORD_BATCH header truncated");
    if (r.remaining() < count * record_wire_bytes(latent_size)) malformed("RECORD_BATCH payload truncated");
    b.records.resize(count);
    for (auto& rec : b.records) {
        rec.record_id = r.get<std::uint64_t>();
        rec.timestamp_micros = r.get<std::uint64_t>();
        rec.truth_label = r.get<std::uint8_t>();
        if (rec.truth_label > 1 && rec.truth_label != kUnlabeled) malformed("truth_label must be 0, 1 or 0xFF");
        rec.latent.resize(latent_size);
        for (auto& v : rec.latent) v = r.get<float>();
    }
    return b;
}

}  // namespace

RecordBatch decode_batch(std::span<const std::uint8_t> payload, std::size_t latent_size) {
    ByteReader r(payload);
    RecordBatch b = read_batch(r, latent_size);
    if (r.remaining() != 0) malformed("RECORD_BATCH payload has trailing bytes");
    return b;
}

std::size_t declared_count(std::span<const std::uint8_t> payload) noexcept {
    if (payload.size() < kBatchHeaderBytes) return 0;
    std::uint16_t count;
    std::memcpy(&count, payload.data() + 4, sizeof count);
    return count;
}

std::vector<std::uint8_t> encode_ack(const Ack& ack) {
    ByteWriter w;
    w.put<std::uint32_t>(ack.frame_seq);
    w.put<std::uint16_t>(ack.accepted);
    return std::move(w.bytes());
}

Ack decode_ack(std::span<const std::uint8_t> payload) {
    if (payload.size() != 6) malformed("ACK payload has the wrong length");
    ByteReader r(payload);
    Ack a;
    a.frame_seq = r.get<std::uint32_t>();
    a.accepted = r.get<std::uint16_t>();
    return a;
}

std::vector<std::uint8_t> encode_reject(RejectCode code) { return {static_cast<std::uint8_t>(code)}; }

RejectCode decode_reject(std::span<const std::uint8_t> payload) {
    if (payload.size() != 1 || payload[0] < 1 || payload[0] > 3) malformed("REJECT payload is invalid");
    return static_cast<RejectCode>(payload[0]);
}

OfflineWriter::OfflineWriter(const std::filesystem::path& path, const Hello& hello)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), latent_size_(hello.latent_size) {
    if (!out_) throw LoadError(LoadFailure::io, "cannot write " + path.string());
    ByteWriter w;
    w.put_bytes(kOfflineMagic);
    w.put<std::uint16_t>(kOfflineVersion);
    w.put_bytes(encode_hello(hello));
    out_.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.size()));
    bytes_ += w.size();
}

void OfflineWriter::write(const RecordBatch& batch) {
    const auto payload = encode_batch(batch, latent_size_);
    out_.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    bytes_ += payload.size();
}

void OfflineWriter::close() {
    out_.close();
    if (out_.fail()) throw LoadError(LoadFailure::io, "failed writing " + path_.string());
}

OfflineStream decode_offline(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 6 + kHelloPayloadBytes || !std::equal(kOfflineMagic.begin(), kOfflineMagic.end(), bytes.begin())) {
        throw LoadError(LoadFailure::corrupt_payload, "not an offline transfer file");
    }
    ByteReader r(bytes.subspan(4));
    if (r.get<std::uint16_t>() != kOfflineVersion) throw LoadError(LoadFailure::version, "unsupported offline file version");
    OfflineStream s;
    try {
        s.hello = decode_hello(r.get_bytes(kHelloPayloadBytes));
        while (r.remaining() > 0) s.batches.push_back(read_batch(r, s.hello.latent_size));
    } catch (const ProtocolError& e) {
        throw LoadError(LoadFailure::corrupt_payload, std::string("offline file: ") + e.what());
    }
    return s;
}

OfflineStream read_offline(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(LoadFailure::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_offline(bytes);
}

}  // namespace latentwire::net

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include "latentwire/codec.hpp"
#include "latentwire/errors.hpp"

namespace latentwire::net {

inline constexpr std::array<std::uint8_t, 4> kFrameMagic{'L', 'W', 'I', 'R'};
inline constexpr std::array<std::uint8_t, 4> kOfflineMagic{'L', 'W', 'O', 'F'};
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::uint16_t kOfflineVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 4 + 1 + 1 + 4;
inline constexpr std::size_t kHelloPayloadBytes = 8 + 2 + 32 + 1;
inline constexpr std::size_t kBatchHeaderBytes = 4 + 2;
inline constexpr std::uint32_t kMaxPayloadBytes = 16u << 20;
inline constexpr std::uint8_t kUnlabeled = 0xFF;

enum class MsgType : std::uint8_t { hello = 0x01, record_batch = 0x02, ack = 0x03, reject = 0x04 };

enum class RejectCode : std::uint8_t { fingerprint_mismatch = 1, version = 2, malformed = 3 };

constexpr std::size_t record_wire_bytes(std::size_t latent_size) noexcept { return 8 + 8 + 1 + 4 * latent_size; }

struct Hello {
    std::uint64_t stream_id = 0;
    std::uint16_t latent_size = 0;
    Sha256Digest fingerprint{};
    bool evaluation_mode = false;

    bool operator==(const Hello&) const = default;
};

struct CompressedRecord {
    std::uint64_t record_id = 0;
    std::uint64_t timestamp_micros = 0;
    std::vector<float> latent;
    std::uint8_t truth_label = kUnlabeled;

    bool operator==(const CompressedRecord&) const = default;
};

struct RecordBatch {
    std::uint32_t frame_seq = 0;
    std::vector<CompressedRecord> records;
};

struct Ack {
    std::uint32_t frame_seq = 0;
    std::uint16_t accepted = 0;
};

struct FrameHeader {
    std::uint8_t version = kProtocolVersion;
    MsgType type = MsgType::hello;
    std::uint32_t payload_len = 0;
};

struct Frame {
    FrameHeader header;
    std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_frame(MsgType type, std::span<const std::uint8_t> payload);
// Throws ProtocolError: code 3 for bad magic, unknown type or oversize
// payload; code 2 for a foreign version.
FrameHeader decode_frame_header(std::span<const std::uint8_t> header);

std::vector<std::uint8_t> encode_hello(const Hello& hello);
Hello decode_hello(std::span<const std::uint8_t> payload);

void append_batch(std::vector<std::uint8_t>& out, const RecordBatch& batch, std::size_t latent_size);
std::vector<std::uint8_t> encode_batch(const RecordBatch& batch, std::size_t latent_size);
// The payload must hold exactly one batch.
RecordBatch decode_batch(std::span<const std::uint8_t> payload, std::size_t latent_size);
// Records declared by a batch payload, read from its header only.
std::size_t declared_count(std::span<const std::uint8_t> payload) noexcept;

std::vector<std::uint8_t> encode_ack(const Ack& ack);
Ack decode_ack(std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> encode_reject(RejectCode code);
RejectCode decode_reject(std::span<const std::uint8_t> payload);

// Offline transfer file: LWOF magic, u16 version, HELLO payload, then
// RECORD_BATCH payloads back to back.
struct OfflineStream {
    Hello hello;
    std::vector<RecordBatch> batches;
};

class OfflineWriter {
public:
    OfflineWriter(const std::filesystem::path& path, const Hello& hello);
    void write(const RecordBatch& batch);
    std::uint64_t bytes_written() const noexcept { return bytes_; }
    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t latent_size_;
    std::uint64_t bytes_ = 0;
};

OfflineStream decode_offline(std::span<const std::uint8_t> bytes);
OfflineStream read_offline(const std::filesystem::path& path);

}  // namespace latentwire::net

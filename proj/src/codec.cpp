#include "latentwire/codec.hpp"

#include <bit>
#include <cstring>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "latentwire/errors.hpp"

namespace latentwire {

static_assert(std::endian::native == std::endian::little, "f32 blobs assume a little-endian host");

Sha256Digest sha256(std::span<const std::uint8_t> bytes) {
    Sha256Digest out{};
    SHA256(bytes.data(), bytes.size(), out.data());
    return out;
}

Sha256Digest sha256(std::string_view text) {
    return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

namespace {
int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw LoadError(LoadFailure::corrupt_payload, "hex string has odd length");
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw LoadError(LoadFailure::corrupt_payload, "invalid hex character");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

Sha256Digest digest_from_hex(std::string_view hex) {
    auto bytes = from_hex(hex);
    if (bytes.size() != 32) throw LoadError(LoadFailure::corrupt_payload, "fingerprint must be 32 bytes of hex");
    Sha256Digest d{};
    std::memcpy(d.data(), bytes.data(), 32);
    return d;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) throw LoadError(LoadFailure::corrupt_payload, "base64 length is not a multiple of 4");
    if (text.empty()) return {};
    std::vector<std::uint8_t> out(text.size() / 4 * 3);
    int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0) throw LoadError(LoadFailure::corrupt_payload, "invalid base64 payload");
    // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
    std::size_t padding = 0;
    if (text.back() == '=') ++padding;
    if (text.size() >= 2 && text[text.size() - 2] == '=') ++padding;
    out.resize(static_cast<std::size_t>(n) - padding);
    return out;
}

std::string encode_f32_blob(std::span<const float> values) {
    return base64_encode(std::span(reinterpret_cast<const std::uint8_t*>(values.data()), values.size() * sizeof(float)));
}

std::vector<float> decode_f32_blob(std::string_view base64, std::size_t expected_count) {
    auto bytes = base64_decode(base64);
    if (bytes.size() != expected_count * sizeof(float)) {
        throw LoadError(LoadFailure::corrupt_payload, "parameter blob holds " + std::to_string(bytes.size()) +
                                                          " bytes, expected " + std::to_string(expected_count * sizeof(float)));
    }
    std::vector<float> out(expected_count);
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

}  // namespace latentwire

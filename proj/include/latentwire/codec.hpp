#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace latentwire {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> bytes);
Sha256Digest sha256(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
// Throws LoadError(corrupt_payload) on odd length or non-hex characters.
std::vector<std::uint8_t> from_hex(std::string_view hex);
Sha256Digest digest_from_hex(std::string_view hex);

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws LoadError(corrupt_payload) on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Little-endian f32 blobs, the parameter encoding used by every model file.
std::string encode_f32_blob(std::span<const float> values);
std::vector<float> decode_f32_blob(std::string_view base64, std::size_t expected_count);

}  // namespace latentwire

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "latentwire/data/records.hpp"

namespace latentwire::data {

// "LWDS" binary dataset container, little-endian:
//   magic[4] version:u16 count:u64 dim:u32, then per record
//   record_id:u64 label:u8 features:f32[dim]
inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderBytes = 4 + 2 + 8 + 4;
inline constexpr std::size_t kContainerRecordOverhead = 8 + 1;

constexpr std::size_t container_bytes(std::size_t records, std::size_t dim) noexcept {
    return kContainerHeaderBytes + records * (kContainerRecordOverhead + 4 * dim);
}

struct Dataset {
    std::uint32_t dimension = 0;
    std::vector<FeatureVector> records;
};

std::vector<std::uint8_t> encode_container(std::span<const FeatureVector> records, std::uint32_t dimension);
Dataset decode_container(std::span<const std::uint8_t> bytes);

void write_container(const std::filesystem::path& path, std::span<const FeatureVector> records, std::uint32_t dimension);
Dataset read_container(const std::filesystem::path& path);

}  // namespace latentwire::data

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "latentwire/nn/network.hpp"

namespace latentwire::nn {

inline constexpr int kModelFormatVersion = 1;

// JSON model document: format_version plus a `layers` array; every parameter
// block is a base64 little-endian f32 blob, so save -> load is bit-exact.
nlohmann::json network_to_json(const Network<float>& net);
Network<float> network_from_json(const nlohmann::json& j);

void save_network(const Network<float>& net, const std::filesystem::path& path);
Network<float> load_network(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace latentwire::nn

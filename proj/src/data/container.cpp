#include "latentwire/data/container.hpp"

#include <fstream>
#include <iterator>

#include "latentwire/bytes.hpp"
#include "latentwire/errors.hpp"

namespace latentwire::data {

namespace {
constexpr std::uint8_t kMagic[4] = {'L', 'W', 'D', 'S'};
}

std::vector<std::uint8_t> encode_container(std::span<const FeatureVector> records, std::uint32_t dimension) {
    ByteWriter w;
    w.bytes().reserve(container_bytes(records.size(), dimension));
    w.put_bytes(kMagic);
    w.put<std::uint16_t>(kContainerVersion);
    w.put<std::uint64_t>(records.size());
    w.put<std::uint32_t>(dimension);
    for (const auto& r : records) {
        if (r.features.size() != dimension) {
            throw ShapeError("record " + std::to_string(r.record_id) + " has " + std::to_string(r.features.size()) +
                             " features, container dimension is " + std::to_string(dimension));
        }
        w.put<std::uint64_t>(r.record_id);
        w.put<std::uint8_t>(r.label);
        for (float f : r.features) w.put<float>(f);
    }
    return std::move(w.bytes());
}

Dataset decode_container(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.get_bytes(4);
    if (!r.ok() || !std::equal(magic.begin(), magic.end(), kMagic)) {
        throw LoadError(LoadFailure::corrupt_payload, "not an LWDS dataset container");
    }
    if (r.get<std::uint16_t>() != kContainerVersion) throw LoadError(LoadFailure::version, "unsupported LWDS version");
    auto count = r.get<std::uint64_t>();
    Dataset ds;
    ds.dimension = r.get<std::uint32_t>();
    if (!r.ok() || r.remaining() != count * (kContainerRecordOverhead + 4ull * ds.dimension)) {
        throw LoadError(LoadFailure::corrupt_payload, "LWDS payload size does not match its header");
    }
    ds.records.resize(count);
    for (auto& rec : ds.records) {
        rec.record_id = r.get<std::uint64_t>();
        rec.label = r.get<std::uint8_t>();
        rec.features.resize(ds.dimension);
        for (auto& f : rec.features) f = r.get<float>();
    }
    return ds;
}

void write_container(const std::filesystem::path& path, std::span<const FeatureVector> records, std::uint32_t dimension) {
    auto bytes = encode_container(records, dimension);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError(LoadFailure::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Dataset read_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(LoadFailure::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_container(bytes);
}

}  // namespace latentwire::data

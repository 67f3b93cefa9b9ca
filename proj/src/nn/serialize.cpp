#include "latentwire/nn/serialize.hpp"

#include <fstream>

#include "latentwire/codec.hpp"
#include "latentwire/errors.hpp"

namespace latentwire::nn {

nlohmann::json network_to_json(const Network<float>& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        if (const auto* d = std::get_if<Dense<float>>(&l)) {
            layers.push_back({{"kind", "dense"},
                              {"shape", {d->output_dim(), d->input_dim()}},
                              {"activation", to_string(d->activation())},
                              {"weights", encode_f32_blob(d->weights().values())},
                              {"bias", encode_f32_blob(d->bias())}});
        } else {
            const auto& r = std::get<Lstm<float>>(l);
            layers.push_back({{"kind", "lstm"},
                              {"shape", {r.units(), r.input_dim()}},
                              {"activation", "tanh"},
                              {"return_sequences", r.return_sequences()},
                              {"input_weights", encode_f32_blob(r.input_weights().values())},
                              {"recurrent_weights", encode_f32_blob(r.recurrent_weights().values())},
                              {"bias", encode_f32_blob(r.bias())}});
        }
    }
    return {{"format_version", kModelFormatVersion}, {"layers", layers}};
}

Network<float> network_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion) {
            throw LoadError(LoadFailure::version, "unsupported model format_version");
        }
        std::vector<Layer<float>> layers;
        for (const auto& lj : j.at("layers")) {
            const auto kind = lj.at("kind").get<std::string>();
            const auto shape = lj.at("shape").get<std::vector<std::size_t>>();
            if (shape.size() != 2 || shape[0] == 0 || shape[1] == 0) throw LoadError(LoadFailure::shape, "bad layer shape");
            if (kind == "dense") {
                const std::size_t out = shape[0], in = shape[1];
                Matrix<float> w(out, in, decode_f32_blob(lj.at("weights").get<std::string>(), out * in));
                layers.emplace_back(Dense<float>(std::move(w), decode_f32_blob(lj.at("bias").get<std::string>(), out),
                                                 activation_from_string(lj.at("activation").get<std::string>())));
            } else if (kind == "lstm") {
                const std::size_t units = shape[0], in = shape[1];
                Lstm<float> r(in, units, lj.at("return_sequences").get<bool>());
                auto wx = decode_f32_blob(lj.at("input_weights").get<std::string>(), 4 * units * in);
                auto wh = decode_f32_blob(lj.at("recurrent_weights").get<std::string>(), 4 * units * units);
                auto b = decode_f32_blob(lj.at("bias").get<std::string>(), 4 * units);
                std::copy(wx.begin(), wx.end(), r.input_weights().data());
                std::copy(wh.begin(), wh.end(), r.recurrent_weights().data());
                r.bias() = std::move(b);
                layers.emplace_back(std::move(r));
            } else {
                throw LoadError(LoadFailure::shape, "unknown layer kind '" + kind + "'");
            }
        }
        try {
            return Network<float>(std::move(layers));
        } catch (const ShapeError& e) {
            throw LoadError(LoadFailure::shape, e.what());
        }
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(LoadFailure::corrupt_payload, std::string("model document: ") + e.what());
    } catch (const ConfigError& e) {
        throw LoadError(LoadFailure::corrupt_payload, e.what());
    }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(LoadFailure::io, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(LoadFailure::corrupt_payload, path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw LoadError(LoadFailure::io, "cannot write " + path.string());
    out << j.dump() << '\n';
}

void save_network(const Network<float>& net, const std::filesystem::path& path) { write_json_file(path, network_to_json(net)); }

Network<float> load_network(const std::filesystem::path& path) { return network_from_json(read_json_file(path)); }

}  // namespace latentwire::nn

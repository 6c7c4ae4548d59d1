#include "dmtdm/iq_file.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

namespace dmtdm {

namespace {

void put_f64(std::string& out, double v) {
    auto u = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>(u & 0xFFU));
        u >>= 8;
    }
}

double get_f64(std::string_view bytes, std::size_t offset) {
    std::uint64_t u = 0;
    for (int i = 7; i >= 0; --i) {
        u = (u << 8) | static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)]);
    }
    return std::bit_cast<double>(u);
}

}  // namespace

std::string encode_iq(std::span<const Complex> samples) {
    std::string out;
    out.reserve(samples.size() * kBytesPerSample);
    for (const auto& v : samples) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
    return out;
}

ComplexVec decode_iq(std::string_view bytes) {
    if (bytes.size() % kBytesPerSample != 0) {
        const std::size_t tail = bytes.size() - bytes.size() % kBytesPerSample;
        throw IqFormatError("IQ data length " + std::to_string(bytes.size()) +
                                " is not a multiple of 16 bytes; partial sample",
                            tail);
    }
    ComplexVec out(bytes.size() / kBytesPerSample);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t off = i * kBytesPerSample;
        const double re = get_f64(bytes, off);
        const double im = get_f64(bytes, off + 8);
        if (!std::isfinite(re) || !std::isfinite(im)) {
            throw IqFormatError("non-finite IQ sample " + std::to_string(i), off);
        }
        out[i] = {re, im};
    }
    return out;
}

void write_iq(const std::filesystem::path& path, std::span<const Complex> samples) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    const auto bytes = encode_iq(samples);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

ComplexVec read_iq(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_iq(bytes);
}

std::filesystem::path sidecar_path(const std::filesystem::path& iq_path) {
    auto p = iq_path;
    p += ".json";
    return p;
}

nlohmann::json to_json(const SymbolIndices& idx) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LoRaIndex>) {
                return {{"k", v.k}};
            } else if constexpr (std::is_same_v<T, TdmIndices>) {
                return {{"up", v.up}, {"down", v.down}};
            } else {
                return {{"even_up", v.even_up},
                        {"odd_up", v.odd_up},
                        {"even_down", v.even_down},
                        {"odd_down", v.odd_down},
                        {"tones",
                         {even_tone(v.even_up), odd_tone(v.odd_up), even_tone(v.even_down),
                          odd_tone(v.odd_down)}}};
            }
        },
        idx);
}

nlohmann::json to_json(const IqSidecar& meta) {
    return {{"format", "iq-f64le/1"},
            {"scheme", to_string(meta.scheme)},
            {"lambda", meta.lambda},
            {"samples", meta.samples},
            {"indices", to_json(meta.indices)},
            {"bits", bits_to_string(meta.bits)}};
}

IqSidecar sidecar_from_json(const nlohmann::json& j) {
    try {
        IqSidecar meta;
        meta.scheme = parse_scheme(j.at("scheme").get<std::string>());
        meta.lambda = j.at("lambda").get<int>();
        meta.samples = j.at("samples").get<std::size_t>();
        meta.bits = bits_from_string(j.at("bits").get<std::string>());
        const SpreadingFactor sf{meta.lambda};
        meta.indices = map_bits(meta.scheme, meta.bits, sf);
        return meta;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed IQ sidecar: ") + e.what());
    }
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

Bits bits_from_string(std::string_view text) {
    Bits out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '0' || c == '1') {
            out.push_back(static_cast<std::uint8_t>(c - '0'));
        } else if (c != '_' && c != ' ') {
            throw std::invalid_argument("invalid character '" + std::string(1, c) +
                                        "' in bit string at position " + std::to_string(i));
        }
    }
    return out;
}

}  // namespace dmtdm

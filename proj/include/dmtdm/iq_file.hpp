// Raw IQ sample files: interleaved little-endian float64 (I, Q) pairs, no
// header, 16 bytes per complex sample. Every file <name> is accompanied by a
// JSON sidecar <name>.json describing the symbol.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dmtdm/modem.hpp"

namespace dmtdm {

class IqFormatError : public std::runtime_error {
public:
    IqFormatError(const std::string& what, std::uint64_t byte_offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::uint64_t byte_offset() const { return byte_offset_; }

private:
    std::uint64_t byte_offset_;
};

inline constexpr std::size_t kBytesPerSample = 16;

std::string encode_iq(std::span<const Complex> samples);
/// Throws IqFormatError on a truncated sample or non-finite value.
ComplexVec decode_iq(std::string_view bytes);

void write_iq(const std::filesystem::path& path, std::span<const Complex> samples);
ComplexVec read_iq(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& iq_path);

struct IqSidecar {
    Scheme scheme = Scheme::dm_tdm_css;
    int lambda = 0;
    std::size_t samples = 0;
    SymbolIndices indices;
    Bits bits;
};

nlohmann::json to_json(const SymbolIndices& idx);
nlohmann::json to_json(const IqSidecar& meta);
IqSidecar sidecar_from_json(const nlohmann::json& j);

std::string bits_to_string(std::span<const std::uint8_t> bits);
/// Accepts '0' / '1' characters; '_' and spaces are ignored as separators.
Bits bits_from_string(std::string_view text);

}  // namespace dmtdm

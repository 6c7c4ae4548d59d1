// Bit mapping, modulation and DFT-based detection for three chirp schemes:
//
//   lora        one frequency shift on an up-chirp                 lambda bits
//   tdm-css     one shift on an up-chirp + one on a down-chirp     2*lambda bits
//   dm-tdm-css  an even and an odd shift on each of the two        4*lambda - 4 bits
//
// DM-TDM-CSS indices are stored "compressed": each field is in [0, M/2 - 1]
// and expands to tone 2k (even fields) or 2k + 1 (odd fields). Bits map to
// the fields in the order (even_up, odd_up, even_down, odd_down), MSB first.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dmtdm/signal.hpp"

namespace dmtdm {

enum class Scheme { lora, tdm_css, dm_tdm_css };
enum class Detector { coherent, noncoherent };

std::string_view to_string(Scheme s);
std::string_view to_string(Detector d);
/// Accepts the canonical names ("lora", "tdm-css", "dm-tdm-css", "coherent", "noncoherent").
Scheme parse_scheme(std::string_view name);
Detector parse_detector(std::string_view name);

class SpreadingFactor {
public:
    explicit SpreadingFactor(int lambda);

    int lambda() const { return lambda_; }
    std::size_t m() const { return std::size_t{1} << lambda_; }

    friend bool operator==(SpreadingFactor, SpreadingFactor) = default;

private:
    int lambda_;
};

struct DmTdmIndices {
    std::uint32_t even_up = 0;
    std::uint32_t odd_up = 0;
    std::uint32_t even_down = 0;
    std::uint32_t odd_down = 0;

    friend bool operator==(const DmTdmIndices&, const DmTdmIndices&) = default;
};

/// Expanded tone index of a compressed even / odd field.
constexpr std::uint32_t even_tone(std::uint32_t k) { return 2 * k; }
constexpr std::uint32_t odd_tone(std::uint32_t k) { return 2 * k + 1; }

struct LoRaIndex {
    std::uint32_t k = 0;
    friend bool operator==(const LoRaIndex&, const LoRaIndex&) = default;
};

struct TdmIndices {
    std::uint32_t up = 0;
    std::uint32_t down = 0;
    friend bool operator==(const TdmIndices&, const TdmIndices&) = default;
};

using SymbolIndices = std::variant<LoRaIndex, TdmIndices, DmTdmIndices>;
using Bits = std::vector<std::uint8_t>;

Scheme scheme_of(const SymbolIndices& idx);

std::size_t bits_per_symbol(Scheme scheme, SpreadingFactor sf);

struct Rational {
    std::int64_t num;
    std::int64_t den;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    /// Reduced to lowest terms.
    Rational normalized() const;
    friend bool operator==(const Rational& a, const Rational& b);
};

/// Bits per second per Hz, N_bits / M.
Rational spectral_efficiency(Scheme scheme, SpreadingFactor sf);

void validate(const DmTdmIndices& idx, SpreadingFactor sf);
void validate(const LoRaIndex& idx, SpreadingFactor sf);
void validate(const TdmIndices& idx, SpreadingFactor sf);

DmTdmIndices map_bits_dmtdm(std::span<const std::uint8_t> bits, SpreadingFactor sf);
LoRaIndex map_bits_lora(std::span<const std::uint8_t> bits, SpreadingFactor sf);
TdmIndices map_bits_tdm(std::span<const std::uint8_t> bits, SpreadingFactor sf);
SymbolIndices map_bits(Scheme scheme, std::span<const std::uint8_t> bits, SpreadingFactor sf);

Bits demap_bits(const SymbolIndices& idx, SpreadingFactor sf);

ComplexVec modulate_dmtdm(const DmTdmIndices& idx, SpreadingFactor sf);
ComplexVec modulate_lora(const LoRaIndex& idx, SpreadingFactor sf);
ComplexVec modulate_tdm(const TdmIndices& idx, SpreadingFactor sf);
ComplexVec modulate(const SymbolIndices& idx, SpreadingFactor sf);

/// y(n) * c_slope(n). slope = down gives r_1, slope = up gives r_2.
ComplexVec dechirp(std::span<const Complex> y, Slope slope);

/// Coherent decisions use Re{conj(h) R(k)}; non-coherent use |R(k)|.
class DetectionMode {
public:
    static DetectionMode coherent(Complex h);
    static DetectionMode noncoherent() { return DetectionMode(Detector::noncoherent, {1.0, 0.0}); }

    Detector kind() const { return kind_; }
    Complex gain() const { return gain_; }

private:
    DetectionMode(Detector kind, Complex gain) : kind_(kind), gain_(gain) {}
    Detector kind_;
    Complex gain_;
};

DmTdmIndices detect_dmtdm_coherent(std::span<const Complex> y, Complex h, SpreadingFactor sf);
DmTdmIndices detect_dmtdm_noncoherent(std::span<const Complex> y, SpreadingFactor sf);
DmTdmIndices detect_dmtdm(std::span<const Complex> y, SpreadingFactor sf, DetectionMode mode);
LoRaIndex detect_lora(std::span<const Complex> y, SpreadingFactor sf, DetectionMode mode);
TdmIndices detect_tdm(std::span<const Complex> y, SpreadingFactor sf, DetectionMode mode);
SymbolIndices detect(Scheme scheme, std::span<const Complex> y, SpreadingFactor sf,
                     DetectionMode mode);

/// One argmax decision of a detector, with the runner-up statistic in the same search set.
struct BranchDecision {
    std::string label;  // e.g. "R1/even"
    std::size_t bin;    // expanded DFT bin
    double statistic;
    double runner_up;
    double magnitude;   // |R(bin)|

    double margin() const { return statistic - runner_up; }
};

/// Same decisions as detect(), with per-branch diagnostics.
std::vector<BranchDecision> inspect(Scheme scheme, std::span<const Complex> y, SpreadingFactor sf,
                                    DetectionMode mode);

}  // namespace dmtdm

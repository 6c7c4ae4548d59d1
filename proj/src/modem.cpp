#include "dmtdm/modem.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <type_traits>

namespace dmtdm {

namespace {

std::uint32_t bits_to_uint(std::span<const std::uint8_t> bits) {
    std::uint32_t v = 0;
    for (auto b : bits) {
        if (b > 1) {
            throw std::invalid_argument("bit values must be 0 or 1");
        }
        v = (v << 1) | b;
    }
    return v;
}

void append_uint(Bits& out, std::uint32_t v, int width) {
    for (int i = width - 1; i >= 0; --i) {
        out.push_back(static_cast<std::uint8_t>((v >> i) & 1U));
    }
}

void require_bit_count(std::span<const std::uint8_t> bits, std::size_t expected, Scheme scheme) {
    if (bits.size() != expected) {
        throw std::invalid_argument(std::string(to_string(scheme)) + " symbol needs " +
                                    std::to_string(expected) + " bits, got " +
                                    std::to_string(bits.size()));
    }
}

void require_index(std::uint32_t k, std::size_t bound, const char* field) {
    if (k >= bound) {
        throw std::invalid_argument(std::string(field) + " = " + std::to_string(k) +
                                    " out of range [0, " + std::to_string(bound - 1) + "]");
    }
}

// Adds exp{j*pi*(2*tone*n + slope*n^2)/M} to s.
void accumulate_chirped_tone(ComplexVec& s, std::size_t tone, Slope slope) {
    const std::size_t m = s.size();
    const std::size_t mask = 2 * m - 1;  // the period 2M is a power of two
    const auto table = half_turn_table(m);
    const std::size_t step = 2 * tone;
    std::size_t lin = 0;
    for (std::size_t n = 0; n < m; ++n) {
        const std::size_t sq = (n * n) & mask;
        const std::size_t idx = slope == Slope::up ? (lin + sq) & mask : (lin - sq) & mask;
        s[n] += table[idx];
        lin = (lin + step) & mask;
    }
}

void require_length(std::span<const Complex> y, SpreadingFactor sf) {
    if (y.size() != sf.m()) {
        throw std::invalid_argument("received block has " + std::to_string(y.size()) +
                                    " samples, expected M = " + std::to_string(sf.m()));
    }
}

struct Spectra {
    ComplexVec r1;  // dechirped by c_d: carries the up-chirp tones
    ComplexVec r2;  // dechirped by c_u: carries the down-chirp tones
};

Spectra dechirped_spectra(std::span<const Complex> y, SpreadingFactor sf, bool need_r2) {
    require_length(y, sf);
    Spectra out;
    out.r1 = dft(dechirp(y, Slope::down));
    if (need_r2) {
        out.r2 = dft(dechirp(y, Slope::up));
    }
    return out;
}

double statistic(const Complex& bin, const DetectionMode& mode) {
    if (mode.kind() == Detector::coherent) {
        return (std::conj(mode.gain()) * bin).real();
    }
    return std::sqrt(std::norm(bin));  // same ordering as std::abs, without hypot's cost
}

// Argmax over bins start, start + step, ...; ties go to the smallest bin.
BranchDecision pick(const ComplexVec& spectrum, std::size_t start, std::size_t step,
                    const DetectionMode& mode, std::string label) {
    BranchDecision d{std::move(label), start, -INFINITY, -INFINITY, 0.0};
    for (std::size_t k = start; k < spectrum.size(); k += step) {
        const double v = statistic(spectrum[k], mode);
        if (v > d.statistic) {
            d.runner_up = d.statistic;
            d.statistic = v;
            d.bin = k;
        } else if (v > d.runner_up) {
            d.runner_up = v;
        }
    }
    d.magnitude = std::abs(spectrum[d.bin]);
    return d;
}

std::vector<BranchDecision> decide(Scheme scheme, std::span<const Complex> y, SpreadingFactor sf,
                                   const DetectionMode& mode) {
    const auto spectra = dechirped_spectra(y, sf, scheme != Scheme::lora);
    switch (scheme) {
        case Scheme::lora:
            return {pick(spectra.r1, 0, 1, mode, "R1")};
        case Scheme::tdm_css:
            return {pick(spectra.r1, 0, 1, mode, "R1"), pick(spectra.r2, 0, 1, mode, "R2")};
        case Scheme::dm_tdm_css:
            return {pick(spectra.r1, 0, 2, mode, "R1/even"), pick(spectra.r1, 1, 2, mode, "R1/odd"),
                    pick(spectra.r2, 0, 2, mode, "R2/even"), pick(spectra.r2, 1, 2, mode, "R2/odd")};
    }
    throw std::logic_error("unknown scheme");
}

std::uint32_t as_u32(std::size_t v) { return static_cast<std::uint32_t>(v); }

}  // namespace

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::lora: return "lora";
        case Scheme::tdm_css: return "tdm-css";
        case Scheme::dm_tdm_css: return "dm-tdm-css";
    }
    return "?";
}

std::string_view to_string(Detector d) {
    return d == Detector::coherent ? "coherent" : "noncoherent";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "lora") return Scheme::lora;
    if (name == "tdm-css") return Scheme::tdm_css;
    if (name == "dm-tdm-css") return Scheme::dm_tdm_css;
    throw std::invalid_argument("unknown scheme '" + std::string(name) +
                                "' (expected lora, tdm-css or dm-tdm-css)");
}

Detector parse_detector(std::string_view name) {
    if (name == "coherent") return Detector::coherent;
    if (name == "noncoherent") return Detector::noncoherent;
    throw std::invalid_argument("unknown detector '" + std::string(name) +
                                "' (expected coherent or noncoherent)");
}

SpreadingFactor::SpreadingFactor(int lambda) : lambda_(lambda) {
    if (lambda < kMinSpreadingFactor || lambda > kMaxSpreadingFactor) {
        throw std::invalid_argument("spreading factor " + std::to_string(lambda) +
                                    " outside [6, 12]");
    }
}

Scheme scheme_of(const SymbolIndices& idx) {
    switch (idx.index()) {
        case 0: return Scheme::lora;
        case 1: return Scheme::tdm_css;
        default: return Scheme::dm_tdm_css;
    }
}

std::size_t bits_per_symbol(Scheme scheme, SpreadingFactor sf) {
    const auto lambda = static_cast<std::size_t>(sf.lambda());
    switch (scheme) {
        case Scheme::lora: return lambda;
        case Scheme::tdm_css: return 2 * lambda;
        case Scheme::dm_tdm_css: return 4 * lambda - 4;
    }
    throw std::logic_error("unknown scheme");
}

Rational Rational::normalized() const {
    const auto g = std::gcd(num, den);
    return g == 0 ? *this : Rational{num / g, den / g};
}

bool operator==(const Rational& a, const Rational& b) { return a.num * b.den == b.num * a.den; }

Rational spectral_efficiency(Scheme scheme, SpreadingFactor sf) {
    return Rational{static_cast<std::int64_t>(bits_per_symbol(scheme, sf)),
                    static_cast<std::int64_t>(sf.m())};
}

void validate(const DmTdmIndices& idx, SpreadingFactor sf) {
    const std::size_t half = sf.m() / 2;
    require_index(idx.even_up, half, "even_up");
    require_index(idx.odd_up, half, "odd_up");
    require_index(idx.even_down, half, "even_down");
    require_index(idx.odd_down, half, "odd_down");
}

void validate(const LoRaIndex& idx, SpreadingFactor sf) { require_index(idx.k, sf.m(), "k"); }

void validate(const TdmIndices& idx, SpreadingFactor sf) {
    require_index(idx.up, sf.m(), "up");
    require_index(idx.down, sf.m(), "down");
}

DmTdmIndices map_bits_dmtdm(std::span<const std::uint8_t> bits, SpreadingFactor sf) {
    require_bit_count(bits, bits_per_symbol(Scheme::dm_tdm_css, sf), Scheme::dm_tdm_css);
    const auto w = static_cast<std::size_t>(sf.lambda() - 1);
    return DmTdmIndices{bits_to_uint(bits.subspan(0, w)), bits_to_uint(bits.subspan(w, w)),
                        bits_to_uint(bits.subspan(2 * w, w)), bits_to_uint(bits.subspan(3 * w, w))};
}

LoRaIndex map_bits_lora(std::span<const std::uint8_t> bits, SpreadingFactor sf) {
    require_bit_count(bits, bits_per_symbol(Scheme::lora, sf), Scheme::lora);
    return LoRaIndex{bits_to_uint(bits)};
}

TdmIndices map_bits_tdm(std::span<const std::uint8_t> bits, SpreadingFactor sf) {
    require_bit_count(bits, bits_per_symbol(Scheme::tdm_css, sf), Scheme::tdm_css);
    const auto w = static_cast<std::size_t>(sf.lambda());
    return TdmIndices{bits_to_uint(bits.subspan(0, w)), bits_to_uint(bits.subspan(w, w))};
}

SymbolIndices map_bits(Scheme scheme, std::span<const std::uint8_t> bits, SpreadingFactor sf) {
    switch (scheme) {
        case Scheme::lora: return map_bits_lora(bits, sf);
        case Scheme::tdm_css: return map_bits_tdm(bits, sf);
        case Scheme::dm_tdm_css: return map_bits_dmtdm(bits, sf);
    }
    throw std::logic_error("unknown scheme");
}

Bits demap_bits(const SymbolIndices& idx, SpreadingFactor sf) {
    Bits out;
    out.reserve(bits_per_symbol(scheme_of(idx), sf));
    const int lambda = sf.lambda();
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            validate(v, sf);
            if constexpr (std::is_same_v<T, LoRaIndex>) {
                append_uint(out, v.k, lambda);
            } else if constexpr (std::is_same_v<T, TdmIndices>) {
                append_uint(out, v.up, lambda);
                append_uint(out, v.down, lambda);
            } else {
                append_uint(out, v.even_up, lambda - 1);
                append_uint(out, v.odd_up, lambda - 1);
                append_uint(out, v.even_down, lambda - 1);
                append_uint(out, v.odd_down, lambda - 1);
            }
        },
        idx);
    return out;
}

ComplexVec modulate_dmtdm(const DmTdmIndices& idx, SpreadingFactor sf) {
    validate(idx, sf);
    ComplexVec s(sf.m(), Complex{0.0, 0.0});
    accumulate_chirped_tone(s, even_tone(idx.even_up), Slope::up);
    accumulate_chirped_tone(s, odd_tone(idx.odd_up), Slope::up);
    accumulate_chirped_tone(s, even_tone(idx.even_down), Slope::down);
    accumulate_chirped_tone(s, odd_tone(idx.odd_down), Slope::down);
    return s;
}

ComplexVec modulate_lora(const LoRaIndex& idx, SpreadingFactor sf) {
    validate(idx, sf);
    ComplexVec s(sf.m(), Complex{0.0, 0.0});
    accumulate_chirped_tone(s, idx.k, Slope::up);
    return s;
}

ComplexVec modulate_tdm(const TdmIndices& idx, SpreadingFactor sf) {
    validate(idx, sf);
    ComplexVec s(sf.m(), Complex{0.0, 0.0});
    accumulate_chirped_tone(s, idx.up, Slope::up);
    accumulate_chirped_tone(s, idx.down, Slope::down);
    return s;
}

ComplexVec modulate(const SymbolIndices& idx, SpreadingFactor sf) {
    return std::visit(
        [&](const auto& v) -> ComplexVec {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LoRaIndex>) {
                return modulate_lora(v, sf);
            } else if constexpr (std::is_same_v<T, TdmIndices>) {
                return modulate_tdm(v, sf);
            } else {
                return modulate_dmtdm(v, sf);
            }
        },
        idx);
}

ComplexVec dechirp(std::span<const Complex> y, Slope slope) {
    return multiply(y, make_chirp(y.size(), slope));
}

DetectionMode DetectionMode::coherent(Complex h) {
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag()) || h == Complex{0.0, 0.0}) {
        throw std::invalid_argument("coherent detection needs a finite, nonzero channel gain");
    }
    return DetectionMode(Detector::coherent, h);
}

DmTdmIndices detect_dmtdm(std::span<const Complex> y, SpreadingFactor sf, DetectionMode mode) {
    const auto d = decide(Scheme::dm_tdm_css, y, sf, mode);
    return DmTdmIndices{as_u32(d[0].bin / 2), as_u32(d[1].bin / 2), as_u32(d[2].bin / 2),
                        as_u32(d[3].bin / 2)};
}

DmTdmIndices detect_dmtdm_coherent(std::span<const Complex> y, Complex h, SpreadingFactor sf) {
    return detect_dmtdm(y, sf, DetectionMode::coherent(h));
}

DmTdmIndices detect_dmtdm_noncoherent(std::span<const Complex> y, SpreadingFactor sf) {
    return detect_dmtdm(y, sf, DetectionMode::noncoherent());
}

LoRaIndex detect_lora(std::span<const Complex> y, SpreadingFactor sf, DetectionMode mode) {
    return LoRaIndex{as_u32(decide(Scheme::lora, y, sf, mode)[0].bin)};
}

TdmIndices detect_tdm(std::span<const Complex> y, SpreadingFactor sf, DetectionMode mode) {
    const auto d = decide(Scheme::tdm_css, y, sf, mode);
    return TdmIndices{as_u32(d[0].bin), as_u32(d[1].bin)};
}

SymbolIndices detect(Scheme scheme, std::span<const Complex> y, SpreadingFactor sf,
                     DetectionMode mode) {
    switch (scheme) {
        case Scheme::lora: return detect_lora(y, sf, mode);
        case Scheme::tdm_css: return detect_tdm(y, sf, mode);
        case Scheme::dm_tdm_css: return detect_dmtdm(y, sf, mode);
    }
    throw std::logic_error("unknown scheme");
}

std::vector<BranchDecision> inspect(Scheme scheme, std::span<const Complex> y, SpreadingFactor sf,
                                    DetectionMode mode) {
    return decide(scheme, y, sf, mode);
}

}  // namespace dmtdm

#include "dmtdm/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dmtdm {

namespace {

bool finite(double v) { return std::isfinite(v); }
bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

void require_sigma2(double sigma2) {
    if (!finite(sigma2) || sigma2 < 0.0) {
        throw std::invalid_argument("noise variance must be finite and >= 0, got " +
                                    std::to_string(sigma2));
    }
}

void require_rho(double rho) {
    if (!finite(rho) || rho < 0.0 || rho > 1.0) {
        throw std::invalid_argument("fading split rho must lie in [0, 1], got " +
                                    std::to_string(rho));
    }
}

}  // namespace

void ChannelSpec::validate() const {
    if (!finite(gain)) {
        throw std::invalid_argument("channel gain must be finite");
    }
    require_sigma2(noise_sigma2);
    if (fading) {
        require_rho(fading->rho);
    }
    if (!finite(phase_offset) || !finite(freq_offset)) {
        throw std::invalid_argument("phase and frequency offsets must be finite");
    }
}

Complex receiver_gain(const ChannelSpec& spec) {
    const double first_tap = spec.fading ? std::sqrt(1.0 - spec.fading->rho) : 1.0;
    return spec.gain * first_tap;
}

Complex NoiseSource::gaussian(double sigma2) {
    const double scale = std::sqrt(0.5 * sigma2);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {scale * re, scale * im};
}

void NoiseSource::fill_bits(std::span<std::uint8_t> out) {
    std::uint64_t word = 0;
    int left = 0;
    for (auto& b : out) {
        if (left == 0) {
            word = engine_();
            left = 64;
        }
        b = static_cast<std::uint8_t>(word & 1U);
        word >>= 1;
        --left;
    }
}

ComplexVec apply_awgn(std::span<const Complex> s, double sigma2, NoiseSource& noise) {
    require_sigma2(sigma2);
    ComplexVec y(s.begin(), s.end());
    if (sigma2 == 0.0) {
        return y;
    }
    for (auto& v : y) {
        v += noise.gaussian(sigma2);
    }
    return y;
}

ComplexVec apply_fading(std::span<const Complex> s, double rho) {
    require_rho(rho);
    const double h0 = std::sqrt(1.0 - rho);
    const double h1 = std::sqrt(rho);
    ComplexVec y(s.size());
    // Zero state before the symbol; the tail past M - 1 is dropped.
    for (std::size_t n = 0; n < s.size(); ++n) {
        y[n] = h0 * s[n] + (n > 0 ? h1 * s[n - 1] : Complex{0.0, 0.0});
    }
    return y;
}

ComplexVec apply_gain(std::span<const Complex> s, Complex h) {
    ComplexVec y(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        y[n] = h * s[n];
    }
    return y;
}

ComplexVec apply_phase_offset(std::span<const Complex> s, double psi) {
    return apply_gain(s, std::polar(1.0, psi));
}

ComplexVec apply_freq_offset(std::span<const Complex> s, double delta_f) {
    const auto m = static_cast<double>(s.size());
    ComplexVec y(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        // Cycles reduced modulo one before scaling by 2*pi.
        const double cycles = std::fmod(delta_f * static_cast<double>(n), m) / m;
        y[n] = s[n] * std::polar(1.0, 2.0 * std::numbers::pi * cycles);
    }
    return y;
}

ComplexVec run_chain(std::span<const Complex> s, const ChannelSpec& spec, NoiseSource& noise) {
    spec.validate();
    ComplexVec x(s.begin(), s.end());
    if (spec.fading) {
        x = apply_fading(x, spec.fading->rho);
    }
    if (spec.gain != Complex{1.0, 0.0}) {
        x = apply_gain(x, spec.gain);
    }
    if (spec.freq_offset != 0.0) {
        x = apply_freq_offset(x, spec.freq_offset);
    }
    x = apply_awgn(x, spec.noise_sigma2, noise);
    if (spec.phase_offset != 0.0) {
        x = apply_phase_offset(x, spec.phase_offset);
    }
    return x;
}

}  // namespace dmtdm

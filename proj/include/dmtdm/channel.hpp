// Impairment chain: 2-tap fading, complex gain, carrier frequency offset,
// phase offset and AWGN, applied to one symbol at a time.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "dmtdm/signal.hpp"

namespace dmtdm {

/// h(n) = sqrt(1 - rho) delta(n) + sqrt(rho) delta(n - 1).
struct FadingSpec {
    double rho = 0.0;
    friend bool operator==(const FadingSpec&, const FadingSpec&) = default;
};

struct ChannelSpec {
    Complex gain{1.0, 0.0};
    double noise_sigma2 = 0.0;       // per-sample complex noise variance
    std::optional<FadingSpec> fading;
    double phase_offset = 0.0;       // radians
    double freq_offset = 0.0;        // cycles per M samples

    /// Throws std::invalid_argument on non-finite values, negative noise or rho outside [0, 1].
    void validate() const;

    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

/// The gain a coherent receiver equalizes with: the scalar gain times the first fading tap.
Complex receiver_gain(const ChannelSpec& spec);

/// Seeded generator for noise and payload bits. Same seed, same stream.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Circularly-symmetric complex Gaussian sample with E|w|^2 = sigma2.
    Complex gaussian(double sigma2);

    /// Uniform bits in {0, 1}.
    void fill_bits(std::span<std::uint8_t> out);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

ComplexVec apply_awgn(std::span<const Complex> s, double sigma2, NoiseSource& noise);
ComplexVec apply_fading(std::span<const Complex> s, double rho);
ComplexVec apply_gain(std::span<const Complex> s, Complex h);
ComplexVec apply_phase_offset(std::span<const Complex> s, double psi);
ComplexVec apply_freq_offset(std::span<const Complex> s, double delta_f);

/// fading -> gain -> frequency offset -> phase offset -> AWGN.
///
/// The noise realization is drawn first and rotated together with the signal,
/// y = e^{j psi} (x + w). Since w is circularly symmetric, e^{j psi} w has the
/// same law as w, so this is the model y = e^{j psi} x + w with a coupled draw:
/// a fixed seed gives the same |y| for every psi.
ComplexVec run_chain(std::span<const Complex> s, const ChannelSpec& spec, NoiseSource& noise);

}  // namespace dmtdm

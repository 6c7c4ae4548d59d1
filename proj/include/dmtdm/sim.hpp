// Seeded Monte Carlo BER engine.
//
// A BER point draws payload bits, modulates, passes each symbol through the
// channel chain with noise calibrated from Eb/N0, detects and counts bit
// errors. Symbols are processed in fixed-size chunks; chunk c draws from its
// own generator seeded with derive_seed(point_seed, c), and chunks are merged
// in index order with the stop rule evaluated after each one. The result is
// therefore independent of how many workers computed the chunks.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmtdm/channel.hpp"
#include "dmtdm/modem.hpp"

namespace dmtdm {

inline constexpr double kTargetBer = 1e-3;

/// SplitMix64 finalizer applied to (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seed of one grid point: depends on lambda and the Eb/N0 value only, not
/// on the channel, so impaired and unimpaired runs share noise and payloads.
std::uint64_t point_seed(std::uint64_t seed, int lambda, double ebn0_db);

/// sigma_n^2 = P_s * M / (N_bits * 10^(Eb/N0 / 10)). +inf dB gives 0.
double noise_variance(double signal_power, std::size_t m, std::size_t bits_per_symbol,
                      double ebn0_db);

struct StopRule {
    std::uint64_t min_bit_errors = 200;
    std::uint64_t max_symbols = 10'000'000;
    void validate() const;
    friend bool operator==(const StopRule&, const StopRule&) = default;
};

struct RunOptions {
    unsigned workers = 1;
    std::uint64_t chunk_symbols = 256;
};

struct BerPointConfig {
    Scheme scheme = Scheme::dm_tdm_css;
    Detector detector = Detector::noncoherent;
    SpreadingFactor sf{8};
    double ebn0_db = 0.0;
    ChannelSpec channel;  // noise_sigma2 is overwritten per symbol
    StopRule stop;
    std::uint64_t seed = 0;
};

struct Interval {
    double low;
    double high;
};

/// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct BerRecord {
    Scheme scheme = Scheme::dm_tdm_css;
    Detector detector = Detector::noncoherent;
    int lambda = 0;
    double ebn0_db = 0.0;
    std::uint64_t symbols = 0;
    std::uint64_t bits_sent = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool max_symbols_reached = false;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;

    /// sqrt(ber * (1 - ber) / bits_sent).
    double standard_error() const;
    /// Everything except wall_seconds.
    bool same_outcome(const BerRecord& other) const;
};

BerRecord run_ber_point(const BerPointConfig& cfg, const RunOptions& opts = {});

struct SweepConfig {
    std::string name;
    Scheme scheme = Scheme::dm_tdm_css;
    Detector detector = Detector::noncoherent;
    std::vector<int> lambdas;
    std::vector<double> ebn0_grid_db;
    ChannelSpec channel;
    StopRule stop;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Records ordered by lambda (as listed), then by grid position.
std::vector<BerRecord> run_sweep(const SweepConfig& cfg, const RunOptions& opts = {});

/// Smallest Eb/N0 with BER <= target, interpolating log10(BER) linearly in dB
/// between the bracketing points. Records must share one curve and be sorted
/// by Eb/N0. Returns the first grid value when it already meets the target and
/// nullopt when no point does. Zero-error points count as 0.5 / bits_sent.
std::optional<double> required_ebn0_db(std::span<const BerRecord> curve,
                                       double target = kTargetBer);

struct SeEeSearch {
    double start_db = -2.0;
    double stop_db = 24.0;
    double coarse_step_db = 1.0;
    double fine_step_db = 0.25;
    double target_ber = kTargetBer;
};

struct SeEePoint {
    int lambda = 0;
    Rational se{0, 1};
    std::optional<double> required_ebn0_db;  // nullopt: target not reached inside the search range
    std::vector<BerRecord> probes;           // sorted by Eb/N0
};

/// For each lambda: coarse scan upward until BER <= target, then a fine grid
/// inside the bracketing step, then interpolation.
std::vector<SeEePoint> run_se_ee_curve(Scheme scheme, Detector detector,
                                       std::span<const int> lambdas, const ChannelSpec& channel,
                                       const StopRule& stop, std::uint64_t seed,
                                       const SeEeSearch& search = {},
                                       const RunOptions& opts = {});

struct Impairment {
    enum class Kind { phase_offset, freq_offset };
    Kind kind = Kind::phase_offset;
    double value = 0.0;  // radians or cycles per symbol

    ChannelSpec apply_to(ChannelSpec base) const;
};

std::string_view to_string(Impairment::Kind kind);

/// BER curve under AWGN with the impairment active.
std::vector<BerRecord> run_impairment_suite(Scheme scheme, Detector detector, SpreadingFactor sf,
                                            const Impairment& impairment,
                                            std::span<const double> ebn0_grid_db,
                                            const StopRule& stop, std::uint64_t seed,
                                            const RunOptions& opts = {});

/// Uniform grid start, start + step, ... up to and including stop (within 1e-9).
std::vector<double> make_grid(double start, double stop, double step);

}  // namespace dmtdm

#include "dmtdm/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>

namespace dmtdm {

namespace {

struct ChunkTally {
    std::uint64_t symbols = 0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
};

DetectionMode detection_mode(const BerPointConfig& cfg) {
    if (cfg.detector == Detector::coherent) {
        return DetectionMode::coherent(receiver_gain(cfg.channel));
    }
    return DetectionMode::noncoherent();
}

ChunkTally run_chunk(const BerPointConfig& cfg, const DetectionMode& mode, std::uint64_t chunk,
                     std::uint64_t count) {
    NoiseSource source(derive_seed(cfg.seed, chunk));
    const std::size_t nbits = bits_per_symbol(cfg.scheme, cfg.sf);
    const std::size_t m = cfg.sf.m();
    Bits payload(nbits);
    ChannelSpec spec = cfg.channel;
    ChunkTally tally;
    for (std::uint64_t i = 0; i < count; ++i) {
        source.fill_bits(payload);
        const auto s = modulate(map_bits(cfg.scheme, payload, cfg.sf), cfg.sf);
        spec.noise_sigma2 = noise_variance(mean_power(s), m, nbits, cfg.ebn0_db);
        const auto y = run_chain(s, spec, source);
        const auto decoded = demap_bits(detect(cfg.scheme, y, cfg.sf, mode), cfg.sf);
        for (std::size_t b = 0; b < nbits; ++b) {
            tally.errors += decoded[b] != payload[b];
        }
        tally.symbols += 1;
        tally.bits += nbits;
    }
    return tally;
}

double interpolation_ber(const BerRecord& r) {
    return r.bit_errors == 0 ? 0.5 / static_cast<double>(r.bits_sent) : r.ber;
}

double snap(double v) { return std::round(v * 1e9) / 1e9; }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t point_seed(std::uint64_t seed, int lambda, double ebn0_db) {
    const std::uint64_t by_lambda = derive_seed(seed, static_cast<std::uint64_t>(lambda));
    std::uint64_t stream = std::numeric_limits<std::uint64_t>::max();
    if (std::isfinite(ebn0_db)) {
        stream = static_cast<std::uint64_t>(std::llround(ebn0_db * 1e6));
    }
    return derive_seed(by_lambda, stream);
}

double noise_variance(double signal_power, std::size_t m, std::size_t bits_per_symbol,
                      double ebn0_db) {
    if (ebn0_db == std::numeric_limits<double>::infinity()) {
        return 0.0;
    }
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    const double sigma2 = signal_power * static_cast<double>(m) /
                          (static_cast<double>(bits_per_symbol) * ebn0);
    if (!std::isfinite(sigma2) || sigma2 < 0.0) {
        throw std::runtime_error("noise calibration failed: sigma^2 = " + std::to_string(sigma2) +
                                 " at Eb/N0 = " + std::to_string(ebn0_db) + " dB");
    }
    return sigma2;
}

void StopRule::validate() const {
    if (min_bit_errors == 0 || max_symbols == 0) {
        throw std::invalid_argument("stop rule bounds must be positive");
    }
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const auto n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double BerRecord::standard_error() const {
    if (bits_sent == 0) {
        return 0.0;
    }
    return std::sqrt(ber * (1.0 - ber) / static_cast<double>(bits_sent));
}

bool BerRecord::same_outcome(const BerRecord& o) const {
    return scheme == o.scheme && detector == o.detector && lambda == o.lambda &&
           ebn0_db == o.ebn0_db && symbols == o.symbols && bits_sent == o.bits_sent &&
           bit_errors == o.bit_errors && ber == o.ber && ci_low == o.ci_low &&
           ci_high == o.ci_high && max_symbols_reached == o.max_symbols_reached && seed == o.seed;
}

BerRecord run_ber_point(const BerPointConfig& cfg, const RunOptions& opts) {
    cfg.stop.validate();
    cfg.channel.validate();
    if (std::isnan(cfg.ebn0_db) || cfg.ebn0_db == -std::numeric_limits<double>::infinity()) {
        throw std::runtime_error("noise calibration failed: Eb/N0 must be finite or +inf");
    }
    const auto started = std::chrono::steady_clock::now();
    const DetectionMode mode = detection_mode(cfg);
    const std::uint64_t chunk_size = std::max<std::uint64_t>(1, opts.chunk_symbols);
    const std::uint64_t chunk_count = (cfg.stop.max_symbols + chunk_size - 1) / chunk_size;
    const unsigned workers = std::max(1U, opts.workers);

    auto chunk_len = [&](std::uint64_t c) {
        return std::min(chunk_size, cfg.stop.max_symbols - c * chunk_size);
    };

    ChunkTally total;
    bool done = false;
    for (std::uint64_t next = 0; next < chunk_count && !done;) {
        const std::uint64_t batch = std::min<std::uint64_t>(workers, chunk_count - next);
        std::vector<ChunkTally> results(batch);
        if (batch == 1) {
            results[0] = run_chunk(cfg, mode, next, chunk_len(next));
        } else {
            std::vector<std::future<ChunkTally>> futures;
            futures.reserve(batch);
            for (std::uint64_t i = 0; i < batch; ++i) {
                const std::uint64_t c = next + i;
                futures.push_back(std::async(std::launch::async, [&cfg, &mode, c, len = chunk_len(c)] {
                    return run_chunk(cfg, mode, c, len);
                }));
            }
            for (std::uint64_t i = 0; i < batch; ++i) {
                results[i] = futures[i].get();
            }
        }
        // Merge in chunk order; later chunks of the batch are dropped once the rule fires.
        for (const auto& r : results) {
            total.symbols += r.symbols;
            total.bits += r.bits;
            total.errors += r.errors;
            if (total.errors >= cfg.stop.min_bit_errors || total.symbols >= cfg.stop.max_symbols) {
                done = true;
                break;
            }
        }
        next += batch;
    }

    BerRecord rec;
    rec.scheme = cfg.scheme;
    rec.detector = cfg.detector;
    rec.lambda = cfg.sf.lambda();
    rec.ebn0_db = cfg.ebn0_db;
    rec.symbols = total.symbols;
    rec.bits_sent = total.bits;
    rec.bit_errors = total.errors;
    rec.ber = static_cast<double>(total.errors) / static_cast<double>(total.bits);
    const auto ci = wilson_interval(total.errors, total.bits);
    rec.ci_low = ci.low;
    rec.ci_high = ci.high;
    rec.max_symbols_reached = total.errors < cfg.stop.min_bit_errors;
    rec.seed = cfg.seed;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

void SweepConfig::validate() const {
    if (lambdas.empty()) {
        throw std::invalid_argument("sweep '" + name + "': lambda list is empty");
    }
    if (ebn0_grid_db.empty()) {
        throw std::invalid_argument("sweep '" + name + "': Eb/N0 grid is empty");
    }
    for (int l : lambdas) {
        SpreadingFactor{l};
    }
    for (double e : ebn0_grid_db) {
        if (std::isnan(e) || e == -std::numeric_limits<double>::infinity()) {
            throw std::invalid_argument("sweep '" + name + "': Eb/N0 values must be finite or +inf");
        }
    }
    stop.validate();
    channel.validate();
}

std::vector<BerRecord> run_sweep(const SweepConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    std::vector<BerRecord> out;
    out.reserve(cfg.lambdas.size() * cfg.ebn0_grid_db.size());
    for (int lambda : cfg.lambdas) {
        for (double ebn0 : cfg.ebn0_grid_db) {
            BerPointConfig point;
            point.scheme = cfg.scheme;
            point.detector = cfg.detector;
            point.sf = SpreadingFactor{lambda};
            point.ebn0_db = ebn0;
            point.channel = cfg.channel;
            point.stop = cfg.stop;
            point.seed = point_seed(cfg.seed, lambda, ebn0);
            out.push_back(run_ber_point(point, opts));
        }
    }
    return out;
}

std::optional<double> required_ebn0_db(std::span<const BerRecord> curve, double target) {
    for (std::size_t j = 0; j < curve.size(); ++j) {
        if (curve[j].ber > target) {
            continue;
        }
        if (j == 0) {
            return curve[0].ebn0_db;
        }
        const auto& lo = curve[j - 1];
        const auto& hi = curve[j];
        const double y0 = std::log10(interpolation_ber(lo));
        const double y1 = std::log10(interpolation_ber(hi));
        const double yt = std::log10(target);
        if (y0 == y1) {
            return hi.ebn0_db;
        }
        const double t = (y0 - yt) / (y0 - y1);
        return lo.ebn0_db + t * (hi.ebn0_db - lo.ebn0_db);
    }
    return std::nullopt;
}

std::vector<SeEePoint> run_se_ee_curve(Scheme scheme, Detector detector,
                                       std::span<const int> lambdas, const ChannelSpec& channel,
                                       const StopRule& stop, std::uint64_t seed,
                                       const SeEeSearch& search, const RunOptions& opts) {
    if (lambdas.empty()) {
        throw std::invalid_argument("SE/EE curve: lambda range is empty");
    }
    if (!(search.coarse_step_db > 0.0) || !(search.fine_step_db > 0.0) ||
        !(search.stop_db >= search.start_db)) {
        throw std::invalid_argument("SE/EE curve: invalid search range");
    }
    std::vector<SeEePoint> out;
    for (int lambda : lambdas) {
        const SpreadingFactor sf{lambda};
        SeEePoint point;
        point.lambda = lambda;
        point.se = spectral_efficiency(scheme, sf);

        auto probe = [&](double ebn0) {
            BerPointConfig cfg;
            cfg.scheme = scheme;
            cfg.detector = detector;
            cfg.sf = sf;
            cfg.ebn0_db = ebn0;
            cfg.channel = channel;
            cfg.stop = stop;
            cfg.seed = point_seed(seed, lambda, ebn0);
            return run_ber_point(cfg, opts);
        };

        std::optional<double> bracket_lo;
        bool reached = false;
        for (const double e : make_grid(search.start_db, search.stop_db, search.coarse_step_db)) {
            point.probes.push_back(probe(e));
            if (point.probes.back().ber <= search.target_ber) {
                reached = true;
                break;
            }
            bracket_lo = e;
        }
        if (reached && bracket_lo) {
            const double hi = point.probes.back().ebn0_db;
            for (double e = snap(*bracket_lo + search.fine_step_db); e < hi - 1e-9;
                 e = snap(e + search.fine_step_db)) {
                point.probes.push_back(probe(e));
            }
        }
        std::sort(point.probes.begin(), point.probes.end(),
                  [](const BerRecord& a, const BerRecord& b) { return a.ebn0_db < b.ebn0_db; });
        if (reached) {
            point.required_ebn0_db = required_ebn0_db(point.probes, search.target_ber);
        }
        out.push_back(std::move(point));
    }
    return out;
}

ChannelSpec Impairment::apply_to(ChannelSpec base) const {
    if (kind == Kind::phase_offset) {
        base.phase_offset = value;
    } else {
        base.freq_offset = value;
    }
    return base;
}

std::string_view to_string(Impairment::Kind kind) {
    return kind == Impairment::Kind::phase_offset ? "phase-offset" : "freq-offset";
}

std::vector<BerRecord> run_impairment_suite(Scheme scheme, Detector detector, SpreadingFactor sf,
                                            const Impairment& impairment,
                                            std::span<const double> ebn0_grid_db,
                                            const StopRule& stop, std::uint64_t seed,
                                            const RunOptions& opts) {
    SweepConfig cfg;
    cfg.name = std::string(to_string(impairment.kind));
    cfg.scheme = scheme;
    cfg.detector = detector;
    cfg.lambdas = {sf.lambda()};
    cfg.ebn0_grid_db.assign(ebn0_grid_db.begin(), ebn0_grid_db.end());
    cfg.channel = impairment.apply_to(ChannelSpec{});
    cfg.stop = stop;
    cfg.seed = seed;
    return run_sweep(cfg, opts);
}

std::vector<double> make_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) || stop < start) {
        throw std::invalid_argument("invalid grid specification");
    }
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double v = snap(start + static_cast<double>(i) * step);
        if (v > stop + 1e-9) {
            break;
        }
        grid.push_back(v);
    }
    return grid;
}

}  // namespace dmtdm

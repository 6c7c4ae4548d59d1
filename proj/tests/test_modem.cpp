#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dmtdm/modem.hpp"
#include "oracle.hpp"

using namespace dmtdm;

namespace {

Bits ones(std::size_t n) { return Bits(n, 1); }

ComplexVec scaled(const ComplexVec& y, Complex c) {
    ComplexVec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = c * y[i];
    }
    return out;
}

SymbolIndices random_symbol(Scheme scheme, SpreadingFactor sf, std::mt19937_64& rng) {
    return map_bits(scheme, oracle::random_bits(rng, bits_per_symbol(scheme, sf)), sf);
}

}  // namespace

TEST_CASE("names and spreading factors") {
    CHECK(parse_scheme("dm-tdm-css") == Scheme::dm_tdm_css);
    CHECK(parse_scheme("tdm-css") == Scheme::tdm_css);
    CHECK(parse_scheme("lora") == Scheme::lora);
    CHECK(to_string(Scheme::dm_tdm_css) == "dm-tdm-css");
    CHECK(parse_detector("coherent") == Detector::coherent);
    CHECK(to_string(Detector::noncoherent) == "noncoherent");
    CHECK_THROWS_AS(parse_scheme("css"), std::invalid_argument);
    CHECK_THROWS_AS(parse_detector("optimal"), std::invalid_argument);
    CHECK_THROWS_AS(SpreadingFactor(5), std::invalid_argument);
    CHECK_THROWS_AS(SpreadingFactor(13), std::invalid_argument);
    CHECK(SpreadingFactor(9).m() == 512);
}

TEST_CASE("bits per symbol and spectral efficiency") {
    for (int lambda = 6; lambda <= 12; ++lambda) {
        const SpreadingFactor sf(lambda);
        const auto l = static_cast<std::size_t>(lambda);
        CHECK(bits_per_symbol(Scheme::lora, sf) == l);
        CHECK(bits_per_symbol(Scheme::tdm_css, sf) == 2 * l);
        CHECK(bits_per_symbol(Scheme::dm_tdm_css, sf) == 4 * l - 4);
    }
    const SpreadingFactor sf8(8);
    CHECK(spectral_efficiency(Scheme::dm_tdm_css, sf8) == Rational{28, 256});
    CHECK(spectral_efficiency(Scheme::dm_tdm_css, sf8).normalized().num == 7);
    CHECK(spectral_efficiency(Scheme::dm_tdm_css, sf8).normalized().den == 64);
    CHECK(spectral_efficiency(Scheme::dm_tdm_css, sf8).value() == 0.109375);
    CHECK(spectral_efficiency(Scheme::lora, sf8).value() == 0.03125);
    CHECK(spectral_efficiency(Scheme::tdm_css, sf8).value() == 0.0625);
}

TEST_CASE("dm-tdm-css bit mapping") {
    const SpreadingFactor sf6(6);
    CHECK(map_bits_dmtdm(Bits(20, 0), sf6) == DmTdmIndices{0, 0, 0, 0});
    CHECK(map_bits_dmtdm(ones(20), sf6) == DmTdmIndices{31, 31, 31, 31});
    CHECK(demap_bits(DmTdmIndices{0, 0, 0, 0}, sf6) == Bits(20, 0));
    CHECK(demap_bits(DmTdmIndices{31, 31, 31, 31}, sf6) == ones(20));
    CHECK_THROWS_AS(map_bits_dmtdm(Bits(19, 0), sf6), std::invalid_argument);
    CHECK_THROWS_AS(map_bits_dmtdm(Bits(20, 2), sf6), std::invalid_argument);

    // lambda = 8: blocks of 7 bits, MSB first.
    const SpreadingFactor sf8(8);
    Bits b;
    for (std::uint32_t v : {5u, 12u, 0u, 127u}) {
        for (int i = 6; i >= 0; --i) {
            b.push_back(static_cast<std::uint8_t>((v >> i) & 1u));
        }
    }
    const auto idx = map_bits_dmtdm(b, sf8);
    CHECK(idx == DmTdmIndices{5, 12, 0, 127});
    CHECK(even_tone(idx.even_up) == 10);
    CHECK(odd_tone(idx.odd_up) == 25);
    CHECK(even_tone(idx.even_down) == 0);
    CHECK(odd_tone(idx.odd_down) == 255);
}

TEST_CASE("map and demap are inverse for every scheme") {
    std::mt19937_64 rng(21);
    for (auto scheme : {Scheme::lora, Scheme::tdm_css, Scheme::dm_tdm_css}) {
        for (int lambda : {6, 9, 12}) {
            const SpreadingFactor sf(lambda);
            for (int t = 0; t < 1000; ++t) {
                const auto bits = oracle::random_bits(rng, bits_per_symbol(scheme, sf));
                const auto idx = map_bits(scheme, bits, sf);
                CHECK(scheme_of(idx) == scheme);
                REQUIRE(demap_bits(idx, sf) == bits);
            }
        }
    }
}

TEST_CASE("index validation") {
    const SpreadingFactor sf(6);
    CHECK_THROWS_AS(validate(DmTdmIndices{32, 0, 0, 0}, sf), std::invalid_argument);
    CHECK_THROWS_AS(validate(DmTdmIndices{0, 0, 0, 32}, sf), std::invalid_argument);
    CHECK_THROWS_AS(validate(LoRaIndex{64}, sf), std::invalid_argument);
    CHECK_THROWS_AS(validate(TdmIndices{0, 64}, sf), std::invalid_argument);
    CHECK_THROWS_AS(modulate_dmtdm(DmTdmIndices{0, 40, 0, 0}, sf), std::invalid_argument);
    CHECK_THROWS_AS(modulate_lora(LoRaIndex{64}, sf), std::invalid_argument);
    CHECK_NOTHROW(validate(DmTdmIndices{31, 31, 31, 31}, sf));
}

TEST_CASE("dm-tdm-css waveform") {
    std::mt19937_64 rng(5);
    for (int lambda : {6, 8, 10}) {
        const SpreadingFactor sf(lambda);
        const std::size_t m = sf.m();
        for (int t = 0; t < 20; ++t) {
            const auto idx = oracle::random_indices(rng, m);
            const auto s = modulate_dmtdm(idx, sf);
            CHECK(s[0] == Complex{4.0, 0.0});
            const auto ref = oracle::narrow(oracle::dmtdm_symbol(idx, m));
            CHECK(oracle::max_abs_diff(s, ref) < 1e-12);

            // Construction from the signal-core primitives.
            const auto up = make_chirp(m, Slope::up);
            const auto down = make_chirp(m, Slope::down);
            const auto a = multiply(make_tone(m, 2 * idx.even_up), up);
            const auto b = multiply(make_tone(m, 2 * idx.odd_up + 1), up);
            const auto c = multiply(make_tone(m, 2 * idx.even_down), down);
            const auto d = multiply(make_tone(m, 2 * idx.odd_down + 1), down);
            double worst = 0.0;
            for (std::size_t n = 0; n < m; ++n) {
                worst = std::max(worst, std::abs(s[n] - (a[n] + b[n] + c[n] + d[n])));
            }
            CHECK(worst < 1e-12);
        }
    }
}

TEST_CASE("dm-tdm-css average symbol energy is about four") {
    std::mt19937_64 rng(99);
    const SpreadingFactor sf(8);
    double acc = 0.0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        acc += mean_power(modulate_dmtdm(oracle::random_indices(rng, sf.m()), sf));
    }
    CHECK(std::abs(acc / trials - 4.0) < 0.1);
}

TEST_CASE("lora waveform") {
    const SpreadingFactor sf(6);
    const auto c0 = modulate_lora(LoRaIndex{0}, sf);
    CHECK(oracle::max_abs_diff(c0, make_chirp(64, Slope::up)) < 1e-15);
    const auto s = modulate_lora(LoRaIndex{32}, sf);
    CHECK(std::abs(s[1] - oracle::to_double(oracle::expj_pi(65, 64))) < 1e-14);
    for (std::uint32_t k : {0u, 3u, 31u, 63u}) {
        const auto spec = dft(dechirp(modulate_lora(LoRaIndex{k}, sf), Slope::down));
        std::size_t best = 0;
        for (std::size_t b = 1; b < 64; ++b) {
            if (std::abs(spec[b]) > std::abs(spec[best])) {
                best = b;
            }
        }
        CHECK(best == k);
        CHECK(std::abs(std::abs(spec[k]) - 64.0) < 1e-9);
        CHECK(oracle::max_abs_diff(dechirp(modulate_lora(LoRaIndex{k}, sf), Slope::down),
                                   make_tone(64, k)) < 1e-12);
    }
}

TEST_CASE("tdm-css waveform") {
    const SpreadingFactor sf(7);
    const std::size_t m = sf.m();
    const auto zero = modulate_tdm(TdmIndices{0, 0}, sf);
    CHECK(zero[0] == Complex{2.0, 0.0});
    for (std::size_t n = 0; n < m; ++n) {
        const double expect = 2.0 * std::cos(std::numbers::pi * static_cast<double>(n * n) / m);
        CHECK(std::abs(zero[n] - Complex{expect, 0.0}) < 1e-12);
    }
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(m - 1));
    for (int t = 0; t < 20; ++t) {
        const TdmIndices idx{d(rng), d(rng)};
        const auto s = modulate_tdm(idx, sf);
        CHECK(oracle::max_abs_diff(s, oracle::narrow(oracle::tdm_symbol(idx.up, idx.down, m))) <
              1e-12);
        const auto bin = dft(dechirp(s, Slope::down))[idx.up];
        // The opposite-slope cross term has magnitude sqrt(2M) for an even index
        // difference and vanishes for an odd one.
        CHECK(std::abs(bin - Complex{static_cast<double>(m), 0.0}) <= std::sqrt(2.0 * m) + 1e-9);
        const auto ref_bin =
            oracle::dft_bin(oracle::multiply(oracle::widen(s), oracle::chirp(m, -1)), idx.up);
        CHECK(std::abs(bin - oracle::to_double(ref_bin)) < 1e-9 * m);
    }
}

TEST_CASE("dechirp identities") {
    const std::size_t m = 64;
    CHECK(oracle::max_abs_diff(dechirp(make_chirp(m, Slope::up), Slope::down),
                               ComplexVec(m, Complex{1.0, 0.0})) < 1e-15);
    std::mt19937_64 rng(4);
    const auto y = oracle::random_vector(rng, m);
    CHECK(oracle::max_abs_diff(dechirp(dechirp(y, Slope::up), Slope::down), y) < 1e-12);
    CHECK_THROWS_AS(dechirp(ComplexVec(100), Slope::up), std::invalid_argument);
}

TEST_CASE("noiseless round trips, every scheme, detector and lambda") {
    std::mt19937_64 rng(2024);
    for (int lambda = 6; lambda <= 12; ++lambda) {
        const SpreadingFactor sf(lambda);
        const int draws = lambda <= 10 ? 100 : 30;
        for (auto scheme : {Scheme::lora, Scheme::tdm_css, Scheme::dm_tdm_css}) {
            for (int t = 0; t < draws; ++t) {
                const auto idx = random_symbol(scheme, sf, rng);
                const auto s = modulate(idx, sf);
                REQUIRE(detect(scheme, s, sf, DetectionMode::coherent({1.0, 0.0})) == idx);
                REQUIRE(detect(scheme, s, sf, DetectionMode::noncoherent()) == idx);
            }
        }
    }
}

TEST_CASE("coherent detection with a known complex gain") {
    std::mt19937_64 rng(31);
    const Complex h = std::polar(1.0, std::numbers::pi / 6);
    for (int lambda : {6, 9}) {
        const SpreadingFactor sf(lambda);
        for (int t = 0; t < 50; ++t) {
            const auto idx = oracle::random_indices(rng, sf.m());
            const auto y = scaled(modulate_dmtdm(idx, sf), h);
            CHECK(detect_dmtdm_coherent(y, h, sf) == idx);
            // (y, h) -> (c*y, c*h) leaves the decision unchanged.
            const Complex c{-0.4, 2.5};
            CHECK(detect_dmtdm_coherent(scaled(y, c), c * h, sf) == idx);
        }
    }
    CHECK_THROWS_AS(DetectionMode::coherent({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(detect_dmtdm_coherent(ComplexVec(64), {0.0, 0.0}, SpreadingFactor(6)),
                    std::invalid_argument);
    CHECK_THROWS_AS(detect_lora(ComplexVec(64), SpreadingFactor(6),
                                DetectionMode::coherent({std::nan(""), 0.0})),
                    std::invalid_argument);
}

TEST_CASE("non-coherent detection ignores complex scaling") {
    std::mt19937_64 rng(32);
    const SpreadingFactor sf(8);
    for (int t = 0; t < 50; ++t) {
        const auto idx = oracle::random_indices(rng, sf.m());
        const auto y = modulate_dmtdm(idx, sf);
        CHECK(detect_dmtdm_noncoherent(scaled(y, std::polar(0.3, 2.0)), sf) == idx);
        CHECK(detect_dmtdm_noncoherent(scaled(y, std::polar(1.0, 0.7)), sf) == idx);
    }
    // On noisy input the decision is unchanged by scaling too.
    for (int t = 0; t < 50; ++t) {
        auto y = modulate_dmtdm(oracle::random_indices(rng, sf.m()), sf);
        const auto w = oracle::random_vector(rng, sf.m());
        for (std::size_t n = 0; n < y.size(); ++n) {
            y[n] += 3.0 * w[n];
        }
        const auto base = detect_dmtdm_noncoherent(y, sf);
        CHECK(detect_dmtdm_noncoherent(scaled(y, std::polar(1.0, 1.234)), sf) == base);
        CHECK(detect_dmtdm_noncoherent(scaled(y, Complex{0.0, 7.0}), sf) == base);
    }
}

TEST_CASE("pure noise still yields valid indices") {
    std::mt19937_64 rng(12);
    const SpreadingFactor sf(7);
    for (int t = 0; t < 20; ++t) {
        auto y = oracle::random_vector(rng, sf.m());
        for (auto& v : y) {
            v *= 1e6;
        }
        const auto c = detect_dmtdm_coherent(y, {1.0, 0.0}, sf);
        const auto n = detect_dmtdm_noncoherent(y, sf);
        CHECK_NOTHROW(validate(c, sf));
        CHECK_NOTHROW(validate(n, sf));
    }
}

TEST_CASE("parity separation at lambda 6") {
    std::mt19937_64 rng(606);
    const SpreadingFactor sf(6);
    const std::size_t m = sf.m();
    for (int t = 0; t < 10000; ++t) {
        const auto idx = oracle::random_indices(rng, m);
        const auto s = modulate_dmtdm(idx, sf);
        const auto r1 = dft(dechirp(s, Slope::down));
        const auto r2 = dft(dechirp(s, Slope::up));
        auto argmax = [&](const ComplexVec& r, std::size_t parity) {
            std::size_t best = parity;
            for (std::size_t b = parity; b < m; b += 2) {
                if (std::abs(r[b]) > std::abs(r[best])) {
                    best = b;
                }
            }
            return best;
        };
        REQUIRE(argmax(r1, 0) == 2 * idx.even_up);
        REQUIRE(argmax(r1, 1) == 2 * idx.odd_up + 1);
        REQUIRE(argmax(r2, 0) == 2 * idx.even_down);
        REQUIRE(argmax(r2, 1) == 2 * idx.odd_down + 1);
    }
}

TEST_CASE("lora detection") {
    const SpreadingFactor sf(7);
    for (std::uint32_t k = 0; k < sf.m(); ++k) {
        const auto s = modulate_lora(LoRaIndex{k}, sf);
        CHECK(detect_lora(s, sf, DetectionMode::noncoherent()) == LoRaIndex{k});
        CHECK(detect_lora(s, sf, DetectionMode::coherent({1.0, 0.0})) == LoRaIndex{k});
        CHECK(detect_lora(scaled(s, std::polar(1.0, 2.2)), sf, DetectionMode::noncoherent()) ==
              LoRaIndex{k});
    }
    // A tone at dechirped bin 1 with amplitude below M must not win over bin 0.
    auto y = modulate_lora(LoRaIndex{0}, sf);
    const auto extra = multiply(make_tone(sf.m(), 1), make_chirp(sf.m(), Slope::up));
    for (std::size_t n = 0; n < y.size(); ++n) {
        y[n] += 0.9 * extra[n];
    }
    const auto spec = oracle::dft(oracle::multiply(oracle::widen(y), oracle::chirp(sf.m(), -1)));
    REQUIRE(std::abs(spec[0]) > std::abs(spec[1]));
    CHECK(detect_lora(y, sf, DetectionMode::noncoherent()) == LoRaIndex{0});
}

TEST_CASE("tdm-css detection") {
    std::mt19937_64 rng(77);
    const SpreadingFactor sf(8);
    std::uniform_int_distribution<std::uint32_t> d(0, 255);
    for (int t = 0; t < 100; ++t) {
        const TdmIndices idx{d(rng), d(rng)};
        const auto s = modulate_tdm(idx, sf);
        CHECK(detect_tdm(s, sf, DetectionMode::coherent({1.0, 0.0})) == idx);
        CHECK(detect_tdm(scaled(s, std::polar(1.0, -0.9)), sf, DetectionMode::noncoherent()) == idx);
    }
    // The up-chirp decision does not depend on the down-chirp index (exhaustive at lambda 6).
    const SpreadingFactor sf6(6);
    for (std::uint32_t up = 0; up < 64; ++up) {
        for (std::uint32_t down = 0; down < 64; ++down) {
            const auto got = detect_tdm(modulate_tdm(TdmIndices{up, down}, sf6), sf6,
                                        DetectionMode::noncoherent());
            REQUIRE(got.up == up);
            REQUIRE(got.down == down);
        }
    }
}

TEST_CASE("argmax ties resolve to the smallest bin") {
    const SpreadingFactor sf(6);
    // All-zero input: every statistic ties at zero.
    const ComplexVec zero(64, Complex{0.0, 0.0});
    CHECK(detect_dmtdm_noncoherent(zero, sf) == DmTdmIndices{0, 0, 0, 0});
    CHECK(detect_lora(zero, sf, DetectionMode::noncoherent()) == LoRaIndex{0});
    CHECK(detect_tdm(zero, sf, DetectionMode::coherent({1.0, 0.0})) == TdmIndices{0, 0});
}

TEST_CASE("inspect reports the detector's decisions") {
    std::mt19937_64 rng(55);
    const SpreadingFactor sf(8);
    const auto idx = oracle::random_indices(rng, sf.m());
    const auto s = modulate_dmtdm(idx, sf);
    const auto rep = inspect(Scheme::dm_tdm_css, s, sf, DetectionMode::noncoherent());
    REQUIRE(rep.size() == 4);
    CHECK(rep[0].label == "R1/even");
    CHECK(rep[0].bin == 2 * idx.even_up);
    CHECK(rep[1].bin == 2 * idx.odd_up + 1);
    CHECK(rep[2].label == "R2/even");
    CHECK(rep[2].bin == 2 * idx.even_down);
    CHECK(rep[3].bin == 2 * idx.odd_down + 1);
    for (const auto& b : rep) {
        CHECK(b.margin() > 0.0);
        CHECK(b.magnitude == doctest::Approx(b.statistic));
    }
    CHECK(inspect(Scheme::lora, modulate_lora(LoRaIndex{9}, sf), sf, DetectionMode::noncoherent())
              .size() == 1);
    CHECK(inspect(Scheme::tdm_css, modulate_tdm(TdmIndices{1, 2}, sf), sf,
                  DetectionMode::noncoherent())
              .size() == 2);
}

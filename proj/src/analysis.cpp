#include "dmtdm/analysis.hpp"

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>

namespace dmtdm {

namespace {

std::int64_t i64(std::uint32_t v) { return static_cast<std::int64_t>(v); }

// exp{+-j*pi/(2M) * d^2}
Complex quadratic_phase(std::int64_t d, std::size_t m, int sign) {
    return half_turn_phasor(sign * d * d, 2 * static_cast<std::int64_t>(m));
}

// The two-term reciprocal sum for a = +-2, c = M is 1 + exp{-+j*pi/2*(2d + M)}.
// For M a multiple of four and even d it equals 2; for odd d it cancels.
void require_full_beta(std::int64_t d, std::size_t m) {
    const Complex beta_term = half_turn_phasor(2 * d + static_cast<std::int64_t>(m), 2);
    if (std::abs(beta_term - Complex{1.0, 0.0}) > 1e-12) {
        throw std::logic_error("parity condition exp{j*pi/2*(M + 2d)} = 1 failed for d = " +
                               std::to_string(d) + ", M = " + std::to_string(m));
    }
}

ComplexVec chirped_tone(std::size_t m, std::size_t k, Slope slope) {
    return multiply(make_tone(m, k), make_chirp(m, slope));
}

}  // namespace

bool satisfies_reciprocity_precondition(const GaussSumParams& p) {
    return p.a != 0 && p.c != 0 && ((p.a * p.c + p.b) % 2 == 0);
}

Complex gauss_sum_direct(const GaussSumParams& p) {
    if (p.c == 0) {
        throw std::invalid_argument("gauss_sum_direct: c must be nonzero");
    }
    Complex acc{0.0, 0.0};
    const std::int64_t terms = std::llabs(p.c);
    for (std::int64_t n = 0; n < terms; ++n) {
        acc += half_turn_phasor(p.b * n + p.a * n * n, p.c);
    }
    return acc;
}

Complex gauss_sum_reciprocal(const GaussSumParams& p) {
    if (!satisfies_reciprocity_precondition(p)) {
        throw std::invalid_argument("gauss_sum_reciprocal: need a*c != 0 and a*c + b even (a=" +
                                    std::to_string(p.a) + ", b=" + std::to_string(p.b) +
                                    ", c=" + std::to_string(p.c) + ")");
    }
    const std::int64_t ac = p.a * p.c;
    const double scale = std::sqrt(std::fabs(static_cast<double>(p.c) / static_cast<double>(p.a)));
    const Complex prefactor = half_turn_phasor(std::llabs(ac) - p.b * p.b, 4 * ac);
    Complex acc{0.0, 0.0};
    const std::int64_t terms = std::llabs(p.a);
    for (std::int64_t n = 0; n < terms; ++n) {
        acc += half_turn_phasor(-(p.b * n + p.c * n * n), p.a);
    }
    return scale * prefactor * acc;
}

Complex interference_alpha(std::size_t m) {
    return 2.0 * std::sqrt(static_cast<double>(m) / 2.0) * half_turn_phasor(1, 4);
}

Complex symbol_inner_product_closed(const DmTdmIndices& a, const DmTdmIndices& b,
                                    SpreadingFactor sf) {
    validate(a, sf);
    validate(b, sf);
    const std::size_t m = sf.m();
    const Complex alpha = interference_alpha(m);
    const std::int64_t k1 = i64(even_tone(a.even_up)) - i64(even_tone(b.even_down));
    const std::int64_t k2 = i64(odd_tone(a.odd_up)) - i64(odd_tone(b.odd_down));
    const std::int64_t k3 = i64(even_tone(a.even_down)) - i64(even_tone(b.even_up));
    const std::int64_t k4 = i64(odd_tone(a.odd_down)) - i64(odd_tone(b.odd_up));
    const Complex theta1 = quadratic_phase(k1, m, -1);
    const Complex theta2 = quadratic_phase(k2, m, -1);
    const Complex theta3 = quadratic_phase(k3, m, +1);
    const Complex theta4 = quadratic_phase(k4, m, +1);
    return alpha * (theta1 + theta2) + std::conj(alpha) * (theta3 + theta4);
}

Complex symbol_inner_product_full(const DmTdmIndices& a, const DmTdmIndices& b,
                                  SpreadingFactor sf) {
    const auto m = static_cast<double>(sf.m());
    int coincident = 0;
    coincident += a.even_up == b.even_up;
    coincident += a.odd_up == b.odd_up;
    coincident += a.even_down == b.even_down;
    coincident += a.odd_down == b.odd_down;
    return symbol_inner_product_closed(a, b, sf) + m * coincident;
}

InterferenceReport interference_at_bin(const DmTdmIndices& idx, Branch branch, Parity parity,
                                       SpreadingFactor sf, double sigma2) {
    validate(idx, sf);
    const std::size_t m = sf.m();
    const Complex alpha = interference_alpha(m);
    const bool even = parity == Parity::even;

    const std::int64_t up_tone = even ? even_tone(idx.even_up) : odd_tone(idx.odd_up);
    const std::int64_t down_tone = even ? even_tone(idx.even_down) : odd_tone(idx.odd_down);

    InterferenceReport r;
    r.signal_mag = static_cast<double>(m);
    if (branch == Branch::r1) {
        const std::int64_t d = down_tone - up_tone;
        require_full_beta(d, m);
        r.bin = static_cast<std::size_t>(up_tone);
        r.interference = std::conj(alpha) * quadratic_phase(d, m, +1);
    } else {
        const std::int64_t d = up_tone - down_tone;
        require_full_beta(d, m);
        r.bin = static_cast<std::size_t>(down_tone);
        r.interference = alpha * quadratic_phase(d, m, -1);
    }
    r.interference_mag = std::abs(r.interference);
    r.sir_linear = r.signal_mag * r.signal_mag / (r.interference_mag * r.interference_mag);
    r.sinr_linear = sinr(sf, sigma2);
    return r;
}

double sir(SpreadingFactor sf) { return static_cast<double>(sf.m()) / 2.0; }

double sinr(SpreadingFactor sf, double sigma2) {
    if (!std::isfinite(sigma2) || sigma2 < 0.0) {
        throw std::invalid_argument("sinr: noise variance must be finite and >= 0");
    }
    const auto m = static_cast<double>(sf.m());
    return m / (2.0 + sigma2 / m);
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

OracleResiduals run_oracle_checks(SpreadingFactor sf, std::size_t trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t m = sf.m();
    const auto md = static_cast<double>(m);
    std::uniform_int_distribution<std::uint32_t> half(0, static_cast<std::uint32_t>(m / 2 - 1));
    std::uniform_int_distribution<std::int64_t> small(-64, 64);
    std::uniform_int_distribution<std::int64_t> wide(-4 * static_cast<std::int64_t>(m),
                                                     4 * static_cast<std::int64_t>(m));
    auto draw = [&] {
        return DmTdmIndices{half(rng), half(rng), half(rng), half(rng)};
    };

    OracleResiduals r;
    r.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        GaussSumParams p;
        do {
            p.a = small(rng);
        } while (p.a == 0);
        if (t % 2 == 0) {
            do {
                p.c = small(rng);
            } while (p.c == 0);
        } else {
            p.c = (t % 4 == 1) ? static_cast<std::int64_t>(m) : -static_cast<std::int64_t>(m);
        }
        p.b = wide(rng);
        if ((p.a * p.c + p.b) % 2 != 0) {
            p.b += 1;
        }
        const double scale = static_cast<double>(std::llabs(p.c));
        r.gauss_sum = std::max(r.gauss_sum,
                               std::abs(gauss_sum_reciprocal(p) - gauss_sum_direct(p)) / scale);

        const auto a = draw();
        const auto b = draw();
        const Complex brute = inner_product(modulate_dmtdm(a, sf), modulate_dmtdm(b, sf));
        r.inner_product =
            std::max(r.inner_product, std::abs(symbol_inner_product_full(a, b, sf) - brute) / md);

        const auto s = modulate_dmtdm(a, sf);
        const auto r1 = dft(dechirp(s, Slope::down));
        const auto r2 = dft(dechirp(s, Slope::up));
        for (auto branch : {Branch::r1, Branch::r2}) {
            for (auto parity : {Parity::even, Parity::odd}) {
                const auto rep = interference_at_bin(a, branch, parity, sf);
                const auto& spectrum = branch == Branch::r1 ? r1 : r2;
                r.interference = std::max(
                    r.interference, std::abs(rep.noiseless_bin() - spectrum[rep.bin]) / md);
            }
        }

        // Remove the other chirp's opposite-parity tone; the activated bins must not move.
        ComplexVec without_odd_down(m, Complex{0.0, 0.0});
        ComplexVec without_even_down(m, Complex{0.0, 0.0});
        ComplexVec without_odd_up(m, Complex{0.0, 0.0});
        ComplexVec without_even_up(m, Complex{0.0, 0.0});
        const auto eu = chirped_tone(m, even_tone(a.even_up), Slope::up);
        const auto ou = chirped_tone(m, odd_tone(a.odd_up), Slope::up);
        const auto ed = chirped_tone(m, even_tone(a.even_down), Slope::down);
        const auto od = chirped_tone(m, odd_tone(a.odd_down), Slope::down);
        for (std::size_t n = 0; n < m; ++n) {
            without_odd_down[n] = eu[n] + ou[n] + ed[n];
            without_even_down[n] = eu[n] + ou[n] + od[n];
            without_odd_up[n] = eu[n] + ed[n] + od[n];
            without_even_up[n] = ou[n] + ed[n] + od[n];
        }
        const auto r1_no_od = dft(dechirp(without_odd_down, Slope::down));
        const auto r1_no_ed = dft(dechirp(without_even_down, Slope::down));
        const auto r2_no_ou = dft(dechirp(without_odd_up, Slope::up));
        const auto r2_no_eu = dft(dechirp(without_even_up, Slope::up));
        const std::size_t be1 = even_tone(a.even_up);
        const std::size_t bo1 = odd_tone(a.odd_up);
        const std::size_t be2 = even_tone(a.even_down);
        const std::size_t bo2 = odd_tone(a.odd_down);
        const double change = std::max({std::abs(r1[be1] - r1_no_od[be1]),
                                        std::abs(r1[bo1] - r1_no_ed[bo1]),
                                        std::abs(r2[be2] - r2_no_ou[be2]),
                                        std::abs(r2[bo2] - r2_no_eu[bo2])});
        r.cross_parity = std::max(r.cross_parity, change / md);
    }
    return r;
}

}  // namespace dmtdm

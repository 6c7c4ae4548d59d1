// Reference evaluations used only by the tests: plain std::exp on long double
// phases and O(M^2) sums, no lookup tables and no FFT.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "dmtdm/modem.hpp"

namespace oracle {

using LComplex = std::complex<long double>;
using dmtdm::Complex;
using dmtdm::ComplexVec;

inline constexpr long double kPi = std::numbers::pi_v<long double>;

// exp{j*pi*num/den}, with num reduced modulo 2*den in integer arithmetic first.
inline LComplex expj_pi(std::int64_t num, std::int64_t den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t period = 2 * den;
    num %= period;
    if (num < 0) {
        num += period;
    }
    const long double phi = kPi * static_cast<long double>(num) / static_cast<long double>(den);
    return std::exp(LComplex(0.0L, phi));
}

inline ComplexVec narrow(const std::vector<LComplex>& x) {
    ComplexVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = Complex(static_cast<double>(x[i].real()), static_cast<double>(x[i].imag()));
    }
    return out;
}

// exp{j*pi*gamma*n^2/M}
inline std::vector<LComplex> chirp(std::size_t m, int gamma) {
    std::vector<LComplex> out(m);
    const auto md = static_cast<std::int64_t>(m);
    for (std::int64_t n = 0; n < md; ++n) {
        out[n] = expj_pi(gamma * n * n, md);
    }
    return out;
}

// exp{j*2*pi*k*n/M}
inline std::vector<LComplex> tone(std::size_t m, std::size_t k) {
    std::vector<LComplex> out(m);
    const auto md = static_cast<std::int64_t>(m);
    for (std::int64_t n = 0; n < md; ++n) {
        out[n] = expj_pi(2 * static_cast<std::int64_t>(k) * n, md);
    }
    return out;
}

inline std::vector<LComplex> chirped_tone(std::size_t m, std::size_t k, int gamma) {
    const auto c = chirp(m, gamma);
    const auto t = tone(m, k);
    std::vector<LComplex> out(m);
    for (std::size_t n = 0; n < m; ++n) {
        out[n] = t[n] * c[n];
    }
    return out;
}

inline void add_into(std::vector<LComplex>& acc, const std::vector<LComplex>& x) {
    for (std::size_t n = 0; n < acc.size(); ++n) {
        acc[n] += x[n];
    }
}

inline std::vector<LComplex> dmtdm_symbol(const dmtdm::DmTdmIndices& idx, std::size_t m) {
    std::vector<LComplex> s(m, LComplex(0.0L, 0.0L));
    add_into(s, chirped_tone(m, 2 * idx.even_up, +1));
    add_into(s, chirped_tone(m, 2 * idx.odd_up + 1, +1));
    add_into(s, chirped_tone(m, 2 * idx.even_down, -1));
    add_into(s, chirped_tone(m, 2 * idx.odd_down + 1, -1));
    return s;
}

inline std::vector<LComplex> lora_symbol(std::uint32_t k, std::size_t m) {
    return chirped_tone(m, k, +1);
}

inline std::vector<LComplex> tdm_symbol(std::uint32_t up, std::uint32_t down, std::size_t m) {
    auto s = chirped_tone(m, up, +1);
    add_into(s, chirped_tone(m, down, -1));
    return s;
}

// X(k) = sum_n x(n) exp{-j*2*pi*k*n/M}
inline std::vector<LComplex> dft(const std::vector<LComplex>& x) {
    const auto md = static_cast<std::int64_t>(x.size());
    std::vector<LComplex> out(x.size(), LComplex(0.0L, 0.0L));
    for (std::int64_t k = 0; k < md; ++k) {
        for (std::int64_t n = 0; n < md; ++n) {
            out[k] += x[n] * expj_pi(-2 * k * n, md);
        }
    }
    return out;
}

// Single DFT bin, O(M).
inline LComplex dft_bin(const std::vector<LComplex>& x, std::size_t k) {
    const auto md = static_cast<std::int64_t>(x.size());
    LComplex acc(0.0L, 0.0L);
    for (std::int64_t n = 0; n < md; ++n) {
        acc += x[n] * expj_pi(-2 * static_cast<std::int64_t>(k) * n, md);
    }
    return acc;
}

inline std::vector<LComplex> multiply(const std::vector<LComplex>& a, const std::vector<LComplex>& b) {
    std::vector<LComplex> out(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        out[n] = a[n] * b[n];
    }
    return out;
}

inline std::vector<LComplex> widen(const ComplexVec& x) {
    std::vector<LComplex> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = LComplex(x[i].real(), x[i].imag());
    }
    return out;
}

// sum_n a(n) conj(b(n))
inline LComplex inner(const std::vector<LComplex>& a, const std::vector<LComplex>& b) {
    LComplex acc(0.0L, 0.0L);
    for (std::size_t n = 0; n < a.size(); ++n) {
        acc += a[n] * std::conj(b[n]);
    }
    return acc;
}

// sum_{n=0}^{|c|-1} exp{j*pi*(b*n + a*n^2)/c}
inline LComplex gauss_sum(std::int64_t a, std::int64_t b, std::int64_t c) {
    LComplex acc(0.0L, 0.0L);
    const std::int64_t terms = c < 0 ? -c : c;
    for (std::int64_t n = 0; n < terms; ++n) {
        acc += expj_pi(b * n + a * n * n, c);
    }
    return acc;
}

inline Complex to_double(LComplex z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

inline double max_abs_diff(const ComplexVec& a, const ComplexVec& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

inline dmtdm::DmTdmIndices random_indices(std::mt19937_64& rng, std::size_t m) {
    std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(m / 2 - 1));
    return {d(rng), d(rng), d(rng), d(rng)};
}

inline dmtdm::Bits random_bits(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution coin(0.5);
    dmtdm::Bits out(n);
    for (auto& b : out) {
        b = coin(rng) ? 1 : 0;
    }
    return out;
}

inline ComplexVec random_vector(std::mt19937_64& rng, std::size_t m) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexVec out(m);
    for (auto& z : out) {
        z = {g(rng), g(rng)};
    }
    return out;
}

}  // namespace oracle

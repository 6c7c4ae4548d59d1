#include "dmtdm/signal.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dmtdm {

namespace {

constexpr std::size_t kMaxTableLog2 = 20;

// exp{j*(pi/2)*(quadrant + frac)} with frac in [0, 1). Quarter turns come out exact.
Complex quadrant_phasor(std::int64_t quadrant, double frac) {
    const double phi = 0.5 * std::numbers::pi * frac;
    const Complex base = frac == 0.0 ? Complex{1.0, 0.0} : Complex{std::cos(phi), std::sin(phi)};
    switch (quadrant & 3) {
        case 0: return base;
        case 1: return {-base.imag(), base.real()};
        case 2: return {-base.real(), -base.imag()};
        default: return {base.imag(), -base.real()};
    }
}

struct TableCache {
    std::array<std::once_flag, kMaxTableLog2 + 1> flags;
    std::array<ComplexVec, kMaxTableLog2 + 1> tables;
};

TableCache& table_cache() {
    static TableCache cache;
    return cache;
}

void require_power_of_two(std::size_t n, const char* what) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument(std::string(what) + ": length " + std::to_string(n) +
                                    " is not a power of two");
    }
}

void fft_in_place(ComplexVec& x) {
    const std::size_t n = x.size();
    if (n <= 1) {
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(x[i], x[j]);
        }
    }

    // w^k = exp{-j*2*pi*k/len} = table[(2n - 2k*n/len) mod 2n]
    const auto table = half_turn_table(n);
    const std::size_t mask = 2 * n - 1;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex w = table[(2 * n - 2 * k * stride) & mask];
                const Complex u = x[start + k];
                const Complex v = x[start + k + half] * w;
                x[start + k] = u + v;
                x[start + k + half] = u - v;
            }
        }
    }
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

void require_symbol_length(std::size_t m) {
    constexpr std::size_t lo = std::size_t{1} << kMinSpreadingFactor;
    constexpr std::size_t hi = std::size_t{1} << kMaxSpreadingFactor;
    if (!is_power_of_two(m) || m < lo || m > hi) {
        throw std::invalid_argument("symbol length " + std::to_string(m) +
                                    " must be a power of two in [64, 4096]");
    }
}

Complex half_turn_phasor(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw std::invalid_argument("half_turn_phasor: zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t period = 2 * den;
    std::int64_t r = num % period;
    if (r < 0) {
        r += period;
    }
    // angle = (pi/2) * (2r/den)
    const std::int64_t twice = 2 * r;
    const std::int64_t quadrant = twice / den;
    const std::int64_t rem = twice - quadrant * den;
    return quadrant_phasor(quadrant, static_cast<double>(rem) / static_cast<double>(den));
}

std::span<const Complex> half_turn_table(std::size_t m) {
    require_power_of_two(m, "half_turn_table");
    const auto log2 = static_cast<std::size_t>(std::countr_zero(m));
    if (log2 > kMaxTableLog2) {
        throw std::invalid_argument("half_turn_table: length too large");
    }
    auto& cache = table_cache();
    std::call_once(cache.flags[log2], [&] {
        ComplexVec t(2 * m);
        const auto den = static_cast<std::int64_t>(m);
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = half_turn_phasor(static_cast<std::int64_t>(i), den);
        }
        cache.tables[log2] = std::move(t);
    });
    return cache.tables[log2];
}

ComplexVec make_chirp(std::size_t m, Slope slope) {
    require_symbol_length(m);
    const auto table = half_turn_table(m);
    const std::size_t period = 2 * m;
    ComplexVec c(m);
    for (std::size_t n = 0; n < m; ++n) {
        const std::size_t sq = (n * n) % period;
        c[n] = table[slope == Slope::up ? sq : (period - sq) % period];
    }
    return c;
}

ComplexVec make_tone(std::size_t m, std::size_t index) {
    require_power_of_two(m, "make_tone");
    if (index >= m) {
        throw std::invalid_argument("make_tone: index " + std::to_string(index) +
                                    " out of range for M = " + std::to_string(m));
    }
    const auto table = half_turn_table(m);
    ComplexVec t(m);
    for (std::size_t n = 0; n < m; ++n) {
        t[n] = table[2 * ((index * n) % m)];
    }
    return t;
}

ComplexVec dft(std::span<const Complex> x) {
    require_power_of_two(x.size(), "dft");
    ComplexVec out(x.begin(), x.end());
    fft_in_place(out);
    return out;
}

ComplexVec idft(std::span<const Complex> x) {
    require_power_of_two(x.size(), "idft");
    ComplexVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::conj(x[i]);
    }
    fft_in_place(out);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : out) {
        v = std::conj(v) * scale;
    }
    return out;
}

ComplexVec dft_direct(std::span<const Complex> x) {
    const std::size_t m = x.size();
    require_power_of_two(m, "dft_direct");
    const auto table = half_turn_table(m);
    const std::size_t period = 2 * m;
    ComplexVec out(m);
    for (std::size_t k = 0; k < m; ++k) {
        Complex acc{0.0, 0.0};
        for (std::size_t n = 0; n < m; ++n) {
            acc += x[n] * table[(period - 2 * ((k * n) % m)) % period];
        }
        out[k] = acc;
    }
    return out;
}

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("inner_product: length mismatch");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t n = 0; n < a.size(); ++n) {
        acc += a[n] * std::conj(b[n]);
    }
    return acc;
}

ComplexVec multiply(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("multiply: length mismatch");
    }
    ComplexVec out(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        out[n] = a[n] * b[n];
    }
    return out;
}

double energy(std::span<const Complex> x) {
    double acc = 0.0;
    for (const auto& v : x) {
        acc += std::norm(v);
    }
    return acc;
}

double mean_power(std::span<const Complex> x) {
    if (x.empty()) {
        throw std::invalid_argument("mean_power: empty input");
    }
    return energy(x) / static_cast<double>(x.size());
}

bool all_finite(std::span<const Complex> x) {
    for (const auto& v : x) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            return false;
        }
    }
    return true;
}

}  // namespace dmtdm

// Complex baseband substrate: chirps, tones, DFT and inner products.
//
// Every symbol in this library is a length-M block of complex samples with
// M = 2^lambda. Phases are always formed from integer numerators reduced
// modulo the period before the trig call, so exp{j*pi*n^2/M} stays accurate
// to the last bit even at n ~ 4096.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dmtdm {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

inline constexpr int kMinSpreadingFactor = 6;
inline constexpr int kMaxSpreadingFactor = 12;

/// Chirp slope: +1 is the up-chirp c_u, -1 the down-chirp c_d.
enum class Slope : int { up = 1, down = -1 };

constexpr Slope opposite(Slope s) { return s == Slope::up ? Slope::down : Slope::up; }

bool is_power_of_two(std::size_t n);

/// Throws std::invalid_argument unless m is a power of two in [2^6, 2^12].
void require_symbol_length(std::size_t m);

/// exp{j*pi*num/den}. num is reduced modulo 2*den in integer arithmetic first.
Complex half_turn_phasor(std::int64_t num, std::int64_t den);

/// Cached table of exp{j*pi*i/m} for i = 0..2m-1. m must be a power of two <= 2^20.
/// The returned span stays valid for the lifetime of the program.
std::span<const Complex> half_turn_table(std::size_t m);

/// c_slope(n) = exp{j*pi*slope*n^2/M}, n = 0..M-1. M must be a valid symbol length.
ComplexVec make_chirp(std::size_t m, Slope slope);

/// exp{j*2*pi*index*n/M}. M any power of two, 0 <= index < M.
ComplexVec make_tone(std::size_t m, std::size_t index);

/// Forward DFT, X(k) = sum_n x(n) exp{-j*2*pi*k*n/M}. Radix-2 FFT; length must be a power of two.
ComplexVec dft(std::span<const Complex> x);

/// Inverse of dft() including the 1/M factor.
ComplexVec idft(std::span<const Complex> x);

/// O(M^2) summation of the same definition as dft(). Reference path for checks.
ComplexVec dft_direct(std::span<const Complex> x);

/// sum_n a(n) * conj(b(n)).
Complex inner_product(std::span<const Complex> a, std::span<const Complex> b);

/// Elementwise product.
ComplexVec multiply(std::span<const Complex> a, std::span<const Complex> b);

/// (1/M) sum |x(n)|^2.
double mean_power(std::span<const Complex> x);

double energy(std::span<const Complex> x);

bool all_finite(std::span<const Complex> x);

}  // namespace dmtdm

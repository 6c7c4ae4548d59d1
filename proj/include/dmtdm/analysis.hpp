// Closed-form orthogonality and interference analysis of DM-TDM-CSS.
//
// The cross terms between an up-chirped and a down-chirped tone reduce to
// generalized quadratic Gauss sums
//
//     G(a, b, c) = sum_{n=0}^{|c|-1} exp{j*pi*(b*n + a*n^2)/c},
//
// which the reciprocity law rewrites as a sum of |a| terms. With a = +-2 and
// c = M the whole interference structure is carried by the constant
// alpha = 2*sqrt(M/2)*exp{j*pi/4}.

#pragma once

#include <cstdint>

#include "dmtdm/modem.hpp"

namespace dmtdm {

/// Requires a*c != 0 and a*c + b even for the reciprocity form.
struct GaussSumParams {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
};

bool satisfies_reciprocity_precondition(const GaussSumParams& p);

/// Direct summation over |c| terms. Throws std::invalid_argument if c == 0.
Complex gauss_sum_direct(const GaussSumParams& p);

/// sqrt|c/a| * exp{j*pi*(|ac| - b^2)/(4ac)} * sum_{n=0}^{|a|-1} exp{-j*pi*(b*n + c*n^2)/a}.
/// Throws std::invalid_argument if the precondition fails.
Complex gauss_sum_reciprocal(const GaussSumParams& p);

/// 2*sqrt(M/2)*exp{j*pi/4}; |alpha|^2 = 2M.
Complex interference_alpha(std::size_t m);

/// The four up/down cross terms of <s_a, s_b>:
///     alpha*(theta_1 + theta_2) + conj(alpha)*(theta_3 + theta_4)
/// with theta_1 = exp{-j*pi/(2M) * (2a.even_up - 2b.even_down)^2} and so on on
/// the expanded tone indices. Same-slope terms are not part of this expression.
Complex symbol_inner_product_closed(const DmTdmIndices& a, const DmTdmIndices& b,
                                    SpreadingFactor sf);

/// Full <s_a, s_b>: the cross terms above plus M for every same-slope tone pair
/// that coincides (even_up == even_up, odd_up == odd_up, ...).
Complex symbol_inner_product_full(const DmTdmIndices& a, const DmTdmIndices& b,
                                  SpreadingFactor sf);

enum class Branch { r1, r2 };
enum class Parity { even, odd };

struct InterferenceReport {
    std::size_t bin = 0;             // activated DFT bin examined
    double signal_mag = 0.0;         // M
    Complex interference{0.0, 0.0};  // noiseless bin value minus M
    double interference_mag = 0.0;
    double sir_linear = 0.0;
    double sinr_linear = 0.0;

    Complex noiseless_bin() const { return signal_mag + interference; }
};

/// Noiseless value of the activated bin of branch R1 (dechirp by c_d) or R2
/// (dechirp by c_u) with the given parity, split into signal and interference:
///
///   R1 even:  M + conj(alpha) * exp{+j*pi/(2M) * (2k_e2 - 2k_e1)^2}
///   R1 odd:   M + conj(alpha) * exp{+j*pi/(2M) * (2k_o2 - 2k_o1)^2}
///   R2 even:  M + alpha       * exp{-j*pi/(2M) * (2k_e1 - 2k_e2)^2}
///   R2 odd:   M + alpha       * exp{-j*pi/(2M) * (2k_o1 - 2k_o2)^2}
///
/// The opposite-parity tone of the other chirp contributes nothing. sigma2
/// only enters sinr_linear.
InterferenceReport interference_at_bin(const DmTdmIndices& idx, Branch branch, Parity parity,
                                       SpreadingFactor sf, double sigma2 = 0.0);

/// M / 2.
double sir(SpreadingFactor sf);

/// M / (2 + sigma2 / M). Throws std::invalid_argument for negative or non-finite sigma2.
double sinr(SpreadingFactor sf, double sigma2);

double to_db(double linear);

/// Largest disagreements between closed forms and brute-force evaluation on
/// random inputs, each normalized as stated.
struct OracleResiduals {
    std::size_t trials = 0;
    double gauss_sum = 0.0;      // |reciprocal - direct| / |c|, |a| <= 64, |c| <= 64 or c = +-M
    double inner_product = 0.0;  // |full closed form - sum s_a conj(s_b)| / M
    double interference = 0.0;   // |closed-form bin - DFT bin| / M over all four activated bins
    double cross_parity = 0.0;   // change of an activated bin when the opposite-parity tones are removed, / M
};

OracleResiduals run_oracle_checks(SpreadingFactor sf, std::size_t trials, std::uint64_t seed);

}  // namespace dmtdm

// CSV and JSON renderings of simulation results.
//
// CSV files start with one "# config: {...}" comment line holding the compact
// JSON of the configuration that produced them, followed by the header row.
// Numbers are printed with fixed formats so identical runs give identical bytes.

#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "dmtdm/sim.hpp"

namespace dmtdm {

inline constexpr const char* kBerCsvHeader =
    "scheme,detector,lambda,ebn0_db,bits,errors,ber,ci_low,ci_high";

std::string ber_csv(std::span<const BerRecord> records, const nlohmann::json& config);
std::string se_ee_csv(std::span<const SeEePoint> points, Scheme scheme, Detector detector,
                      const nlohmann::json& config);

/// Omits wall_seconds so that repeated runs serialize identically.
nlohmann::json to_json(const BerRecord& r);
nlohmann::json to_json(const SeEePoint& p);

/// "%.4f"-style fixed formatting without locale dependence.
std::string format_fixed(double v, int decimals);
/// "%.6e"-style formatting.
std::string format_sci(double v);

}  // namespace dmtdm

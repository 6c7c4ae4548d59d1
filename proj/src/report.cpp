#include "dmtdm/report.hpp"

#include <cmath>
#include <cstdio>

namespace dmtdm {

namespace {

std::string config_line(const nlohmann::json& config) { return "# config: " + config.dump() + "\n"; }

}  // namespace

std::string format_fixed(double v, int decimals) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string format_sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string ber_csv(std::span<const BerRecord> records, const nlohmann::json& config) {
    std::string out = config_line(config);
    out += kBerCsvHeader;
    out += '\n';
    for (const auto& r : records) {
        out += std::string(to_string(r.scheme)) + ',' + std::string(to_string(r.detector)) + ',' +
               std::to_string(r.lambda) + ',' + format_fixed(r.ebn0_db, 4) + ',' +
               std::to_string(r.bits_sent) + ',' + std::to_string(r.bit_errors) + ',' +
               format_sci(r.ber) + ',' + format_sci(r.ci_low) + ',' + format_sci(r.ci_high) + '\n';
    }
    return out;
}

std::string se_ee_csv(std::span<const SeEePoint> points, Scheme scheme, Detector detector,
                      const nlohmann::json& config) {
    std::string out = config_line(config);
    out += "scheme,detector,lambda,bits_per_symbol,m,se,required_ebn0_db,reachable\n";
    for (const auto& p : points) {
        out += std::string(to_string(scheme)) + ',' + std::string(to_string(detector)) + ',' +
               std::to_string(p.lambda) + ',' + std::to_string(p.se.num) + ',' +
               std::to_string(p.se.den) + ',' + format_sci(p.se.value()) + ',' +
               (p.required_ebn0_db ? format_fixed(*p.required_ebn0_db, 4) : std::string("nan")) +
               ',' + (p.required_ebn0_db ? "true" : "false") + '\n';
    }
    return out;
}

nlohmann::json to_json(const BerRecord& r) {
    return {{"scheme", to_string(r.scheme)},
            {"detector", to_string(r.detector)},
            {"lambda", r.lambda},
            {"ebn0_db", std::isinf(r.ebn0_db) ? nlohmann::json("inf") : nlohmann::json(r.ebn0_db)},
            {"symbols", r.symbols},
            {"bits", r.bits_sent},
            {"errors", r.bit_errors},
            {"ber", r.ber},
            {"ci_low", r.ci_low},
            {"ci_high", r.ci_high},
            {"max_symbols_reached", r.max_symbols_reached},
            {"seed", r.seed}};
}

nlohmann::json to_json(const SeEePoint& p) {
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& r : p.probes) {
        probes.push_back(to_json(r));
    }
    return {{"lambda", p.lambda},
            {"se", {{"num", p.se.num}, {"den", p.se.den}, {"value", p.se.value()}}},
            {"required_ebn0_db",
             p.required_ebn0_db ? nlohmann::json(*p.required_ebn0_db) : nlohmann::json(nullptr)},
            {"reachable", p.required_ebn0_db.has_value()},
            {"probes", probes}};
}

}  // namespace dmtdm

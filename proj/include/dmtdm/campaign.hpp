// Campaign files: strict, versioned JSON documents describing BER sweeps.
//
//   {
//     "schema_version": 1,
//     "name": "awgn_noncoherent",
//     "seed": 20240601,
//     "channels": { "awgn": {}, "fading": { "fading_rho": 0.2 } },
//     "sweeps": [
//       { "name": "dm-tdm-css", "scheme": "dm-tdm-css", "detector": "noncoherent",
//         "lambda": [8], "ebn0_db": { "start": 2, "stop": 8, "step": 0.25 },
//         "channel": "awgn", "stop": { "min_bit_errors": 200, "max_symbols": 10000000 } }
//     ]
//   }
//
// Unknown keys anywhere are rejected. "channel" is either the name of an
// entry in "channels" or an inline channel object. A sweep without "seed"
// uses the campaign seed.

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmtdm/sim.hpp"

namespace dmtdm {

inline constexpr int kCampaignSchemaVersion = 1;

class CampaignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Campaign {
    int schema_version = kCampaignSchemaVersion;
    std::string name;
    std::uint64_t seed = 0;
    std::map<std::string, ChannelSpec> channels;
    std::vector<SweepConfig> sweeps;
    nlohmann::json source;  // the document as parsed
};

/// Throws CampaignError with a path such as "sweeps[1].ebn0_db.step" on any violation.
Campaign parse_campaign(const nlohmann::json& doc);
Campaign parse_campaign_text(std::string_view text);
Campaign load_campaign(const std::filesystem::path& path);

nlohmann::json to_json(const ChannelSpec& spec);
/// Strict: unknown keys and out-of-range values throw CampaignError.
ChannelSpec channel_from_json(const nlohmann::json& j, const std::string& where = "channel");

nlohmann::json to_json(const StopRule& stop);
nlohmann::json to_json(const SweepConfig& sweep);

}  // namespace dmtdm

#include "dmtdm/campaign.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <set>

namespace dmtdm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw CampaignError(where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) {
        fail(where, "expected an object");
    }
}

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required = {}) {
    require_object(j, where);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!ok.contains(key)) {
            fail(where, "unknown field '" + key + "'");
        }
    }
    for (const char* key : required) {
        if (!j.contains(key)) {
            fail(where, std::string("missing required field '") + key + "'");
        }
    }
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) {
        fail(where, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        fail(where, "must be finite");
    }
    return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        fail(where, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& where) {
    if (!j.is_string()) {
        fail(where, "expected a string");
    }
    return j.get<std::string>();
}

std::vector<int> lambdas_from_json(const json& j, const std::string& where) {
    std::vector<int> out;
    auto one = [&](const json& v, const std::string& w) {
        if (!v.is_number_integer()) {
            fail(w, "expected an integer spreading factor");
        }
        const int l = v.get<int>();
        if (l < kMinSpreadingFactor || l > kMaxSpreadingFactor) {
            fail(w, "spreading factor " + std::to_string(l) + " outside [6, 12]");
        }
        out.push_back(l);
    };
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            one(j[i], where + "[" + std::to_string(i) + "]");
        }
    } else {
        one(j, where);
    }
    if (out.empty()) {
        fail(where, "lambda list is empty");
    }
    return out;
}

std::vector<double> grid_from_json(const json& j, const std::string& where) {
    std::vector<double> out;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
        }
    } else {
        require_keys(j, where, {"start", "stop", "step"}, {"start", "stop", "step"});
        const double start = number(j["start"], where + ".start");
        const double stop = number(j["stop"], where + ".stop");
        const double step = number(j["step"], where + ".step");
        if (step <= 0.0) {
            fail(where + ".step", "must be positive");
        }
        if (stop < start) {
            fail(where, "stop is below start");
        }
        out = make_grid(start, stop, step);
    }
    if (out.empty()) {
        fail(where, "Eb/N0 grid is empty");
    }
    return out;
}

StopRule stop_from_json(const json& j, const std::string& where) {
    require_keys(j, where, {"min_bit_errors", "max_symbols"});
    StopRule stop;
    if (j.contains("min_bit_errors")) {
        stop.min_bit_errors = unsigned_int(j["min_bit_errors"], where + ".min_bit_errors");
    }
    if (j.contains("max_symbols")) {
        stop.max_symbols = unsigned_int(j["max_symbols"], where + ".max_symbols");
    }
    if (stop.min_bit_errors == 0 || stop.max_symbols == 0) {
        fail(where, "stop bounds must be positive");
    }
    return stop;
}

}  // namespace

nlohmann::json to_json(const ChannelSpec& spec) {
    json j{{"gain", {spec.gain.real(), spec.gain.imag()}},
           {"noise_sigma2", spec.noise_sigma2},
           {"phase_offset", spec.phase_offset},
           {"freq_offset", spec.freq_offset}};
    if (spec.fading) {
        j["fading_rho"] = spec.fading->rho;
    }
    return j;
}

ChannelSpec channel_from_json(const nlohmann::json& j, const std::string& where) {
    require_keys(j, where, {"gain", "noise_sigma2", "fading_rho", "phase_offset", "freq_offset"});
    ChannelSpec spec;
    if (j.contains("gain")) {
        const auto& g = j["gain"];
        if (!g.is_array() || g.size() != 2) {
            fail(where + ".gain", "expected [re, im]");
        }
        spec.gain = {number(g[0], where + ".gain[0]"), number(g[1], where + ".gain[1]")};
    }
    if (j.contains("noise_sigma2")) {
        spec.noise_sigma2 = number(j["noise_sigma2"], where + ".noise_sigma2");
        if (spec.noise_sigma2 < 0.0) {
            fail(where + ".noise_sigma2", "must be >= 0");
        }
    }
    if (j.contains("fading_rho")) {
        const double rho = number(j["fading_rho"], where + ".fading_rho");
        if (rho < 0.0 || rho > 1.0) {
            fail(where + ".fading_rho", "must lie in [0, 1]");
        }
        spec.fading = FadingSpec{rho};
    }
    if (j.contains("phase_offset")) {
        spec.phase_offset = number(j["phase_offset"], where + ".phase_offset");
    }
    if (j.contains("freq_offset")) {
        spec.freq_offset = number(j["freq_offset"], where + ".freq_offset");
    }
    return spec;
}

nlohmann::json to_json(const StopRule& stop) {
    return {{"min_bit_errors", stop.min_bit_errors}, {"max_symbols", stop.max_symbols}};
}

nlohmann::json to_json(const SweepConfig& sweep) {
    return {{"name", sweep.name},
            {"scheme", to_string(sweep.scheme)},
            {"detector", to_string(sweep.detector)},
            {"lambda", sweep.lambdas},
            {"ebn0_db", sweep.ebn0_grid_db},
            {"channel", to_json(sweep.channel)},
            {"stop", to_json(sweep.stop)},
            {"seed", sweep.seed}};
}

Campaign parse_campaign(const nlohmann::json& doc) {
    require_keys(doc, "campaign", {"schema_version", "name", "seed", "channels", "sweeps"},
                 {"schema_version", "name", "seed", "sweeps"});
    Campaign c;
    c.source = doc;
    if (!doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != kCampaignSchemaVersion) {
        fail("schema_version", "unsupported schema version (expected " +
                                   std::to_string(kCampaignSchemaVersion) + ")");
    }
    c.name = text(doc["name"], "name");
    if (c.name.empty()) {
        fail("name", "must not be empty");
    }
    c.seed = unsigned_int(doc["seed"], "seed");

    if (doc.contains("channels")) {
        require_object(doc["channels"], "channels");
        for (const auto& [key, value] : doc["channels"].items()) {
            c.channels.emplace(key, channel_from_json(value, "channels." + key));
        }
    }

    const auto& sweeps = doc["sweeps"];
    if (!sweeps.is_array() || sweeps.empty()) {
        fail("sweeps", "expected a non-empty array");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
        const std::string where = "sweeps[" + std::to_string(i) + "]";
        const auto& s = sweeps[i];
        require_keys(s, where,
                     {"name", "scheme", "detector", "lambda", "ebn0_db", "channel", "stop", "seed"},
                     {"name", "scheme", "detector", "lambda", "ebn0_db"});
        SweepConfig sweep;
        sweep.name = text(s["name"], where + ".name");
        if (sweep.name.empty()) {
            fail(where + ".name", "must not be empty");
        }
        if (!names.insert(sweep.name).second) {
            fail(where + ".name", "duplicate sweep name '" + sweep.name + "'");
        }
        try {
            sweep.scheme = parse_scheme(text(s["scheme"], where + ".scheme"));
            sweep.detector = parse_detector(text(s["detector"], where + ".detector"));
        } catch (const std::invalid_argument& e) {
            fail(where, e.what());
        }
        sweep.lambdas = lambdas_from_json(s["lambda"], where + ".lambda");
        sweep.ebn0_grid_db = grid_from_json(s["ebn0_db"], where + ".ebn0_db");
        if (s.contains("channel")) {
            const auto& ch = s["channel"];
            if (ch.is_string()) {
                const auto it = c.channels.find(ch.get<std::string>());
                if (it == c.channels.end()) {
                    fail(where + ".channel", "unknown channel '" + ch.get<std::string>() + "'");
                }
                sweep.channel = it->second;
            } else {
                sweep.channel = channel_from_json(ch, where + ".channel");
            }
        }
        if (sweep.channel.noise_sigma2 != 0.0) {
            fail(where + ".channel", "noise_sigma2 must be 0 in a sweep; noise follows the Eb/N0 grid");
        }
        if (sweep.detector == Detector::coherent && receiver_gain(sweep.channel) == Complex{0.0, 0.0}) {
            fail(where + ".channel", "coherent detection needs a nonzero receiver gain");
        }
        if (s.contains("stop")) {
            sweep.stop = stop_from_json(s["stop"], where + ".stop");
        }
        sweep.seed = s.contains("seed") ? unsigned_int(s["seed"], where + ".seed") : c.seed;
        c.sweeps.push_back(std::move(sweep));
    }
    return c;
}

Campaign parse_campaign_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw CampaignError(std::string("campaign is not valid JSON: ") + e.what());
    }
    return parse_campaign(doc);
}

Campaign load_campaign(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw CampaignError("cannot open campaign file '" + path.string() + "'");
    }
    const std::string body((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_campaign_text(body);
}

}  // namespace dmtdm

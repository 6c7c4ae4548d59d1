#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmtdm/analysis.hpp"
#include "dmtdm/campaign.hpp"
#include "dmtdm/channel.hpp"
#include "dmtdm/iq_file.hpp"
#include "dmtdm/report.hpp"
#include "dmtdm/sim.hpp"

namespace dmtdm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        parts.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
        if (next == std::string_view::npos) {
            return parts;
        }
        pos = next + 1;
    }
}

int to_int(std::string_view s, std::string_view what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw UsageError(std::string(what) + ": '" + std::string(s) + "' is not an integer");
    }
    return v;
}

double to_double(std::string_view s, std::string_view what) {
    // std::from_chars for double is missing from older libstdc++ builds; strtod
    // on a copy is equivalent for the plain decimal forms accepted here.
    const std::string copy(s);
    char* end = nullptr;
    const double v = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(v)) {
        throw UsageError(std::string(what) + ": '" + copy + "' is not a finite number");
    }
    return v;
}

int checked_lambda(int l) {
    if (l < kMinSpreadingFactor || l > kMaxSpreadingFactor) {
        throw UsageError("--lambda: " + std::to_string(l) + " outside [6, 12]");
    }
    return l;
}

Scheme scheme_arg(const std::string& s) {
    try {
        return parse_scheme(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--scheme: ") + e.what());
    }
}

Detector detector_arg(const std::string& s) {
    try {
        return parse_detector(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--detector: ") + e.what());
    }
}

int single_lambda(const std::string& text) {
    const auto list = parse_lambda_list(text);
    if (list.size() != 1) {
        throw UsageError("--lambda: expected a single spreading factor, got '" + text + "'");
    }
    return list.front();
}

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir.string() +
                                 "': " + ec.message());
    }
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    f << body;
    if (!f.flush()) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

// Keeps campaign and sweep names usable as file name components.
std::string file_token(std::string_view name) {
    std::string out;
    for (char ch : name) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
        out += ok ? ch : '_';
    }
    return out;
}

json optional_db(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json records_json(std::span<const BerRecord> records) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back(to_json(r));
    }
    return arr;
}

StopRule stop_from_flags(std::uint64_t min_errors, std::uint64_t max_symbols) {
    StopRule stop{min_errors, max_symbols};
    if (min_errors == 0 || max_symbols == 0) {
        throw UsageError("--min-errors and --max-symbols must be positive");
    }
    return stop;
}

RunOptions run_options(unsigned workers) {
    if (workers == 0) {
        throw UsageError("--workers must be at least 1");
    }
    return RunOptions{workers, RunOptions{}.chunk_symbols};
}

// ---- modulate ---------------------------------------------------------------

struct ModulateArgs {
    std::string scheme;
    std::string lambda;
    std::string bits;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_modulate(const ModulateArgs& a, std::ostream& out) {
    const Scheme scheme = scheme_arg(a.scheme);
    const SpreadingFactor sf(single_lambda(a.lambda));
    const std::size_t n_bits = bits_per_symbol(scheme, sf);

    Bits bits;
    if (!a.bits.empty()) {
        bits = bits_from_string(a.bits);
        if (bits.size() != n_bits) {
            throw UsageError("--bits: " + std::string(to_string(scheme)) + " at lambda " +
                             std::to_string(sf.lambda()) + " needs " + std::to_string(n_bits) +
                             " bits, got " + std::to_string(bits.size()));
        }
    } else if (a.seed) {
        bits.assign(n_bits, 0);
        NoiseSource(*a.seed).fill_bits(bits);
    } else {
        throw UsageError("modulate needs --bits or --seed");
    }

    const auto indices = map_bits(scheme, bits, sf);
    const auto samples = modulate(indices, sf);

    fs::path path = a.out.empty() ? output_dir("") / "symbol.iq" : fs::path(a.out);
    if (path.has_parent_path()) {
        ensure_dir(path.parent_path());
    }
    write_iq(path, samples);
    IqSidecar meta{scheme, sf.lambda(), samples.size(), indices, bits};
    json side = to_json(meta);
    if (a.seed && a.bits.empty()) {
        side["seed"] = *a.seed;
    }
    write_text(sidecar_path(path), side.dump(2) + "\n");

    out << "wrote " << path.string() << " (" << samples.size() << " samples, "
        << samples.size() * kBytesPerSample << " bytes)\n";
    out << "bits: " << bits_to_string(bits) << "\n";
    return kOk;
}

// ---- demodulate -------------------------------------------------------------

struct DemodulateArgs {
    std::string in;
    std::string scheme;
    std::string detector = "noncoherent";
    std::string h;
    bool json_output = false;
};

int lambda_from_samples(std::size_t n) {
    for (int l = kMinSpreadingFactor; l <= kMaxSpreadingFactor; ++l) {
        if (n == (std::size_t{1} << l)) {
            return l;
        }
    }
    throw IqFormatError("sample count " + std::to_string(n) +
                            " is not 2^lambda for lambda in [6, 12]",
                        n * kBytesPerSample);
}

int cmd_demodulate(const DemodulateArgs& a, std::ostream& out) {
    const Detector detector = detector_arg(a.detector);
    std::optional<Complex> h;
    if (!a.h.empty()) {
        h = parse_complex(a.h);
    }
    if (detector == Detector::coherent && !h) {
        throw UsageError("coherent detection needs --h re,im");
    }

    const auto samples = read_iq(a.in);
    const int lambda = lambda_from_samples(samples.size());
    const SpreadingFactor sf(lambda);

    std::optional<IqSidecar> meta;
    const fs::path side = sidecar_path(a.in);
    if (fs::exists(side)) {
        std::ifstream f(side);
        try {
            meta = sidecar_from_json(json::parse(f));
        } catch (const json::exception& e) {
            throw std::runtime_error("sidecar '" + side.string() + "' is malformed: " + e.what());
        }
    }

    Scheme scheme;
    if (!a.scheme.empty()) {
        scheme = scheme_arg(a.scheme);
    } else if (meta) {
        scheme = meta->scheme;
    } else {
        throw UsageError("--scheme is required when no sidecar is present");
    }

    DetectionMode mode = DetectionMode::noncoherent();
    if (detector == Detector::coherent) {
        try {
            mode = DetectionMode::coherent(*h);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--h: ") + e.what());
        }
    }
    const auto indices = detect(scheme, samples, sf, mode);
    const Bits bits = demap_bits(indices, sf);
    const auto branches = inspect(scheme, samples, sf, mode);
    const std::optional<bool> match =
        meta && meta->scheme == scheme && meta->lambda == lambda
            ? std::optional<bool>(meta->bits == bits)
            : std::nullopt;

    if (a.json_output) {
        json j{{"scheme", to_string(scheme)},
               {"detector", to_string(detector)},
               {"lambda", lambda},
               {"bits", bits_to_string(bits)},
               {"indices", to_json(indices)}};
        json arr = json::array();
        for (const auto& b : branches) {
            arr.push_back({{"branch", b.label},
                           {"bin", b.bin},
                           {"statistic", b.statistic},
                           {"runner_up", b.runner_up},
                           {"magnitude", b.magnitude},
                           {"margin", b.margin()}});
        }
        j["branches"] = arr;
        j["sidecar_match"] = match ? json(*match) : json(nullptr);
        out << j.dump(2) << "\n";
        return kOk;
    }

    out << "scheme: " << to_string(scheme) << "\n";
    out << "detector: " << to_string(detector) << "\n";
    out << "lambda: " << lambda << "\n";
    out << "bits: " << bits_to_string(bits) << "\n";
    for (const auto& b : branches) {
        out << b.label << ": bin=" << b.bin << " magnitude=" << format_sci(b.magnitude)
            << " statistic=" << format_sci(b.statistic) << " margin=" << format_sci(b.margin())
            << "\n";
    }
    if (match) {
        out << "sidecar: " << (*match ? "match" : "mismatch") << "\n";
    }
    return kOk;
}

// ---- ber-sweep --------------------------------------------------------------

struct SweepArgs {
    std::string campaign;
    std::string out;
    unsigned workers = 1;
};

int cmd_ber_sweep(const SweepArgs& a, std::ostream& out) {
    const Campaign campaign = load_campaign(a.campaign);
    const RunOptions opts = run_options(a.workers);
    const fs::path dir = output_dir(a.out);
    ensure_dir(dir);

    json results = json::array();
    json unreachable = json::array();
    for (const auto& sweep : campaign.sweeps) {
        json curves = json::array();
        for (int lambda : sweep.lambdas) {
            SweepConfig one = sweep;
            one.lambdas = {lambda};
            const auto records = run_sweep(one, opts);
            const auto required = required_ebn0_db(records);

            const json config{{"campaign", campaign.name},
                              {"schema_version", campaign.schema_version},
                              {"sweep", to_json(one)}};
            const fs::path csv = dir / (file_token(campaign.name) + "__" + file_token(sweep.name) +
                                        "__l" + std::to_string(lambda) + ".csv");
            write_text(csv, ber_csv(records, config));

            out << sweep.name << " lambda=" << lambda << ": ";
            if (required) {
                out << "Eb/N0 at BER 1e-3 = " << format_fixed(*required, 3) << " dB";
            } else {
                out << "BER 1e-3 not reached on the grid";
                unreachable.push_back({{"sweep", sweep.name}, {"lambda", lambda}});
            }
            out << " -> " << csv.string() << "\n";

            curves.push_back({{"lambda", lambda},
                              {"csv", csv.filename().string()},
                              {"required_ebn0_db", optional_db(required)},
                              {"target_reached", required.has_value()},
                              {"records", records_json(records)}});
        }
        results.push_back({{"sweep", sweep.name}, {"config", to_json(sweep)}, {"curves", curves}});
    }

    const json combined{{"campaign", campaign.source},
                        {"target_ber", kTargetBer},
                        {"results", results},
                        {"unreachable", unreachable}};
    const fs::path combined_path = dir / (file_token(campaign.name) + ".json");
    write_text(combined_path, combined.dump(2) + "\n");
    out << "wrote " << combined_path.string() << "\n";
    return kOk;
}

// ---- se-ee ------------------------------------------------------------------

struct SeEeArgs {
    std::string campaign;
    std::vector<std::string> schemes{"dm-tdm-css"};
    std::string detector = "noncoherent";
    std::string lambda = "6..12";
    std::uint64_t seed = 1;
    std::uint64_t min_errors = StopRule{}.min_bit_errors;
    std::uint64_t max_symbols = StopRule{}.max_symbols;
    double start_db = SeEeSearch{}.start_db;
    double stop_db = SeEeSearch{}.stop_db;
    std::string out;
    unsigned workers = 1;
};

struct SeEeJob {
    std::string label;
    Scheme scheme;
    Detector detector;
    std::vector<int> lambdas;
    ChannelSpec channel;
    StopRule stop;
    std::uint64_t seed;
    SeEeSearch search;
};

json search_json(const SeEeSearch& s) {
    return {{"start_db", s.start_db},
            {"stop_db", s.stop_db},
            {"coarse_step_db", s.coarse_step_db},
            {"fine_step_db", s.fine_step_db},
            {"target_ber", s.target_ber}};
}

int cmd_se_ee(const SeEeArgs& a, std::ostream& out) {
    const RunOptions opts = run_options(a.workers);
    std::vector<SeEeJob> jobs;
    std::string base_name = "se_ee";
    if (!a.campaign.empty()) {
        // Each sweep's grid bounds become the search range.
        const Campaign c = load_campaign(a.campaign);
        base_name = file_token(c.name);
        for (const auto& s : c.sweeps) {
            SeEeSearch search;
            search.start_db = s.ebn0_grid_db.front();
            search.stop_db = s.ebn0_grid_db.back();
            jobs.push_back({s.name, s.scheme, s.detector, s.lambdas, s.channel, s.stop, s.seed,
                            search});
        }
    } else {
        const Detector detector = detector_arg(a.detector);
        const auto lambdas = parse_lambda_list(a.lambda);
        if (!(a.stop_db > a.start_db)) {
            throw UsageError("--stop-db must exceed --start-db");
        }
        SeEeSearch search;
        search.start_db = a.start_db;
        search.stop_db = a.stop_db;
        for (const auto& name : a.schemes) {
            const Scheme scheme = scheme_arg(name);
            jobs.push_back({std::string(to_string(scheme)) + "_" + std::string(to_string(detector)),
                            scheme, detector, lambdas, ChannelSpec{},
                            stop_from_flags(a.min_errors, a.max_symbols), a.seed, search});
        }
    }

    const fs::path dir = output_dir(a.out);
    ensure_dir(dir);
    json all = json::array();
    for (const auto& job : jobs) {
        const auto points = run_se_ee_curve(job.scheme, job.detector, job.lambdas, job.channel,
                                            job.stop, job.seed, job.search, opts);
        const json config{{"scheme", to_string(job.scheme)},
                          {"detector", to_string(job.detector)},
                          {"lambda", job.lambdas},
                          {"channel", to_json(job.channel)},
                          {"stop", to_json(job.stop)},
                          {"seed", job.seed},
                          {"search", search_json(job.search)}};
        const fs::path csv = dir / (base_name + "__" + file_token(job.label) + ".csv");
        write_text(csv, se_ee_csv(points, job.scheme, job.detector, config));
        json pts = json::array();
        for (const auto& p : points) {
            pts.push_back(to_json(p));
            out << job.label << " lambda=" << p.lambda << " se=" << format_fixed(p.se.value(), 6)
                << " required_ebn0_db="
                << (p.required_ebn0_db ? format_fixed(*p.required_ebn0_db, 3) : "unreachable")
                << "\n";
        }
        all.push_back({{"label", job.label}, {"config", config}, {"points", pts}});
        out << "wrote " << csv.string() << "\n";
    }
    const fs::path combined = dir / (base_name + ".json");
    write_text(combined, json{{"curves", all}}.dump(2) + "\n");
    out << "wrote " << combined.string() << "\n";
    return kOk;
}

// ---- impairment -------------------------------------------------------------

struct ImpairmentArgs {
    std::string scheme = "dm-tdm-css";
    std::string detector = "noncoherent";
    std::string lambda = "8";
    std::optional<double> po;
    std::optional<double> fo;
    std::string ebn0 = "0:12:0.5";
    std::uint64_t seed = 1;
    std::uint64_t min_errors = StopRule{}.min_bit_errors;
    std::uint64_t max_symbols = StopRule{}.max_symbols;
    std::string out;
    unsigned workers = 1;
};

int cmd_impairment(const ImpairmentArgs& a, std::ostream& out) {
    const Scheme scheme = scheme_arg(a.scheme);
    const Detector detector = detector_arg(a.detector);
    const SpreadingFactor sf(single_lambda(a.lambda));
    if (a.po.has_value() == a.fo.has_value()) {
        throw UsageError("impairment needs exactly one of --po or --fo");
    }
    const Impairment imp = a.po ? Impairment{Impairment::Kind::phase_offset, *a.po}
                                : Impairment{Impairment::Kind::freq_offset, *a.fo};
    const auto grid = parse_grid(a.ebn0);
    const StopRule stop = stop_from_flags(a.min_errors, a.max_symbols);
    const RunOptions opts = run_options(a.workers);

    const Impairment none{imp.kind, 0.0};
    const auto baseline = run_impairment_suite(scheme, detector, sf, none, grid, stop, a.seed, opts);
    const auto impaired = run_impairment_suite(scheme, detector, sf, imp, grid, stop, a.seed, opts);
    const auto req_base = required_ebn0_db(baseline);
    const auto req_imp = required_ebn0_db(impaired);

    const fs::path dir = output_dir(a.out);
    ensure_dir(dir);
    const std::string stem = "impairment__" + std::string(to_string(imp.kind)) + "__" +
                             std::string(to_string(scheme)) + "__" +
                             std::string(to_string(detector)) + "__l" +
                             std::to_string(sf.lambda());
    json config{{"scheme", to_string(scheme)},
                {"detector", to_string(detector)},
                {"lambda", sf.lambda()},
                {"impairment", to_string(imp.kind)},
                {"value", 0.0},
                {"ebn0_db", grid},
                {"stop", to_json(stop)},
                {"seed", a.seed}};
    const fs::path base_csv = dir / (stem + "__baseline.csv");
    write_text(base_csv, ber_csv(baseline, config));
    config["value"] = imp.value;
    const fs::path imp_csv = dir / (stem + "__impaired.csv");
    write_text(imp_csv, ber_csv(impaired, config));

    json summary{{"config", config},
                 {"baseline_required_ebn0_db", optional_db(req_base)},
                 {"impaired_required_ebn0_db", optional_db(req_imp)},
                 {"penalty_db", req_base && req_imp ? json(*req_imp - *req_base) : json(nullptr)},
                 {"baseline", records_json(baseline)},
                 {"impaired", records_json(impaired)}};
    const fs::path json_path = dir / (stem + ".json");
    write_text(json_path, summary.dump(2) + "\n");

    out << "baseline: " << (req_base ? format_fixed(*req_base, 3) + " dB" : "unreachable") << "\n";
    out << to_string(imp.kind) << " " << imp.value << ": "
        << (req_imp ? format_fixed(*req_imp, 3) + " dB" : "unreachable") << "\n";
    if (req_base && req_imp) {
        out << "penalty: " << format_fixed(*req_imp - *req_base, 3) << " dB\n";
    }
    out << "wrote " << base_csv.string() << ", " << imp_csv.string() << ", "
        << json_path.string() << "\n";
    return kOk;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
    std::string lambda = "6..12";
    std::string sigma2 = "0,64,256";
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const auto lambdas = parse_lambda_list(a.lambda);
    std::vector<double> sigmas;
    for (auto part : split(a.sigma2, ',')) {
        const double v = to_double(part, "--sigma2");
        if (v < 0.0) {
            throw UsageError("--sigma2 values must be >= 0");
        }
        sigmas.push_back(v);
    }
    if (a.trials == 0) {
        throw UsageError("--trials must be positive");
    }

    json rows = json::array();
    OracleResiduals worst;
    for (int lambda : lambdas) {
        const SpreadingFactor sf(lambda);
        const auto m = static_cast<double>(sf.m());
        json sinr_rows = json::array();
        for (double s2 : sigmas) {
            const double v = sinr(sf, s2);
            sinr_rows.push_back({{"sigma2", s2}, {"sinr_linear", v}, {"sinr_db", to_db(v)}});
        }
        const auto res = run_oracle_checks(sf, a.trials, derive_seed(a.seed, lambda));
        worst.trials += res.trials;
        worst.gauss_sum = std::max(worst.gauss_sum, res.gauss_sum);
        worst.inner_product = std::max(worst.inner_product, res.inner_product);
        worst.interference = std::max(worst.interference, res.interference);
        worst.cross_parity = std::max(worst.cross_parity, res.cross_parity);
        rows.push_back({{"lambda", lambda},
                        {"m", sf.m()},
                        {"sir_linear", sir(sf)},
                        {"sir_db", to_db(sir(sf))},
                        {"interference_mag", std::abs(interference_alpha(sf.m()))},
                        {"sinr", sinr_rows},
                        {"residuals",
                         {{"gauss_sum_over_c", res.gauss_sum},
                          {"orthogonality_over_m", res.inner_product},
                          {"interference_over_m", res.interference},
                          {"cross_parity_over_m", res.cross_parity}}},
                        {"signal_mag", m}});
    }
    const bool ok = worst.gauss_sum < 1e-9 && worst.inner_product < 1e-6 &&
                    worst.interference < 1e-6 && worst.cross_parity < 1e-9;
    const json report{{"config",
                       {{"lambda", lambdas}, {"sigma2", sigmas}, {"trials", a.trials}, {"seed", a.seed}}},
                      {"rows", rows},
                      {"max_residuals",
                       {{"gauss_sum_over_c", worst.gauss_sum},
                        {"orthogonality_over_m", worst.inner_product},
                        {"interference_over_m", worst.interference},
                        {"cross_parity_over_m", worst.cross_parity}}},
                      {"within_tolerance", ok}};
    const std::string body = report.dump(2) + "\n";
    if (a.out.empty()) {
        out << body;
    } else {
        const fs::path path(a.out);
        if (path.has_parent_path()) {
            ensure_dir(path.parent_path());
        }
        write_text(path, body);
        out << "wrote " << path.string() << "\n";
    }
    return kOk;
}

void add_stop_flags(CLI::App* sub, std::uint64_t& min_errors, std::uint64_t& max_symbols) {
    sub->add_option("--min-errors", min_errors, "Stop a point after this many bit errors")
        ->capture_default_str();
    sub->add_option("--max-symbols", max_symbols, "Symbol cap per point")->capture_default_str();
}

}  // namespace

std::vector<int> parse_lambda_list(std::string_view text) {
    text = trim(text);
    std::vector<int> out;
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const int lo = checked_lambda(to_int(trim(text.substr(0, dots)), "--lambda"));
        const int hi = checked_lambda(to_int(trim(text.substr(dots + 2)), "--lambda"));
        if (hi < lo) {
            throw UsageError("--lambda: empty range '" + std::string(text) + "'");
        }
        for (int l = lo; l <= hi; ++l) {
            out.push_back(l);
        }
        return out;
    }
    for (auto part : split(text, ',')) {
        out.push_back(checked_lambda(to_int(part, "--lambda")));
    }
    return out;
}

Complex parse_complex(std::string_view text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) {
        throw UsageError("expected re,im but got '" + std::string(text) + "'");
    }
    return {to_double(parts[0], "real part"), to_double(parts[1], "imaginary part")};
}

std::vector<double> parse_grid(std::string_view text) {
    const auto colon = split(text, ':');
    if (colon.size() == 3) {
        const double start = to_double(colon[0], "--ebn0 start");
        const double stop = to_double(colon[1], "--ebn0 stop");
        const double step = to_double(colon[2], "--ebn0 step");
        if (step <= 0.0 || stop < start) {
            throw UsageError("--ebn0: need step > 0 and stop >= start");
        }
        return make_grid(start, stop, step);
    }
    if (colon.size() != 1) {
        throw UsageError("--ebn0: expected start:stop:step or a comma list");
    }
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        out.push_back(to_double(part, "--ebn0"));
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1])) {
            throw UsageError("--ebn0: values must be strictly increasing");
        }
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"DM-TDM-CSS chirp modulation toolkit"};
    app.name("dmtdm-cli");
    app.require_subcommand(1);

    ModulateArgs mod;
    auto* modulate_cmd = app.add_subcommand("modulate", "Write one symbol as an IQ file");
    modulate_cmd->add_option("--scheme", mod.scheme, "lora | tdm-css | dm-tdm-css")->required();
    modulate_cmd->add_option("--lambda", mod.lambda, "Spreading factor 6..12")->required();
    auto* bits_opt = modulate_cmd->add_option("--bits", mod.bits, "Payload, MSB first");
    auto* seed_opt = modulate_cmd->add_option("--seed", mod.seed, "Draw a random payload");
    bits_opt->excludes(seed_opt);
    modulate_cmd->add_option("--out", mod.out, "Output .iq path (default $DMTDM_OUT_DIR/symbol.iq)");

    DemodulateArgs demod;
    auto* demodulate_cmd = app.add_subcommand("demodulate", "Detect the symbol stored in an IQ file");
    demodulate_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
    demodulate_cmd->add_option("--in", demod.in, "Input .iq path")->required();
    demodulate_cmd->add_option("--scheme", demod.scheme, "Defaults to the sidecar's scheme");
    demodulate_cmd->add_option("--detector", demod.detector, "coherent | noncoherent")
        ->capture_default_str();
    demodulate_cmd->add_option("--h", demod.h, "Channel gain re,im (coherent)");
    demodulate_cmd->add_flag("--json", demod.json_output, "Print a JSON report");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("ber-sweep", "Run the BER sweeps of a campaign file");
    sweep_cmd->add_option("--campaign", sweep.campaign, "Campaign JSON")->required();
    sweep_cmd->add_option("--out", sweep.out, "Output directory (default $DMTDM_OUT_DIR or .)");
    sweep_cmd->add_option("--workers", sweep.workers, "Worker threads")->capture_default_str();

    SeEeArgs se;
    auto* se_cmd = app.add_subcommand("se-ee", "Spectral vs energy efficiency curves");
    se_cmd->add_option("--campaign", se.campaign, "Use the sweeps of a campaign file");
    se_cmd->add_option("--scheme", se.schemes, "One or more schemes")->delimiter(',');
    se_cmd->add_option("--detector", se.detector)->capture_default_str();
    se_cmd->add_option("--lambda", se.lambda)->capture_default_str();
    se_cmd->add_option("--seed", se.seed)->capture_default_str();
    se_cmd->add_option("--start-db", se.start_db, "Search start")->capture_default_str();
    se_cmd->add_option("--stop-db", se.stop_db, "Search stop")->capture_default_str();
    add_stop_flags(se_cmd, se.min_errors, se.max_symbols);
    se_cmd->add_option("--out", se.out, "Output directory");
    se_cmd->add_option("--workers", se.workers)->capture_default_str();

    ImpairmentArgs imp;
    auto* imp_cmd = app.add_subcommand("impairment", "BER penalty of a phase or frequency offset");
    imp_cmd->add_option("--scheme", imp.scheme)->capture_default_str();
    imp_cmd->add_option("--detector", imp.detector)->capture_default_str();
    imp_cmd->add_option("--lambda", imp.lambda)->capture_default_str();
    auto* po_opt = imp_cmd->add_option("--po", imp.po, "Phase offset in radians");
    auto* fo_opt = imp_cmd->add_option("--fo", imp.fo, "Frequency offset in cycles per symbol");
    po_opt->excludes(fo_opt);
    imp_cmd->add_option("--ebn0", imp.ebn0, "start:stop:step or a,b,c (dB)")->capture_default_str();
    imp_cmd->add_option("--seed", imp.seed)->capture_default_str();
    add_stop_flags(imp_cmd, imp.min_errors, imp.max_symbols);
    imp_cmd->add_option("--out", imp.out, "Output directory");
    imp_cmd->add_option("--workers", imp.workers)->capture_default_str();

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "SIR/SINR table and oracle residuals as JSON");
    analyze_cmd->add_option("--lambda", an.lambda)->capture_default_str();
    analyze_cmd->add_option("--sigma2", an.sigma2, "Noise variances for the SINR table")
        ->capture_default_str();
    analyze_cmd->add_option("--trials", an.trials, "Random inputs per lambda")->capture_default_str();
    analyze_cmd->add_option("--seed", an.seed)->capture_default_str();
    analyze_cmd->add_option("--out", an.out, "Write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (modulate_cmd->parsed()) {
            return cmd_modulate(mod, out);
        }
        if (demodulate_cmd->parsed()) {
            return cmd_demodulate(demod, out);
        }
        if (sweep_cmd->parsed()) {
            return cmd_ber_sweep(sweep, out);
        }
        if (se_cmd->parsed()) {
            return cmd_se_ee(se, out);
        }
        if (imp_cmd->parsed()) {
            return cmd_impairment(imp, out);
        }
        return cmd_analyze(an, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const CampaignError& e) {
        err << "campaign error: " << e.what() << "\n";
        return kSchema;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

}  // namespace dmtdm::cli

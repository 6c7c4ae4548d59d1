// dmtdm-cli: modulation, detection, analysis and BER campaigns from the shell.

#pragma once

#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dmtdm/signal.hpp"

namespace dmtdm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSchema = 2, kRuntime = 3 };

/// Default output directory when --out is not given.
inline constexpr const char* kOutDirEnv = "DMTDM_OUT_DIR";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "8", "6..12" or "6,8,10". Throws UsageError.
std::vector<int> parse_lambda_list(std::string_view text);

/// "re,im". Throws UsageError.
Complex parse_complex(std::string_view text);

/// "start:stop:step" or a comma list "0,2.5,5". Throws UsageError.
std::vector<double> parse_grid(std::string_view text);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dmtdm::cli

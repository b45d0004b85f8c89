#pragma once

// Command dispatch shared by the kambeam tool and the tests.
//
// Every command reads the [<command>] section of the config (plus overrides) and
// produces a canonical JSON report. Exit codes: 0 ok, 2 a domain check failed
// (admissibility, Melnikov, small divisor), 1 any other error.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kambeam/config.hpp"

namespace kambeam {

inline constexpr const char* kOutDirEnv = "KAMBEAM_OUT_DIR";

struct RunOptions {
    std::string config_path;                      // empty: defaults only
    std::map<std::string, std::string> overrides;  // key -> value in the command's section ("section.key" for report)
    std::string out_path;                         // empty: $KAMBEAM_OUT_DIR/<command>.<ext> or no file
    std::string format = "json";                  // json | csv
};

struct RunResult {
    int exit_code = 0;
    std::string report;  // bytes written (or to print)
    std::string message;
    std::vector<std::string> files;
};

const std::vector<std::string>& commands();

// Never throws: errors are mapped onto the exit code and message.
RunResult run(const std::string& command, const RunOptions& options);

// JSON (a sitegen report or an array of pairs) or whitespace separated pairs.
std::vector<BigSite> load_sites_file(const std::string& path);

}  // namespace kambeam

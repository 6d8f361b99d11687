#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kagome/config.hpp"

namespace kagome {

/// Subcommands accepted by run_command; "reproduce" takes a figure target.
std::vector<std::string> command_names();
std::vector<std::string> reproduce_targets();

/// Runs one subcommand into `out`, writing CSVs, images and manifest.json.
/// Returns the summary stored in the manifest. On failure a FAILED marker
/// holding the error is left in `out` and the exception is rethrown.
nlohmann::json run_command(const std::string& command, const std::string& target, const RunConfig& cfg,
                           const std::filesystem::path& out, std::ostream* log = nullptr);

/// Machine-readable description of an exception thrown by run_command or
/// by configuration loading.
nlohmann::json error_json(const std::exception& e);

} // namespace kagome

#pragma once

#include <string>
#include <vector>

#include "kml/config.hpp"

namespace kml {

inline constexpr const char* kToolVersion = "1.0.0";

/// Per-run record written next to the outputs.
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string tool_version = kToolVersion;
    std::string started_at;
    std::string finished_at;
    std::vector<std::pair<std::string, bool>> checks;
    std::vector<std::string> outputs;
    std::vector<std::string> notes;

    json to_json() const;
    void write(const std::string& out_dir) const;
};

/// Embedded JSON schema and default configuration per experiment command.
json command_schema(const std::string& command);
json default_config(const std::string& command);

/// Merge a user document over the defaults after strict validation.
json load_config(const std::string& command, const json& user);

RunManifest run_moment(const json& config, const std::string& out_dir);
RunManifest run_bounds(const json& config, const std::string& out_dir);
RunManifest run_spectrum(const json& config, const std::string& out_dir);
RunManifest run_mingap(const json& config, const std::string& out_dir);
RunManifest run_nystrom(const json& config, const std::string& out_dir);

} // namespace kml

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fdwm {

/// Plain-text sidecar recording how an artifact was produced: command, full
/// config snapshot, seeds, input/output content hashes, timings. Replaying
/// the recorded command and config reproduces byte-identical artifacts.
struct RunManifest {
    std::string command;
    std::string library_version;
    std::map<std::string, std::string> config;  // full snapshot, key=value
    std::map<std::string, std::uint64_t> seeds;
    std::vector<std::pair<std::string, std::uint64_t>> inputs;   // path, hash
    std::vector<std::pair<std::string, std::uint64_t>> outputs;  // path, hash
    std::vector<std::pair<std::string, double>> timings_ms;

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
    static RunManifest read(const std::filesystem::path& path);
};

/// Sidecar path convention: "<artifact>.manifest".
std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

/// Staleness check for a consumed artifact: its bytes must match the hash
/// its manifest recorded, and every input recorded in that manifest must
/// still hash to the recorded value. Returns an empty string when fresh, or
/// a human-readable description naming the stale artifact. Artifacts
/// without a manifest are accepted as-is.
std::string check_artifact_fresh(const std::filesystem::path& artifact);

}  // namespace fdwm

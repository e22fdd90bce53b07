#include "fdwm/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include "fdwm/tensor_io.hpp"
#include "fdwm/version.hpp"

namespace fdwm {

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs.emplace_back(path.string(), hash_file(path));
}

void RunManifest::add_output(const std::filesystem::path& path) {
    outputs.emplace_back(path.string(), hash_file(path));
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("manifest: cannot open " + path.string());
    out << "fdwm-manifest v1\n";
    out << "command = " << command << "\n";
    out << "version = " << (library_version.empty() ? kVersion : library_version) << "\n";
    for (const auto& [k, v] : config) out << "config " << k << " = " << v << "\n";
    for (const auto& [k, v] : seeds) out << "seed " << k << " = " << v << "\n";
    for (const auto& [p, h] : inputs) out << "input " << p << " fnv1a:" << hash_hex(h) << "\n";
    for (const auto& [p, h] : outputs) out << "output " << p << " fnv1a:" << hash_hex(h) << "\n";
    for (const auto& [k, v] : timings_ms) out << "timing " << k << " = " << v << " ms\n";
    if (!out) throw std::runtime_error("manifest: write failed for " + path.string());
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
    RunManifest m;
    std::string line;
    std::getline(in, line);
    if (line != "fdwm-manifest v1")
        throw std::runtime_error("manifest: unrecognized header in " + path.string());
    const auto parse_hash = [](const std::string& tok) {
        if (tok.rfind("fnv1a:", 0) != 0)
            throw std::runtime_error("manifest: bad hash token '" + tok + "'");
        return std::stoull(tok.substr(6), nullptr, 16);
    };
    while (std::getline(in, line)) {
        if (line.rfind("command = ", 0) == 0) {
            m.command = line.substr(10);
        } else if (line.rfind("version = ", 0) == 0) {
            m.library_version = line.substr(10);
        } else if (line.rfind("config ", 0) == 0) {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos)
                m.config[line.substr(7, eq - 7)] = line.substr(eq + 3);
        } else if (line.rfind("seed ", 0) == 0) {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos)
                m.seeds[line.substr(5, eq - 5)] = std::stoull(line.substr(eq + 3));
        } else if (line.rfind("input ", 0) == 0) {
            const auto sp = line.rfind(' ');
            m.inputs.emplace_back(line.substr(6, sp - 6), parse_hash(line.substr(sp + 1)));
        } else if (line.rfind("output ", 0) == 0) {
            const auto sp = line.rfind(' ');
            m.outputs.emplace_back(line.substr(7, sp - 7), parse_hash(line.substr(sp + 1)));
        }
        // timing lines are informational only
    }
    return m;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& artifact) {
    std::filesystem::path p = artifact;
    p += ".manifest";
    return p;
}

std::string check_artifact_fresh(const std::filesystem::path& artifact) {
    const auto mp = manifest_path_for(artifact);
    if (!std::filesystem::exists(mp)) return "";  // no provenance to check
    RunManifest m = RunManifest::read(mp);
    for (const auto& [p, h] : m.outputs) {
        if (p != artifact.string()) continue;
        if (!std::filesystem::exists(p)) return "artifact " + p + " is missing";
        if (hash_file(p) != h)
            return "artifact " + p + " does not match its manifest (modified after creation)";
    }
    for (const auto& [p, h] : m.inputs) {
        if (!std::filesystem::exists(p))
            return "artifact " + artifact.string() + " is stale: input " + p + " is missing";
        if (hash_file(p) != h)
            return "artifact " + artifact.string() + " is stale: input " + p + " changed";
    }
    return "";
}

}  // namespace fdwm

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace axirank {

inline constexpr const char* kToolName = "axirank";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over the file's raw bytes. Throws IoError when unreadable.
uint64_t fnv1a_file(const std::string& path);
std::string fnv1a_hex(uint64_t digest);  // 16 lowercase hex chars

// Provenance record for one command invocation: what ran, with which resolved
// settings, over which exact input bytes, producing which files. Written
// before the command does any real work, so even a crashed run leaves its
// settings behind.
struct RunManifest {
    std::string command;
    uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;  // resolved key -> value
    std::vector<std::pair<std::string, std::string>> inputs;  // path -> content digest
    std::vector<std::string> outputs;                         // planned paths
};

void add_input(RunManifest& manifest, const std::string& path);
void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace axirank

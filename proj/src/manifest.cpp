#include "axirank/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "axirank/strfmt.hpp"
#include "axirank/types.hpp"

namespace axirank {

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("fnv1a_file: cannot open " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

std::string fnv1a_hex(uint64_t digest) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

void add_input(RunManifest& manifest, const std::string& path) {
    manifest.inputs.emplace_back(path, fnv1a_hex(fnv1a_file(path)));
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("write_manifest: cannot open " + path);
    out << "{\n";
    out << "  \"tool\": \"" << kToolName << "\",\n";
    out << "  \"version\": \"" << kToolVersion << "\",\n";
    out << "  \"command\": \"" << json_escape(manifest.command) << "\",\n";
    out << "  \"seed\": " << manifest.seed << ",\n";
    out << "  \"config\": {";
    for (size_t i = 0; i < manifest.config.size(); ++i) {
        if (i > 0) out << ",";
        out << "\n    \"" << json_escape(manifest.config[i].first) << "\": \""
            << json_escape(manifest.config[i].second) << "\"";
    }
    out << (manifest.config.empty() ? "" : "\n  ") << "},\n";
    out << "  \"inputs\": {";
    for (size_t i = 0; i < manifest.inputs.size(); ++i) {
        if (i > 0) out << ",";
        out << "\n    \"" << json_escape(manifest.inputs[i].first) << "\": \""
            << manifest.inputs[i].second << "\"";
    }
    out << (manifest.inputs.empty() ? "" : "\n  ") << "},\n";
    out << "  \"outputs\": [";
    for (size_t i = 0; i < manifest.outputs.size(); ++i) {
        if (i > 0) out << ",";
        out << "\n    \"" << json_escape(manifest.outputs[i]) << "\"";
    }
    out << (manifest.outputs.empty() ? "" : "\n  ") << "]\n";
    out << "}\n";
    if (!out) throw IoError("write_manifest: write failed for " + path);
}

}  // namespace axirank

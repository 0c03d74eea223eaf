#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

#include "axirank/types.hpp"

namespace axirank {

// Shortest round-trip decimal form of a double (std::to_chars). Every number
// written to run files, CSVs and reports goes through this so identical
// computations serialize to identical bytes.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw ParseError("format_double: conversion failed");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(context + ": bad number \"" + std::string(s) + "\"");
    }
    return v;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    return out;
}

}  // namespace axirank

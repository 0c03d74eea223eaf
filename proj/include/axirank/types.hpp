#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace axirank {

using TermId = int32_t;

// A tokenized query or document. `surface_len` records the token count before
// truncation so callers can tell how much the length cap dropped; for
// sequences produced by perturbation operators it equals the current length.
struct TokenSeq {
    std::vector<TermId> ids;
    int32_t surface_len = 0;

    bool empty() const { return ids.empty(); }
    size_t size() const { return ids.size(); }
};

// Error taxonomy. Everything derives from std::runtime_error so the CLI can
// funnel any library failure into one "runtime error" exit path.
struct EmptyTextError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyDatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalDivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace axirank

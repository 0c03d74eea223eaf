#pragma once

#include "axirank/types.hpp"

namespace axirank {

// Anything that maps a (query, document) pair to a real-valued relevance
// score. Implementations must be deterministic and side-effect free.
struct Scorer {
    virtual ~Scorer() = default;
    virtual double score(const TokenSeq& query, const TokenSeq& doc) const = 0;
};

}  // namespace axirank

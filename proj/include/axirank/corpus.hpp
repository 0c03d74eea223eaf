#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "axirank/types.hpp"
#include "axirank/vocab.hpp"

namespace axirank {

enum class VocabMode { kBuild, kFrozen };

// Length caps applied at tokenization time. Perturbation operators may push a
// document one past the cap; that is intentional (the cap binds tokenizer
// output only).
struct TokenizeLimits {
    size_t query_max = 16;
    size_t doc_max = 128;
};

// Lowercases and splits on any non-alphanumeric byte, keeps the first
// `max_len` tokens and records the pre-truncation count in surface_len.
// kBuild interns unseen terms into `vocab`; kFrozen maps them to the OOV id.
// Throws EmptyTextError when no token survives.
TokenSeq tokenize(std::string_view text, Vocabulary& vocab, VocabMode mode, size_t max_len);
TokenSeq tokenize_frozen(std::string_view text, const Vocabulary& vocab, size_t max_len);

// Space-joined terms; the OOV id renders as "<oov>". For dumps and debugging.
std::string detokenize(const TokenSeq& seq, const Vocabulary& vocab);

// One pairwise training example; fields index Dataset::queries / Dataset::docs.
struct TrainTriple {
    int32_t query = 0;
    int32_t pos_doc = 0;
    int32_t neg_doc = 0;
};

struct Dataset {
    Vocabulary vocab;
    std::vector<TokenSeq> queries;
    std::vector<TokenSeq> docs;
    std::vector<std::string> query_ids;  // external ids (q0000, ...)
    std::vector<std::string> doc_ids;
    std::vector<TrainTriple> triples;
    // Positive (relevant) docs per query; every doc not listed has label 0,
    // so each triple's positive outranks its negative by construction.
    std::vector<std::unordered_set<int32_t>> relevant_by_query;
    size_t skipped_lines = 0;

    int relevance_label(int32_t query, int32_t doc) const {
        return relevant_by_query[static_cast<size_t>(query)].count(doc) ? 1 : 0;
    }
};

// Reads "query \t positive \t negative" lines (UTF-8, LF). Malformed lines —
// wrong field count, a field that tokenizes to nothing, positive == negative,
// or a negative that is elsewhere positive for the same query — are counted
// in skipped_lines and dropped. Throws IoError if unreadable and
// EmptyDatasetError when no valid triple remains.
Dataset load_triples(const std::string& path, const TokenizeLimits& limits = {});

// Same parsing and skip rules, but token ids come from `vocab` (unknown terms
// map to its OOV id) and the vocabulary's document statistics are kept as-is.
// For feeding new text to a model trained under that vocabulary.
Dataset load_triples_frozen(const std::string& path, const Vocabulary& vocab,
                            const TokenizeLimits& limits = {});

// Keeps every triple of `n` uniformly drawn distinct queries and nothing
// else; vocabulary and id maps are left untouched so n == #queries returns
// the dataset unchanged. Throws std::invalid_argument when n is 0 or exceeds
// the distinct query count.
Dataset subsample_queries(const Dataset& data, size_t n, uint64_t seed);

}  // namespace axirank

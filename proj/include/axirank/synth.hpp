#pragma once

#include <cstdint>
#include <string>

namespace axirank {

// Synthetic retrieval corpus where relevance is exactly "covers the query's
// terms". The vocabulary splits into a query band (terms queries draw from)
// and a filler band (document padding only), so document length noise and
// term occurrence counts are controlled independently of relevance.
//
// Per training query: one positive covering every query term, plus negatives
// of four shapes — near misses dropping one term, weak docs with 1-2 terms,
// one doc repeating two terms at high count but covering nothing else, and
// one with no query terms. Each (positive, negative) pair becomes a triple.
// Dev queries get one graded positive and a candidate pool of near misses,
// weak docs, and no-term docs. Dev doc ids sort the positive after its
// negatives, so a scorer that ties every candidate ranks the positive last.
struct SynthConfig {
    int vocab_size = 2000;
    int query_band = 600;
    int train_queries = 500;
    int dev_queries = 100;
    int negs_per_query = 6;   // train: fixed mix of the four negative shapes
    int dev_negatives = 19;   // dev: near/weak/none mix derived from this
    int doc_len_min = 36;
    int doc_len_max = 44;
    uint64_t seed = 7;
};

struct SynthSummary {
    size_t train_triples = 0;
    size_t dev_queries = 0;
    size_t dev_candidates = 0;
};

// Writes train_triples.tsv, dev_qrels.tsv and dev_candidates.tsv into out_dir
// (which must exist). Byte-identical output for equal configs.
SynthSummary generate_synth(const SynthConfig& config, const std::string& out_dir);

}  // namespace axirank

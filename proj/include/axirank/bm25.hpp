#pragma once

#include "axirank/scorer.hpp"
#include "axirank/types.hpp"
#include "axirank/vocab.hpp"

namespace axirank {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

// Okapi BM25 with the smoothed, strictly positive idf from Vocabulary::idf:
//   score = sum over unique query terms of
//           idf(t) * tf * (k1+1) / (tf + k1 * (1 - b + b * |d| / avgdl))
// Terms absent from the document contribute zero. Requires collection
// statistics (throws EmptyDatasetError via avg_doc_len otherwise).
double bm25_score(const TokenSeq& q, const TokenSeq& d, const Vocabulary& vocab,
                  const Bm25Params& params = {});

struct Bm25Scorer final : Scorer {
    const Vocabulary* vocab;
    Bm25Params params;

    explicit Bm25Scorer(const Vocabulary& v, const Bm25Params& p = {}) : vocab(&v), params(p) {}
    double score(const TokenSeq& query, const TokenSeq& doc) const override {
        return bm25_score(query, doc, *vocab, params);
    }
};

}  // namespace axirank

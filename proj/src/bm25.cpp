#include "axirank/bm25.hpp"

#include <algorithm>
#include <vector>

namespace axirank {

double bm25_score(const TokenSeq& q, const TokenSeq& d, const Vocabulary& vocab,
                  const Bm25Params& params) {
    const double avgdl = vocab.avg_doc_len();
    const double dl = static_cast<double>(d.ids.size());
    const double len_norm = params.k1 * (1.0 - params.b + params.b * dl / avgdl);

    // Unique query terms in ascending-id order: the summation order is fixed,
    // so scores are reproducible bit for bit.
    std::vector<TermId> terms(q.ids);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

    double score = 0.0;
    for (const TermId t : terms) {
        const auto tf = static_cast<double>(std::count(d.ids.begin(), d.ids.end(), t));
        if (tf == 0.0) continue;
        score += vocab.idf(t) * tf * (params.k1 + 1.0) / (tf + len_norm);
    }
    return score;
}

}  // namespace axirank

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "axirank/corpus.hpp"
#include "axirank/scorer.hpp"
#include "axirank/types.hpp"

namespace axirank {

struct RankedEntry {
    std::string doc_id;
    double score = 0.0;
    int grade = 0;
};

// One query's ranking: entries ordered by descending score, ties broken by
// ascending doc id.
struct RankedList {
    std::string query_id;
    std::vector<RankedEntry> entries;
};

struct CandidateDoc {
    std::string doc_id;
    TokenSeq tokens;
    int grade = 0;
};

// Scores every candidate and returns the sorted list. Scorer errors
// propagate.
RankedList rerank(const Scorer& scorer, const std::string& query_id, const TokenSeq& query,
                  std::span<const CandidateDoc> candidates);

// Reciprocal rank of the first entry with grade >= rel_threshold, 0 if none.
// cutoff == 0 means uncapped; otherwise ranks past the cutoff score 0.
double mrr(const RankedList& list, int rel_threshold = 1, size_t cutoff = 0);

// Mean over the list's relevant entries of precision at their rank; 0 when
// the list has no relevant entry.
double average_precision(const RankedList& list, int rel_threshold = 1);

// NDCG@k with gains 2^grade - 1 and discount log2(rank + 1); the ideal
// ranking reorders this list's own grades. 0 when every grade is 0.
double ndcg_at(const RankedList& list, size_t k);

struct QueryMetrics {
    std::string query_id;
    double mrr = 0.0;
    double ap = 0.0;
    std::vector<double> ndcg;  // ndcg[i] = NDCG@(i+1), i < ndcg_max_k
};

struct MetricReport {
    size_t query_count = 0;
    size_t ndcg_max_k = 10;
    std::vector<QueryMetrics> per_query;
    double mean_mrr = 0.0;
    double mean_ap = 0.0;
    std::vector<double> mean_ndcg;
};

MetricReport evaluate_lists(std::span<const RankedList> lists, size_t ndcg_max_k = 10,
                            int rel_threshold = 1, size_t mrr_cutoff = 0);

// JSON-lines: one object per query, then one summary object. Byte-stable for
// identical inputs.
std::string report_to_jsonl(const MetricReport& report);
std::string report_to_table(const MetricReport& report);

// ---- file formats ----------------------------------------------------------

// qrels: "query-id \t doc-id \t grade". Duplicate pairs keep the last grade.
using Qrels = std::map<std::string, std::map<std::string, int>>;
Qrels load_qrels(const std::string& path);

struct RunEntry {
    std::string query_id;
    std::string doc_id;
    double score = 0.0;
};
using Run = std::vector<RunEntry>;

// run: "query-id \t doc-id \t score".
Run load_run(const std::string& path);
void write_run(const std::string& path, const Run& run);
Run run_from_lists(std::span<const RankedList> lists);

// Builds ranked lists from a run file, grading by qrels (absent -> 0).
// Queries appear in first-occurrence order of the run.
std::vector<RankedList> lists_from_run(const Run& run, const Qrels& qrels);

// ---- dev / rerank sets -----------------------------------------------------

struct DevQuery {
    std::string query_id;
    TokenSeq query;
    std::vector<CandidateDoc> candidates;
};

struct DevSet {
    std::vector<DevQuery> queries;
};

// candidates file: "query-id \t query-text \t doc-id \t doc-text", one
// candidate per line, tokenized frozen against `vocab`; grades attached from
// the qrels file (absent -> 0).
DevSet load_dev_set(const std::string& candidates_path, const std::string& qrels_path,
                    const Vocabulary& vocab, const TokenizeLimits& limits = {});

// Macro-averaged MRR of a scorer over a dev set — the model-selection metric.
double dev_mean_mrr(const Scorer& scorer, const DevSet& dev, size_t cutoff = 0);

// Uniform draw of n dev queries, kept in their original order. Throws
// std::invalid_argument when n is 0 or exceeds the query count.
DevSet subsample_dev(const DevSet& dev, size_t n, uint64_t seed);

}  // namespace axirank

#include "axirank/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "axirank/rng.hpp"
#include "axirank/strfmt.hpp"

namespace axirank {

namespace {

void sort_entries(std::vector<RankedEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        // NaN scores sort last; without this the comparator would lose strict
        // weak ordering and hand std::sort undefined behavior.
        const bool a_nan = std::isnan(a.score);
        const bool b_nan = std::isnan(b.score);
        if (a_nan != b_nan) return b_nan;
        if (!a_nan && a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
}

std::vector<std::string> split_fields(const std::string& line, size_t expected,
                                      const std::string& context) {
    std::vector<std::string> fields(1);
    for (const char c : line) {
        if (c == '\t') {
            fields.emplace_back();
        } else {
            fields.back().push_back(c);
        }
    }
    if (fields.size() != expected) {
        throw ParseError(context + ": expected " + std::to_string(expected) + " fields, got " +
                         std::to_string(fields.size()));
    }
    return fields;
}

}  // namespace

RankedList rerank(const Scorer& scorer, const std::string& query_id, const TokenSeq& query,
                  std::span<const CandidateDoc> candidates) {
    RankedList list;
    list.query_id = query_id;
    list.entries.reserve(candidates.size());
    for (const CandidateDoc& c : candidates) {
        list.entries.push_back({c.doc_id, scorer.score(query, c.tokens), c.grade});
    }
    sort_entries(list.entries);
    return list;
}

double mrr(const RankedList& list, int rel_threshold, size_t cutoff) {
    const size_t n = cutoff == 0 ? list.entries.size() : std::min(cutoff, list.entries.size());
    for (size_t r = 0; r < n; ++r) {
        if (list.entries[r].grade >= rel_threshold) return 1.0 / static_cast<double>(r + 1);
    }
    return 0.0;
}

double average_precision(const RankedList& list, int rel_threshold) {
    size_t relevant = 0;
    for (const RankedEntry& e : list.entries) {
        if (e.grade >= rel_threshold) ++relevant;
    }
    if (relevant == 0) return 0.0;
    size_t hits = 0;
    double sum = 0.0;
    for (size_t r = 0; r < list.entries.size(); ++r) {
        if (list.entries[r].grade >= rel_threshold) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(relevant);
}

double ndcg_at(const RankedList& list, size_t k) {
    const size_t n = std::min(k, list.entries.size());
    auto gain = [](int grade) { return std::pow(2.0, static_cast<double>(grade)) - 1.0; };
    double dcg = 0.0;
    for (size_t r = 0; r < n; ++r) {
        dcg += gain(list.entries[r].grade) / std::log2(static_cast<double>(r + 2));
    }
    std::vector<int> grades;
    grades.reserve(list.entries.size());
    for (const RankedEntry& e : list.entries) grades.push_back(e.grade);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double idcg = 0.0;
    for (size_t r = 0; r < n; ++r) {
        idcg += gain(grades[r]) / std::log2(static_cast<double>(r + 2));
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

MetricReport evaluate_lists(std::span<const RankedList> lists, size_t ndcg_max_k,
                            int rel_threshold, size_t mrr_cutoff) {
    MetricReport report;
    report.ndcg_max_k = ndcg_max_k;
    report.query_count = lists.size();
    report.mean_ndcg.assign(ndcg_max_k, 0.0);
    for (const RankedList& list : lists) {
        QueryMetrics qm;
        qm.query_id = list.query_id;
        qm.mrr = mrr(list, rel_threshold, mrr_cutoff);
        qm.ap = average_precision(list, rel_threshold);
        qm.ndcg.reserve(ndcg_max_k);
        for (size_t k = 1; k <= ndcg_max_k; ++k) qm.ndcg.push_back(ndcg_at(list, k));
        report.mean_mrr += qm.mrr;
        report.mean_ap += qm.ap;
        for (size_t i = 0; i < ndcg_max_k; ++i) report.mean_ndcg[i] += qm.ndcg[i];
        report.per_query.push_back(std::move(qm));
    }
    if (report.query_count > 0) {
        const auto n = static_cast<double>(report.query_count);
        report.mean_mrr /= n;
        report.mean_ap /= n;
        for (double& v : report.mean_ndcg) v /= n;
    }
    return report;
}

std::string report_to_jsonl(const MetricReport& report) {
    std::string out;
    auto ndcg_json = [](const std::vector<double>& v) {
        std::string s = "[";
        for (size_t i = 0; i < v.size(); ++i) {
            if (i > 0) s += ",";
            s += format_double(v[i]);
        }
        return s + "]";
    };
    for (const QueryMetrics& qm : report.per_query) {
        out += "{\"query_id\":\"" + json_escape(qm.query_id) + "\",\"mrr\":" + format_double(qm.mrr) +
               ",\"map\":" + format_double(qm.ap) + ",\"ndcg\":" + ndcg_json(qm.ndcg) + "}\n";
    }
    out += "{\"summary\":true,\"query_count\":" + std::to_string(report.query_count) +
           ",\"mean_mrr\":" + format_double(report.mean_mrr) +
           ",\"mean_map\":" + format_double(report.mean_ap) +
           ",\"mean_ndcg\":" + ndcg_json(report.mean_ndcg) + "}\n";
    return out;
}

std::string report_to_table(const MetricReport& report) {
    std::ostringstream out;
    out << "queries: " << report.query_count << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "MRR:  %.4f\n", report.mean_mrr);
    out << buf;
    std::snprintf(buf, sizeof(buf), "MAP:  %.4f\n", report.mean_ap);
    out << buf;
    for (size_t i = 0; i < report.mean_ndcg.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "NDCG@%-2zu: %.4f\n", i + 1, report.mean_ndcg[i]);
        out << buf;
    }
    return out.str();
}

Qrels load_qrels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_qrels: cannot open " + path);
    Qrels qrels;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = "qrels " + path + " line " + std::to_string(line_no);
        const auto fields = split_fields(line, 3, ctx);
        int grade = 0;
        const auto [ptr, ec] =
            std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), grade);
        if (ec != std::errc() || ptr != fields[2].data() + fields[2].size()) {
            throw ParseError(ctx + ": bad grade \"" + fields[2] + "\"");
        }
        qrels[fields[0]][fields[1]] = grade;
    }
    return qrels;
}

Run load_run(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_run: cannot open " + path);
    Run run;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = "run " + path + " line " + std::to_string(line_no);
        const auto fields = split_fields(line, 3, ctx);
        run.push_back({fields[0], fields[1], parse_double(fields[2], ctx)});
    }
    return run;
}

void write_run(const std::string& path, const Run& run) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("write_run: cannot open " + path);
    for (const RunEntry& e : run) {
        out << e.query_id << '\t' << e.doc_id << '\t' << format_double(e.score) << '\n';
    }
    if (!out) throw IoError("write_run: write failed for " + path);
}

Run run_from_lists(std::span<const RankedList> lists) {
    Run run;
    for (const RankedList& list : lists) {
        for (const RankedEntry& e : list.entries) run.push_back({list.query_id, e.doc_id, e.score});
    }
    return run;
}

std::vector<RankedList> lists_from_run(const Run& run, const Qrels& qrels) {
    std::vector<RankedList> lists;
    std::unordered_map<std::string, size_t> index_of;
    for (const RunEntry& e : run) {
        auto [it, fresh] = index_of.try_emplace(e.query_id, lists.size());
        if (fresh) lists.push_back({e.query_id, {}});
        int grade = 0;
        const auto qit = qrels.find(e.query_id);
        if (qit != qrels.end()) {
            const auto dit = qit->second.find(e.doc_id);
            if (dit != qit->second.end()) grade = dit->second;
        }
        lists[it->second].entries.push_back({e.doc_id, e.score, grade});
    }
    for (RankedList& list : lists) sort_entries(list.entries);
    return lists;
}

DevSet load_dev_set(const std::string& candidates_path, const std::string& qrels_path,
                    const Vocabulary& vocab, const TokenizeLimits& limits) {
    const Qrels qrels = load_qrels(qrels_path);
    std::ifstream in(candidates_path, std::ios::binary);
    if (!in) throw IoError("load_dev_set: cannot open " + candidates_path);

    DevSet dev;
    std::unordered_map<std::string, size_t> index_of;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = "candidates " + candidates_path + " line " + std::to_string(line_no);
        const auto fields = split_fields(line, 4, ctx);
        try {
            auto [it, fresh] = index_of.try_emplace(fields[0], dev.queries.size());
            if (fresh) {
                DevQuery dq;
                dq.query_id = fields[0];
                dq.query = tokenize_frozen(fields[1], vocab, limits.query_max);
                dev.queries.push_back(std::move(dq));
            }
            CandidateDoc cand;
            cand.doc_id = fields[2];
            cand.tokens = tokenize_frozen(fields[3], vocab, limits.doc_max);
            const auto qit = qrels.find(fields[0]);
            if (qit != qrels.end()) {
                const auto dit = qit->second.find(fields[2]);
                if (dit != qit->second.end()) cand.grade = dit->second;
            }
            dev.queries[it->second].candidates.push_back(std::move(cand));
        } catch (const EmptyTextError& e) {
            throw ParseError(ctx + ": " + e.what());
        }
    }
    if (dev.queries.empty()) throw EmptyDatasetError("load_dev_set: no candidates in " + candidates_path);
    return dev;
}

DevSet subsample_dev(const DevSet& dev, size_t n, uint64_t seed) {
    if (n == 0 || n > dev.queries.size()) {
        throw std::invalid_argument("subsample_dev: n=" + std::to_string(n) + " out of range [1, " +
                                    std::to_string(dev.queries.size()) + "]");
    }
    std::vector<size_t> order(dev.queries.size());
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng = make_rng(seed, RngStream::kDevSubsample);
    for (size_t i = 0; i < n; ++i) {
        const size_t j = i + static_cast<size_t>(uniform_below(rng, order.size() - i));
        std::swap(order[i], order[j]);
    }
    std::vector<size_t> keep(order.begin(), order.begin() + static_cast<long>(n));
    std::sort(keep.begin(), keep.end());
    DevSet out;
    out.queries.reserve(n);
    for (const size_t i : keep) out.queries.push_back(dev.queries[i]);
    return out;
}

double dev_mean_mrr(const Scorer& scorer, const DevSet& dev, size_t cutoff) {
    if (dev.queries.empty()) throw EmptyDatasetError("dev_mean_mrr: empty dev set");
    double sum = 0.0;
    for (const DevQuery& dq : dev.queries) {
        const RankedList list = rerank(scorer, dq.query_id, dq.query, dq.candidates);
        sum += mrr(list, 1, cutoff);
    }
    return sum / static_cast<double>(dev.queries.size());
}

}  // namespace axirank

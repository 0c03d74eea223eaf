#include "axirank/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <stdexcept>

#include "axirank/rng.hpp"

namespace axirank {

namespace {

bool is_token_byte(unsigned char c) {
    return std::isalnum(c) != 0;
}

std::vector<std::string> split_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_token_byte(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

TokenSeq tokenize_impl(std::string_view text, const Vocabulary& vocab, Vocabulary* mutable_vocab,
                       size_t max_len) {
    const std::vector<std::string> tokens = split_tokens(text);
    if (tokens.empty()) throw EmptyTextError("tokenize: no tokens in \"" + std::string(text) + "\"");
    TokenSeq seq;
    seq.surface_len = static_cast<int32_t>(tokens.size());
    const size_t keep = std::min(tokens.size(), max_len);
    seq.ids.reserve(keep);
    for (size_t i = 0; i < keep; ++i) {
        if (mutable_vocab != nullptr) {
            seq.ids.push_back(mutable_vocab->add_term(tokens[i]));
        } else {
            const TermId id = vocab.id_of(tokens[i]);
            seq.ids.push_back(id == Vocabulary::kNoTerm ? vocab.oov_id() : id);
        }
    }
    return seq;
}

}  // namespace

TokenSeq tokenize(std::string_view text, Vocabulary& vocab, VocabMode mode, size_t max_len) {
    return tokenize_impl(text, vocab, mode == VocabMode::kBuild ? &vocab : nullptr, max_len);
}

TokenSeq tokenize_frozen(std::string_view text, const Vocabulary& vocab, size_t max_len) {
    return tokenize_impl(text, vocab, nullptr, max_len);
}

std::string detokenize(const TokenSeq& seq, const Vocabulary& vocab) {
    std::string out;
    for (size_t i = 0; i < seq.ids.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += vocab.term_of(seq.ids[i]);
    }
    return out;
}

namespace {

Dataset load_triples_impl(const std::string& path, const TokenizeLimits& limits,
                          const Vocabulary* frozen) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_triples: cannot open " + path);

    std::vector<std::array<std::string, 3>> rows;
    std::vector<bool> well_formed;
    std::string line;
    size_t skipped = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;  // blank lines are not triples and not errors
        std::array<std::string, 3> fields;
        size_t field = 0;
        bool ok = true;
        for (const char c : line) {
            if (c == '\t') {
                ++field;
                if (field > 2) {
                    ok = false;
                    break;
                }
            } else {
                fields[field].push_back(c);
            }
        }
        if (field != 2) ok = false;
        rows.push_back(std::move(fields));
        well_formed.push_back(ok);
        if (!ok) ++skipped;
    }

    // First pass: collect (query text -> positive texts) so a line whose
    // negative is elsewhere a positive of the same query can be rejected —
    // otherwise that triple would break the label ordering invariant.
    std::map<std::string, std::unordered_set<std::string>> positives_of;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (well_formed[i]) positives_of[rows[i][0]].insert(rows[i][1]);
    }

    Dataset data;
    if (frozen != nullptr) data.vocab = *frozen;
    std::unordered_map<std::string, int32_t> query_id_of;
    std::unordered_map<std::string, int32_t> doc_id_of;

    auto tokenize_field = [&](const std::string& text, size_t max_len) {
        return frozen != nullptr ? tokenize_frozen(text, data.vocab, max_len)
                                 : tokenize(text, data.vocab, VocabMode::kBuild, max_len);
    };
    auto intern_query = [&](const std::string& text) -> int32_t {
        auto it = query_id_of.find(text);
        if (it != query_id_of.end()) return it->second;
        TokenSeq seq = tokenize_field(text, limits.query_max);
        const auto id = static_cast<int32_t>(data.queries.size());
        data.queries.push_back(std::move(seq));
        data.query_ids.push_back("q" + std::to_string(id));
        data.relevant_by_query.emplace_back();
        query_id_of.emplace(text, id);
        return id;
    };
    auto intern_doc = [&](const std::string& text) -> int32_t {
        auto it = doc_id_of.find(text);
        if (it != doc_id_of.end()) return it->second;
        TokenSeq seq = tokenize_field(text, limits.doc_max);
        // df/statistics update once per distinct doc; a frozen vocabulary
        // keeps the statistics it came with.
        if (frozen == nullptr) data.vocab.add_document(seq.ids);
        const auto id = static_cast<int32_t>(data.docs.size());
        data.docs.push_back(std::move(seq));
        data.doc_ids.push_back("d" + std::to_string(id));
        doc_id_of.emplace(text, id);
        return id;
    };

    for (size_t i = 0; i < rows.size(); ++i) {
        if (!well_formed[i]) continue;
        const auto& [q_text, pos_text, neg_text] = rows[i];
        if (pos_text == neg_text || positives_of[q_text].count(neg_text) > 0) {
            ++skipped;
            continue;
        }
        int32_t q, pos, neg;
        try {
            q = intern_query(q_text);
            pos = intern_doc(pos_text);
            neg = intern_doc(neg_text);
        } catch (const EmptyTextError&) {
            ++skipped;
            continue;
        }
        data.triples.push_back({q, pos, neg});
        data.relevant_by_query[static_cast<size_t>(q)].insert(pos);
    }

    data.skipped_lines = skipped;
    if (data.triples.empty()) throw EmptyDatasetError("load_triples: no valid triples in " + path);
    return data;
}

}  // namespace

Dataset load_triples(const std::string& path, const TokenizeLimits& limits) {
    return load_triples_impl(path, limits, nullptr);
}

Dataset load_triples_frozen(const std::string& path, const Vocabulary& vocab,
                            const TokenizeLimits& limits) {
    return load_triples_impl(path, limits, &vocab);
}

Dataset subsample_queries(const Dataset& data, size_t n, uint64_t seed) {
    // Distinct queries in first-appearance order over the triple list.
    std::vector<int32_t> order;
    std::unordered_set<int32_t> seen;
    for (const TrainTriple& t : data.triples) {
        if (seen.insert(t.query).second) order.push_back(t.query);
    }
    if (n == 0 || n > order.size()) {
        throw std::invalid_argument("subsample_queries: n=" + std::to_string(n) + " out of range [1, " +
                                    std::to_string(order.size()) + "]");
    }

    Rng rng = make_rng(seed, RngStream::kSubsample);
    // Partial Fisher-Yates: after i swaps the first i entries are a uniform
    // draw of i distinct queries.
    for (size_t i = 0; i < n; ++i) {
        const size_t j = i + static_cast<size_t>(uniform_below(rng, order.size() - i));
        std::swap(order[i], order[j]);
    }
    std::unordered_set<int32_t> keep(order.begin(), order.begin() + static_cast<long>(n));

    Dataset out = data;
    out.triples.clear();
    for (const TrainTriple& t : data.triples) {
        if (keep.count(t.query) > 0) out.triples.push_back(t);
    }
    return out;
}

}  // namespace axirank

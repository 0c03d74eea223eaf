#include "axirank/vocab.hpp"

#include <cmath>
#include <stdexcept>

namespace axirank {

TermId Vocabulary::add_term(std::string_view term) {
    auto it = term_to_id_.find(std::string(term));
    if (it != term_to_id_.end()) return it->second;
    const TermId id = static_cast<TermId>(id_to_term_.size());
    id_to_term_.emplace_back(term);
    df_.push_back(0);
    term_to_id_.emplace(std::string(term), id);
    return id;
}

TermId Vocabulary::id_of(std::string_view term) const {
    auto it = term_to_id_.find(std::string(term));
    return it == term_to_id_.end() ? kNoTerm : it->second;
}

const std::string& Vocabulary::term_of(TermId id) const {
    static const std::string kOovMarker = "<oov>";
    if (id >= 0 && static_cast<size_t>(id) < id_to_term_.size()) return id_to_term_[id];
    return kOovMarker;
}

void Vocabulary::add_document(const std::vector<TermId>& ids) {
    total_docs_ += 1;
    total_terms_ += static_cast<int64_t>(ids.size());
    // df counts documents, so bump each distinct id once. Documents are
    // short (length-capped); the quadratic "seen before me?" scan avoids an
    // allocation and keeps this deterministic and simple.
    for (size_t i = 0; i < ids.size(); ++i) {
        const TermId id = ids[i];
        if (id < 0 || static_cast<size_t>(id) >= df_.size()) continue;  // OOV carries no df
        bool seen = false;
        for (size_t j = 0; j < i; ++j) {
            if (ids[j] == id) {
                seen = true;
                break;
            }
        }
        if (!seen) df_[id] += 1;
    }
}

int64_t Vocabulary::df(TermId id) const {
    if (id < 0 || static_cast<size_t>(id) >= df_.size()) return 0;
    return df_[id];
}

double Vocabulary::avg_doc_len() const {
    if (total_docs_ == 0) throw EmptyDatasetError("avg_doc_len: no documents ingested");
    return static_cast<double>(total_terms_) / static_cast<double>(total_docs_);
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> terms, std::vector<int64_t> df,
                                  int64_t total_docs, int64_t total_terms) {
    if (terms.size() != df.size()) throw ParseError("vocabulary: term/df size mismatch");
    Vocabulary v;
    v.id_to_term_ = std::move(terms);
    v.df_ = std::move(df);
    v.total_docs_ = total_docs;
    v.total_terms_ = total_terms;
    for (size_t i = 0; i < v.id_to_term_.size(); ++i) {
        v.term_to_id_.emplace(v.id_to_term_[i], static_cast<TermId>(i));
    }
    return v;
}

double Vocabulary::idf(TermId id) const {
    const double n = static_cast<double>(total_docs_);
    const double d = static_cast<double>(df(id));
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

}  // namespace axirank

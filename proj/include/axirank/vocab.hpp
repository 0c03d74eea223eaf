#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "axirank/types.hpp"

namespace axirank {

// Term dictionary plus the collection statistics BM25 needs. Term ids are
// dense 0..size()-1 in first-seen order; one reserved id (== size()) stands
// for every out-of-vocabulary term and carries its own trainable embedding
// downstream. Document frequency is counted over documents only — a term
// that occurs just in query text keeps df = 0 and takes the same idf branch
// as OOV.
class Vocabulary {
  public:
    // Returns the id for `term`, adding it if unseen.
    TermId add_term(std::string_view term);
    // Returns the id for `term` or kNoTerm if absent.
    TermId id_of(std::string_view term) const;
    const std::string& term_of(TermId id) const;

    // Folds one document's tokens into df / document count / token count.
    // Call exactly once per distinct document.
    void add_document(const std::vector<TermId>& ids);

    size_t size() const { return id_to_term_.size(); }
    TermId oov_id() const { return static_cast<TermId>(id_to_term_.size()); }
    bool is_oov(TermId id) const { return id == oov_id(); }

    int64_t df(TermId id) const;
    int64_t total_docs() const { return total_docs_; }
    int64_t total_terms() const { return total_terms_; }
    double avg_doc_len() const;

    // Smoothed inverse document frequency, strictly positive and strictly
    // decreasing in df. Ids without a df (OOV included) use df = 0.
    double idf(TermId id) const;

    // Rebuilds a vocabulary from serialized pieces (checkpoint loading).
    static Vocabulary from_parts(std::vector<std::string> terms, std::vector<int64_t> df,
                                 int64_t total_docs, int64_t total_terms);

    static constexpr TermId kNoTerm = -1;

  private:
    std::unordered_map<std::string, TermId> term_to_id_;
    std::vector<std::string> id_to_term_;
    std::vector<int64_t> df_;
    int64_t total_docs_ = 0;
    int64_t total_terms_ = 0;
};

}  // namespace axirank

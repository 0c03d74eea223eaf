#include "axirank/axioms.hpp"

#include <algorithm>
#include <stdexcept>

namespace axirank {

namespace {

// Unique term ids in first-occurrence order, so uniform sampling over
// eligible terms is reproducible regardless of container hashing.
std::vector<TermId> unique_terms(const TokenSeq& seq) {
    std::vector<TermId> out;
    for (const TermId id : seq.ids) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    return out;
}

int32_t count_of(const TokenSeq& seq, TermId id) {
    return static_cast<int32_t>(std::count(seq.ids.begin(), seq.ids.end(), id));
}

PerturbationOutcome unapplied(const TokenSeq& d, PerturbKind kind) {
    PerturbationOutcome out;
    out.perturbed = d;
    out.applied = false;
    out.kind = kind;
    return out;
}

PerturbationOutcome insert_one(const TokenSeq& d, PerturbKind kind, TermId term, Rng& rng) {
    PerturbationOutcome out;
    out.kind = kind;
    out.applied = true;
    const auto pos = static_cast<size_t>(uniform_below(rng, d.ids.size() + 1));
    out.perturbed.ids = d.ids;
    out.perturbed.ids.insert(out.perturbed.ids.begin() + static_cast<long>(pos), term);
    out.perturbed.surface_len = static_cast<int32_t>(out.perturbed.ids.size());
    out.positions.push_back(static_cast<int32_t>(pos));
    return out;
}

}  // namespace

int delta_of(PerturbKind kind) {
    switch (kind) {
        case PerturbKind::kTfc1Add: return -1;  // perturbed gains a query term: it should win
        case PerturbKind::kTfc1Del: return +1;  // perturbed lost a query term: original should win
        case PerturbKind::kTfc3: return -1;     // perturbed covers one more distinct query term
        case PerturbKind::kLnc: return +1;      // perturbed gained non-query noise
    }
    throw std::invalid_argument("delta_of: bad kind");
}

const char* perturb_kind_name(PerturbKind kind) {
    switch (kind) {
        case PerturbKind::kTfc1Add: return "tfc1a";
        case PerturbKind::kTfc1Del: return "tfc1d";
        case PerturbKind::kTfc3: return "tfc3";
        case PerturbKind::kLnc: return "lnc";
    }
    throw std::invalid_argument("perturb_kind_name: bad kind");
}

PerturbationConstraint make_constraint(PerturbKind kind, int lnc_k) {
    PerturbationConstraint c;
    c.kind = kind;
    c.delta = delta_of(kind);
    c.k = kind == PerturbKind::kLnc ? lnc_k : 0;
    return c;
}

PerturbationConstraint sample_constraint(Rng& rng, int lnc_k) {
    return sample_constraint(rng, std::span<const PerturbKind>(kAllPerturbKinds), lnc_k);
}

PerturbationConstraint sample_constraint(Rng& rng, std::span<const PerturbKind> subset, int lnc_k) {
    if (subset.empty()) throw std::invalid_argument("sample_constraint: empty subset");
    const auto i = static_cast<size_t>(uniform_below(rng, subset.size()));
    return make_constraint(subset[i], lnc_k);
}

PerturbationOutcome perturb_tfc1_add(const TokenSeq& q, const TokenSeq& d, Rng& rng) {
    const std::vector<TermId> terms = unique_terms(q);
    if (terms.empty()) return unapplied(d, PerturbKind::kTfc1Add);
    const TermId term = terms[static_cast<size_t>(uniform_below(rng, terms.size()))];
    return insert_one(d, PerturbKind::kTfc1Add, term, rng);
}

PerturbationOutcome perturb_tfc1_del(const TokenSeq& q, const TokenSeq& d, Rng& rng) {
    std::vector<TermId> eligible;
    for (const TermId id : unique_terms(q)) {
        if (count_of(d, id) > 0) eligible.push_back(id);
    }
    if (eligible.empty()) return unapplied(d, PerturbKind::kTfc1Del);
    const TermId term = eligible[static_cast<size_t>(uniform_below(rng, eligible.size()))];

    PerturbationOutcome out;
    out.kind = PerturbKind::kTfc1Del;
    out.applied = true;
    for (size_t i = 0; i < d.ids.size(); ++i) {
        if (d.ids[i] == term) {
            out.positions.push_back(static_cast<int32_t>(i));
        } else {
            out.perturbed.ids.push_back(d.ids[i]);
        }
    }
    out.perturbed.surface_len = static_cast<int32_t>(out.perturbed.ids.size());
    return out;
}

PerturbationOutcome perturb_tfc3(const TokenSeq& q, const TokenSeq& d, Rng& rng) {
    std::vector<TermId> eligible;
    for (const TermId id : unique_terms(q)) {
        if (count_of(d, id) == 0) eligible.push_back(id);
    }
    if (eligible.empty()) return unapplied(d, PerturbKind::kTfc3);
    const TermId term = eligible[static_cast<size_t>(uniform_below(rng, eligible.size()))];
    return insert_one(d, PerturbKind::kTfc3, term, rng);
}

PerturbationOutcome perturb_lnc(const TokenSeq& q, const TokenSeq& d, const Vocabulary& vocab, int k,
                                Rng& rng) {
    if (k < 1) throw std::invalid_argument("perturb_lnc: k must be >= 1");
    const std::vector<TermId> q_terms = unique_terms(q);
    size_t in_vocab_query_terms = 0;
    for (const TermId id : q_terms) {
        if (id >= 0 && static_cast<size_t>(id) < vocab.size()) ++in_vocab_query_terms;
    }
    if (vocab.size() <= in_vocab_query_terms) return unapplied(d, PerturbKind::kLnc);

    PerturbationOutcome out;
    out.kind = PerturbKind::kLnc;
    out.applied = true;
    out.perturbed = d;
    for (int i = 0; i < k; ++i) {
        // Rejection-sample a vocabulary term that is not a query term. The
        // eligibility check above guarantees termination.
        TermId term;
        do {
            term = static_cast<TermId>(uniform_below(rng, vocab.size()));
        } while (std::find(q_terms.begin(), q_terms.end(), term) != q_terms.end());

        const auto pos = static_cast<size_t>(uniform_below(rng, out.perturbed.ids.size() + 1));
        out.perturbed.ids.insert(out.perturbed.ids.begin() + static_cast<long>(pos), term);
        // Earlier insertions at or after `pos` shifted right by one.
        for (int32_t& p : out.positions) {
            if (p >= static_cast<int32_t>(pos)) ++p;
        }
        out.positions.push_back(static_cast<int32_t>(pos));
    }
    out.perturbed.surface_len = static_cast<int32_t>(out.perturbed.ids.size());
    return out;
}

PerturbationOutcome apply_perturbation(const PerturbationConstraint& c, const TokenSeq& q,
                                       const TokenSeq& d, const Vocabulary& vocab, Rng& rng) {
    switch (c.kind) {
        case PerturbKind::kTfc1Add: return perturb_tfc1_add(q, d, rng);
        case PerturbKind::kTfc1Del: return perturb_tfc1_del(q, d, rng);
        case PerturbKind::kTfc3: return perturb_tfc3(q, d, rng);
        case PerturbKind::kLnc: return perturb_lnc(q, d, vocab, c.k, rng);
    }
    throw std::invalid_argument("apply_perturbation: bad kind");
}

Axiom axiom_of(PerturbKind kind) {
    switch (kind) {
        case PerturbKind::kTfc1Add:
        case PerturbKind::kTfc1Del: return Axiom::kTfc1;
        case PerturbKind::kTfc3: return Axiom::kTfc3;
        case PerturbKind::kLnc: return Axiom::kLnc;
    }
    throw std::invalid_argument("axiom_of: bad kind");
}

std::vector<PerturbKind> parse_axiom_list(const std::string& text) {
    if (text == "all") return {std::begin(kAllPerturbKinds), std::end(kAllPerturbKinds)};
    if (text == "none" || text.empty()) return {};
    std::vector<PerturbKind> out;
    std::string name;
    auto flush = [&] {
        bool found = false;
        for (const PerturbKind kind : kAllPerturbKinds) {
            if (name == perturb_kind_name(kind)) {
                for (const PerturbKind seen : out) {
                    if (seen == kind) {
                        throw std::invalid_argument("duplicate perturbation kind \"" + name + "\"");
                    }
                }
                out.push_back(kind);
                found = true;
                break;
            }
        }
        if (!found) throw std::invalid_argument("unknown perturbation kind \"" + name + "\"");
        name.clear();
    };
    for (const char c : text) {
        if (c == ',') {
            flush();
        } else {
            name.push_back(c);
        }
    }
    flush();
    return out;
}

std::string axioms_to_string(std::span<const PerturbKind> kinds) {
    if (kinds.empty()) return "none";
    std::string out;
    for (size_t i = 0; i < kinds.size(); ++i) {
        if (i > 0) out += ",";
        out += perturb_kind_name(kinds[i]);
    }
    return out;
}

bool axiom_holds(Axiom axiom, const TokenSeq& q, const TokenSeq& d_i, const TokenSeq& d_j,
                 const Scorer& scorer) {
    const double s_i = scorer.score(q, d_i);
    const double s_j = scorer.score(q, d_j);
    switch (axiom) {
        case Axiom::kTfc1: return s_i > s_j;
        case Axiom::kTfc3: return s_j > s_i;
        case Axiom::kLnc: return s_j <= s_i;  // non-strict: the noisier doc must not win
    }
    throw std::invalid_argument("axiom_holds: bad axiom");
}

}  // namespace axirank

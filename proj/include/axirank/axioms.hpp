#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "axirank/rng.hpp"
#include "axirank/scorer.hpp"
#include "axirank/types.hpp"
#include "axirank/vocab.hpp"

namespace axirank {

// The four document perturbations used for regularization. Each one carries a
// fixed preference direction `delta`: +1 when the original document should
// score at least as high as the perturbed one, -1 when the perturbed version
// should win.
enum class PerturbKind : int { kTfc1Add = 0, kTfc1Del = 1, kTfc3 = 2, kLnc = 3 };

inline constexpr std::array<PerturbKind, 4> kAllPerturbKinds = {
    PerturbKind::kTfc1Add, PerturbKind::kTfc1Del, PerturbKind::kTfc3, PerturbKind::kLnc};

int delta_of(PerturbKind kind);
const char* perturb_kind_name(PerturbKind kind);  // "tfc1a", "tfc1d", "tfc3", "lnc"

struct PerturbationConstraint {
    PerturbKind kind = PerturbKind::kTfc1Add;
    int delta = -1;
    int k = 0;  // number of inserted terms; meaningful for kLnc only
};

PerturbationConstraint make_constraint(PerturbKind kind, int lnc_k = 1);

// Uniform draw over `subset` (defaults to all four kinds).
PerturbationConstraint sample_constraint(Rng& rng, int lnc_k = 1);
PerturbationConstraint sample_constraint(Rng& rng, std::span<const PerturbKind> subset, int lnc_k);

// Result of applying one perturbation. When applied == false the input was
// out of the operator's domain and `perturbed` is an exact copy of the
// original. `positions` lists, for insertions, the indices of the inserted
// tokens in the perturbed sequence; for deletions, the indices of the removed
// tokens in the original sequence.
struct PerturbationOutcome {
    TokenSeq perturbed;
    bool applied = false;
    PerturbKind kind = PerturbKind::kTfc1Add;
    std::vector<int32_t> positions;
};

// Duplicate one uniformly chosen (unique) query term at a uniform position.
// Always applicable for a non-empty query.
PerturbationOutcome perturb_tfc1_add(const TokenSeq& q, const TokenSeq& d, Rng& rng);

// Delete every occurrence of one uniformly chosen query term that occurs in
// d; inapplicable when no query term does.
PerturbationOutcome perturb_tfc1_del(const TokenSeq& q, const TokenSeq& d, Rng& rng);

// Insert one uniformly chosen query term with zero count in d; inapplicable
// when d already covers every query term.
PerturbationOutcome perturb_tfc3(const TokenSeq& q, const TokenSeq& d, Rng& rng);

// Insert k terms drawn uniformly from vocabulary terms absent from q, each at
// an independent uniform position; inapplicable when no such term exists.
PerturbationOutcome perturb_lnc(const TokenSeq& q, const TokenSeq& d, const Vocabulary& vocab, int k,
                                Rng& rng);

PerturbationOutcome apply_perturbation(const PerturbationConstraint& c, const TokenSeq& q,
                                       const TokenSeq& d, const Vocabulary& vocab, Rng& rng);

// "all" -> the four kinds, "none" -> empty, otherwise a comma-separated list
// of kind names ("tfc1a,lnc"). Unknown names or duplicates -> invalid_argument.
std::vector<PerturbKind> parse_axiom_list(const std::string& text);
std::string axioms_to_string(std::span<const PerturbKind> kinds);  // "none" when empty

// The ordering axioms themselves, for checking a scorer against pairs that
// satisfy an axiom's antecedent. Arguments follow each axiom's own statement:
//   kTfc1: d_i has the higher query-term count        -> s(d_i) >  s(d_j)
//   kTfc3: d_j covers more distinct query terms       -> s(d_j) >  s(d_i)
//   kLnc:  d_j has one extra non-query term           -> s(d_j) <= s(d_i)
enum class Axiom { kTfc1, kTfc3, kLnc };

Axiom axiom_of(PerturbKind kind);
bool axiom_holds(Axiom axiom, const TokenSeq& q, const TokenSeq& d_i, const TokenSeq& d_j,
                 const Scorer& scorer);

}  // namespace axirank

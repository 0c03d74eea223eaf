#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "axirank/axioms.hpp"
#include "axirank/corpus.hpp"
#include "axirank/scorer.hpp"

namespace axirank {

// Per-operator tally of how often a scorer's orderings agree with the
// direction the perturbation is supposed to induce.
struct AuditAxiomStats {
    PerturbKind kind = PerturbKind::kTfc1Add;
    size_t generated = 0;   // sampled pairs, incl. ones the operator couldn't apply
    size_t applicable = 0;  // pairs where the perturbation actually happened
    size_t agreed = 0;      // applicable pairs ranked in the expected direction
    double margin_sum = 0.0;

    double rate() const {
        return applicable > 0 ? static_cast<double>(agreed) / static_cast<double>(applicable) : 0.0;
    }
    double mean_margin() const {
        return applicable > 0 ? margin_sum / static_cast<double>(applicable) : 0.0;
    }
};

struct AuditReport {
    std::vector<AuditAxiomStats> per_axiom;  // canonical operator order
    double oov_rate = 0.0;                   // OOV fraction of tokens in sampled pairs
    size_t pairs_per_axiom = 0;
    uint64_t seed = 0;
};

// Samples (query, doc) pairs from the dataset's triples, perturbs each doc with
// every requested operator, and scores original vs. perturbed. Margins are
// oriented so positive means "scorer agrees"; the length-noise operator counts
// ties as agreement, the others require a strict gap. If dump is non-null each
// applicable pair is written as a TSV row.
AuditReport audit(const Scorer& scorer, const Dataset& dataset,
                  std::span<const PerturbKind> kinds, size_t n_pairs, uint64_t seed,
                  int lnc_k = 1, std::ostream* dump = nullptr);

std::string audit_report_to_json(const AuditReport& report);
std::string audit_report_to_table(const AuditReport& report);

}  // namespace axirank

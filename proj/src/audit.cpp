#include "axirank/audit.hpp"

#include <sstream>

#include "axirank/rng.hpp"
#include "axirank/strfmt.hpp"

namespace axirank {

AuditReport audit(const Scorer& scorer, const Dataset& dataset,
                  std::span<const PerturbKind> kinds, size_t n_pairs, uint64_t seed,
                  int lnc_k, std::ostream* dump) {
    if (dataset.triples.empty()) throw EmptyDatasetError("audit: dataset has no triples");
    if (kinds.empty()) throw std::invalid_argument("audit: no perturbation kinds given");

    AuditReport report;
    report.pairs_per_axiom = n_pairs;
    report.seed = seed;
    Rng rng = make_rng(seed, RngStream::kAudit);

    size_t token_count = 0;
    size_t oov_count = 0;
    const TermId oov = dataset.vocab.oov_id();

    for (const PerturbKind kind : kinds) {
        AuditAxiomStats stats;
        stats.kind = kind;
        const PerturbationConstraint constraint = make_constraint(kind, lnc_k);
        for (size_t i = 0; i < n_pairs; ++i) {
            const TrainTriple& triple =
                dataset.triples[uniform_below(rng, dataset.triples.size())];
            const bool take_pos = uniform_below(rng, 2) == 0;
            const int32_t doc_idx = take_pos ? triple.pos_doc : triple.neg_doc;
            const TokenSeq& query = dataset.queries[triple.query];
            const TokenSeq& doc = dataset.docs[doc_idx];

            ++stats.generated;
            for (const TermId id : query.ids) {
                ++token_count;
                if (id == oov) ++oov_count;
            }
            for (const TermId id : doc.ids) {
                ++token_count;
                if (id == oov) ++oov_count;
            }

            PerturbationOutcome outcome =
                apply_perturbation(constraint, query, doc, dataset.vocab, rng);
            if (!outcome.applied || outcome.perturbed.empty()) continue;

            ++stats.applicable;
            const double s_orig = scorer.score(query, doc);
            const double s_pert = scorer.score(query, outcome.perturbed);
            const double margin = static_cast<double>(constraint.delta) * (s_orig - s_pert);
            const bool agreed = kind == PerturbKind::kLnc ? margin >= 0.0 : margin > 0.0;
            if (agreed) ++stats.agreed;
            stats.margin_sum += margin;

            if (dump != nullptr) {
                *dump << perturb_kind_name(kind) << '\t' << dataset.query_ids[triple.query]
                      << '\t' << dataset.doc_ids[doc_idx] << '\t' << format_double(s_orig)
                      << '\t' << format_double(s_pert) << '\t' << format_double(margin) << '\t'
                      << (agreed ? 1 : 0) << '\n';
            }
        }
        report.per_axiom.push_back(stats);
    }
    report.oov_rate =
        token_count > 0 ? static_cast<double>(oov_count) / static_cast<double>(token_count) : 0.0;
    return report;
}

std::string audit_report_to_json(const AuditReport& report) {
    std::string out = "{\"seed\":" + std::to_string(report.seed) +
                      ",\"pairs_per_axiom\":" + std::to_string(report.pairs_per_axiom) +
                      ",\"oov_rate\":" + format_double(report.oov_rate) + ",\"axioms\":[";
    for (size_t i = 0; i < report.per_axiom.size(); ++i) {
        const AuditAxiomStats& s = report.per_axiom[i];
        if (i > 0) out += ",";
        out += std::string("{\"kind\":\"") + perturb_kind_name(s.kind) + "\"" +
               ",\"generated\":" + std::to_string(s.generated) +
               ",\"applicable\":" + std::to_string(s.applicable) +
               ",\"agreed\":" + std::to_string(s.agreed) +
               ",\"agreement_rate\":" + format_double(s.rate()) +
               ",\"mean_margin\":" + format_double(s.mean_margin()) + "}";
    }
    out += "]}\n";
    return out;
}

std::string audit_report_to_table(const AuditReport& report) {
    std::ostringstream out;
    out << "pairs per operator: " << report.pairs_per_axiom << "   seed: " << report.seed << "\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "OOV token rate: %.4f\n", report.oov_rate);
    out << buf;
    out << "operator  generated  applicable  agreed  rate    mean_margin\n";
    for (const AuditAxiomStats& s : report.per_axiom) {
        std::snprintf(buf, sizeof(buf), "%-8s  %9zu  %10zu  %6zu  %.4f  %.6f\n",
                      perturb_kind_name(s.kind), s.generated, s.applicable, s.agreed, s.rate(),
                      s.mean_margin());
        out << buf;
    }
    return out.str();
}

}  // namespace axirank

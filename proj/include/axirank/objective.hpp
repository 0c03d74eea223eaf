#pragma once

#include <span>
#include <vector>

#include "axirank/axioms.hpp"
#include "axirank/knrm.hpp"
#include "axirank/types.hpp"

namespace axirank {

struct LossConfig {
    double epsilon = 1.0;  // ranking hinge margin
    double lambda = 0.1;   // regularization weight
    double mu = 0.1;       // perturbation hinge margin
};

// Pairwise ranking hinge: max{0, epsilon - (s_pos - s_neg)}.
double hinge_loss(double s_pos, double s_neg, double epsilon);

// One regularization hinge: max{0, mu - delta * (s_orig - s_pert)}. delta is
// the constraint's preference direction, so swapping the two scores while
// flipping delta leaves the value unchanged.
double ar_term(double s_orig, double s_pert, int delta, double mu);

// The same constraint applied to both documents of a triple. Outcomes whose
// perturbed sequence came out empty are stored as inapplicable: the neural
// scorer rejects empty input, and inapplicable already means "contributes
// zero loss".
struct TriplePerturbation {
    PerturbationConstraint constraint;
    PerturbationOutcome pos;
    PerturbationOutcome neg;
};

TriplePerturbation make_triple_perturbation(const PerturbationConstraint& c, const TokenSeq& q,
                                            const TokenSeq& d_pos, const TokenSeq& d_neg,
                                            const Vocabulary& vocab, Rng& rng);

struct TripleLossParts {
    double total = 0.0;
    double ranking_part = 0.0;  // unweighted hinge
    double ar_pos_part = 0.0;   // unweighted regularization hinge, positive doc
    double ar_neg_part = 0.0;   // unweighted regularization hinge, negative doc
};

// Loss parts from raw scores; the flag arguments mark which perturbed scores
// are valid. total = ranking_part + lambda * (ar_pos_part + ar_neg_part) —
// that exact accumulation order is part of the contract.
TripleLossParts ar_loss_from_scores(double s_pos, double s_neg, double s_pos_pert,
                                    double s_neg_pert, bool pos_applied, bool neg_applied,
                                    int delta, const LossConfig& config);

struct TripleLoss : TripleLossParts {
    std::vector<double> gradient;  // d total / d theta, trainable layout
};

// Full regularized triple loss against the neural ranker, accumulating
// coef=1 gradients into `grad` (which must have trainable_count() entries).
// Pass pert == nullptr for a plain ranking-only triple; with lambda == 0 the
// perturbed documents are never scored and the result is bitwise identical
// to the unregularized loss. Hinge subgradients at the kink are taken as 0.
TripleLossParts triple_loss_ar_accumulate(const TokenSeq& q, const TokenSeq& d_pos,
                                          const TokenSeq& d_neg, const TriplePerturbation* pert,
                                          const KnrmParams& params, const LossConfig& config,
                                          std::span<double> grad);

TripleLoss triple_loss_ar(const TokenSeq& q, const TokenSeq& d_pos, const TokenSeq& d_neg,
                          const TriplePerturbation& pert, const KnrmParams& params,
                          const LossConfig& config);

}  // namespace axirank

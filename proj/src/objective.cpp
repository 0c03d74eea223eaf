#include "axirank/objective.hpp"

#include <algorithm>
#include <optional>

namespace axirank {

double hinge_loss(double s_pos, double s_neg, double epsilon) {
    return std::max(0.0, epsilon - (s_pos - s_neg));
}

double ar_term(double s_orig, double s_pert, int delta, double mu) {
    return std::max(0.0, mu - static_cast<double>(delta) * (s_orig - s_pert));
}

TriplePerturbation make_triple_perturbation(const PerturbationConstraint& c, const TokenSeq& q,
                                            const TokenSeq& d_pos, const TokenSeq& d_neg,
                                            const Vocabulary& vocab, Rng& rng) {
    TriplePerturbation tp;
    tp.constraint = c;
    tp.pos = apply_perturbation(c, q, d_pos, vocab, rng);
    tp.neg = apply_perturbation(c, q, d_neg, vocab, rng);
    // A deletion can empty a document; the scorer cannot evaluate that, so
    // the outcome is demoted to inapplicable (zero loss) instead.
    if (tp.pos.applied && tp.pos.perturbed.empty()) tp.pos.applied = false;
    if (tp.neg.applied && tp.neg.perturbed.empty()) tp.neg.applied = false;
    return tp;
}

TripleLossParts ar_loss_from_scores(double s_pos, double s_neg, double s_pos_pert,
                                    double s_neg_pert, bool pos_applied, bool neg_applied,
                                    int delta, const LossConfig& config) {
    TripleLossParts parts;
    parts.ranking_part = hinge_loss(s_pos, s_neg, config.epsilon);
    parts.ar_pos_part = pos_applied ? ar_term(s_pos, s_pos_pert, delta, config.mu) : 0.0;
    parts.ar_neg_part = neg_applied ? ar_term(s_neg, s_neg_pert, delta, config.mu) : 0.0;
    parts.total = parts.ranking_part + config.lambda * (parts.ar_pos_part + parts.ar_neg_part);
    return parts;
}

TripleLossParts triple_loss_ar_accumulate(const TokenSeq& q, const TokenSeq& d_pos,
                                          const TokenSeq& d_neg, const TriplePerturbation* pert,
                                          const KnrmParams& params, const LossConfig& config,
                                          std::span<double> grad) {
    const KnrmEval ev_pos(q, d_pos, params);
    const KnrmEval ev_neg(q, d_neg, params);
    const double s_pos = ev_pos.score();
    const double s_neg = ev_neg.score();

    // With lambda == 0 the regularizer is bypassed entirely so the result —
    // loss and gradient both — reproduces the plain ranking objective.
    const bool use_ar = pert != nullptr && config.lambda != 0.0;
    const bool pos_applied = use_ar && pert->pos.applied;
    const bool neg_applied = use_ar && pert->neg.applied;
    const int delta = use_ar ? pert->constraint.delta : +1;

    std::optional<KnrmEval> ev_pp, ev_np;
    double s_pp = 0.0, s_np = 0.0;
    if (pos_applied) {
        ev_pp.emplace(q, pert->pos.perturbed, params);
        s_pp = ev_pp->score();
    }
    if (neg_applied) {
        ev_np.emplace(q, pert->neg.perturbed, params);
        s_np = ev_np->score();
    }

    const TripleLossParts parts =
        ar_loss_from_scores(s_pos, s_neg, s_pp, s_np, pos_applied, neg_applied, delta, config);

    // Active-hinge indicators; exactly at a kink the subgradient is 0.
    const double h1 = parts.ranking_part > 0.0 ? 1.0 : 0.0;
    const double h2 = parts.ar_pos_part > 0.0 ? 1.0 : 0.0;
    const double h3 = parts.ar_neg_part > 0.0 ? 1.0 : 0.0;
    const double ld = config.lambda * static_cast<double>(delta);

    const double c_pos = -h1 - ld * h2;
    const double c_neg = h1 - ld * h3;
    if (c_pos != 0.0) ev_pos.backward(c_pos, grad);
    if (c_neg != 0.0) ev_neg.backward(c_neg, grad);
    if (h2 != 0.0) ev_pp->backward(ld * h2, grad);
    if (h3 != 0.0) ev_np->backward(ld * h3, grad);
    return parts;
}

TripleLoss triple_loss_ar(const TokenSeq& q, const TokenSeq& d_pos, const TokenSeq& d_neg,
                          const TriplePerturbation& pert, const KnrmParams& params,
                          const LossConfig& config) {
    TripleLoss loss;
    loss.gradient.assign(static_cast<size_t>(params.trainable_count()), 0.0);
    static_cast<TripleLossParts&>(loss) =
        triple_loss_ar_accumulate(q, d_pos, d_neg, &pert, params, config, loss.gradient);
    return loss;
}

}  // namespace axirank

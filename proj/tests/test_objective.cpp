#include <doctest.h>

#include <cmath>

#include "axirank/objective.hpp"
#include "axirank/rng.hpp"

using namespace axirank;

namespace {

TokenSeq seq(std::vector<TermId> ids) {
    TokenSeq s;
    s.surface_len = static_cast<int32_t>(ids.size());
    s.ids = std::move(ids);
    return s;
}

Vocabulary sized_vocab(int n) {
    Vocabulary v;
    for (int i = 0; i < n; ++i) v.add_term("w" + std::to_string(i));
    return v;
}

// Model with random output layer so scores and hinges are actually active.
KnrmParams live_params(const Vocabulary& vocab, uint64_t seed) {
    KnrmParams p = init_params(vocab, 4, 3, seed);
    p.kernel_means = {0.9, 0.2, -0.6};
    p.kernel_sigmas = {0.1, 0.15, 0.2};
    Rng r = make_rng(seed + 1, RngStream::kParamInit);
    for (double& w : p.out_weights) w = uniform_range(r, -1.0, 1.0);
    p.bias = uniform_range(r, -0.5, 0.5);
    return p;
}

}  // namespace

TEST_CASE("ranking hinge basics") {
    CHECK(hinge_loss(2.0, 0.0, 1.0) == 0.0);   // margin satisfied
    CHECK(hinge_loss(1.0, 0.0, 1.0) == 0.0);   // exactly at the margin
    CHECK(hinge_loss(0.5, 0.0, 1.0) == 0.5);   // inside the margin
    CHECK(hinge_loss(0.0, 2.0, 1.0) == 3.0);   // misordered
    CHECK(hinge_loss(-1.0, -3.0, 0.5) == 0.0);
}

TEST_CASE("regularization hinge respects the preference direction") {
    // delta +1: the original should win by mu
    CHECK(ar_term(1.0, 0.0, +1, 0.5) == 0.0);
    CHECK(ar_term(0.2, 0.0, +1, 0.5) == doctest::Approx(0.3));
    CHECK(ar_term(0.0, 1.0, +1, 0.5) == 1.5);
    // delta -1: the perturbed version should win by mu
    CHECK(ar_term(0.0, 1.0, -1, 0.5) == 0.0);
    CHECK(ar_term(1.0, 0.0, -1, 0.5) == 1.5);
    // swapping scores while flipping delta is the same constraint
    Rng rng = make_rng(31, RngStream::kPerturb);
    for (int i = 0; i < 200; ++i) {
        const double a = uniform_range(rng, -2.0, 2.0);
        const double b = uniform_range(rng, -2.0, 2.0);
        const double mu = uniform_range(rng, 0.0, 1.0);
        CHECK(ar_term(a, b, +1, mu) == ar_term(b, a, -1, mu));
    }
}

TEST_CASE("all-equal scores with margins 1 and 0.25 at weight 0.1 cost 1.05") {
    LossConfig config;
    config.epsilon = 1.0;
    config.lambda = 0.1;
    config.mu = 0.25;
    const TripleLossParts parts =
        ar_loss_from_scores(0.0, 0.0, 0.0, 0.0, true, true, +1, config);
    CHECK(parts.ranking_part == 1.0);
    CHECK(parts.ar_pos_part == 0.25);
    CHECK(parts.ar_neg_part == 0.25);
    CHECK(parts.total == 1.05);  // 1.0 + 0.1 * (0.25 + 0.25), exact in binary
}

TEST_CASE("regularized loss never drops below the plain ranking loss") {
    Rng rng = make_rng(32, RngStream::kPerturb);
    for (int i = 0; i < 10000; ++i) {
        LossConfig config;
        config.epsilon = uniform_range(rng, 0.0, 2.0);
        config.lambda = uniform_range(rng, 0.0, 1.0);
        config.mu = uniform_range(rng, 0.0, 1.0);
        const double s_pos = uniform_range(rng, -3.0, 3.0);
        const double s_neg = uniform_range(rng, -3.0, 3.0);
        const double s_pp = uniform_range(rng, -3.0, 3.0);
        const double s_np = uniform_range(rng, -3.0, 3.0);
        const int delta = (rng() & 1) ? +1 : -1;
        const bool pa = (rng() & 1) != 0;
        const bool na = (rng() & 1) != 0;
        const TripleLossParts parts =
            ar_loss_from_scores(s_pos, s_neg, s_pp, s_np, pa, na, delta, config);
        CHECK(parts.total >= parts.ranking_part);
        CHECK(parts.ranking_part == hinge_loss(s_pos, s_neg, config.epsilon));
        CHECK(parts.total ==
              parts.ranking_part + config.lambda * (parts.ar_pos_part + parts.ar_neg_part));
    }
}

TEST_CASE("weight zero or inapplicable outcomes erase the extra terms") {
    LossConfig config;
    config.lambda = 0.0;
    config.mu = 0.9;
    const TripleLossParts off = ar_loss_from_scores(0.3, 0.1, 5.0, -5.0, true, true, +1, config);
    CHECK(off.total == off.ranking_part);

    config.lambda = 0.7;
    const TripleLossParts none =
        ar_loss_from_scores(0.3, 0.1, 5.0, -5.0, false, false, +1, config);
    CHECK(none.ar_pos_part == 0.0);
    CHECK(none.ar_neg_part == 0.0);
    CHECK(none.total == none.ranking_part);

    const TripleLossParts one = ar_loss_from_scores(0.3, 0.1, 5.0, -5.0, true, false, +1, config);
    CHECK(one.ar_pos_part > 0.0);
    CHECK(one.ar_neg_part == 0.0);
}

TEST_CASE("shared constraint is applied to both documents of a triple") {
    const Vocabulary vocab = sized_vocab(8);
    const TokenSeq q = seq({0, 1});
    const TokenSeq d_pos = seq({0, 1, 5});
    const TokenSeq d_neg = seq({5, 6});
    Rng rng = make_rng(33, RngStream::kPerturb);
    const TriplePerturbation tp =
        make_triple_perturbation(make_constraint(PerturbKind::kTfc1Add), q, d_pos, d_neg, vocab, rng);
    CHECK(tp.constraint.kind == PerturbKind::kTfc1Add);
    CHECK(tp.pos.kind == PerturbKind::kTfc1Add);
    CHECK(tp.neg.kind == PerturbKind::kTfc1Add);
    CHECK(tp.pos.applied);
    CHECK(tp.neg.applied);
    CHECK(tp.pos.perturbed.size() == d_pos.size() + 1);
    CHECK(tp.neg.perturbed.size() == d_neg.size() + 1);
}

TEST_CASE("a perturbation that empties the document is treated as inapplicable") {
    const Vocabulary vocab = sized_vocab(8);
    const TokenSeq q = seq({2});
    const TokenSeq d_pos = seq({2, 2});  // deletion would leave nothing
    const TokenSeq d_neg = seq({2, 5});
    Rng rng = make_rng(34, RngStream::kPerturb);
    const TriplePerturbation tp = make_triple_perturbation(
        make_constraint(PerturbKind::kTfc1Del), q, d_pos, d_neg, vocab, rng);
    CHECK_FALSE(tp.pos.applied);
    CHECK(tp.pos.perturbed.empty());
    CHECK(tp.neg.applied);
    CHECK(tp.neg.perturbed.ids == std::vector<TermId>{5});
}

TEST_CASE("without a perturbation the loss is the hinge of the two scores") {
    const Vocabulary vocab = sized_vocab(6);
    const KnrmParams p = live_params(vocab, 41);
    const TokenSeq q = seq({0, 3});
    const TokenSeq d_pos = seq({0, 3, 4});
    const TokenSeq d_neg = seq({1, 2});
    LossConfig config;

    std::vector<double> grad(static_cast<size_t>(p.trainable_count()), 0.0);
    const TripleLossParts parts =
        triple_loss_ar_accumulate(q, d_pos, d_neg, nullptr, p, config, grad);
    const double expected =
        hinge_loss(knrm_score(q, d_pos, p), knrm_score(q, d_neg, p), config.epsilon);
    CHECK(parts.total == expected);
    CHECK(parts.ranking_part == expected);
    CHECK(parts.ar_pos_part == 0.0);
    CHECK(parts.ar_neg_part == 0.0);
}

TEST_CASE("weight zero reproduces the plain objective bitwise, gradient included") {
    const Vocabulary vocab = sized_vocab(6);
    const KnrmParams p = live_params(vocab, 42);
    const TokenSeq q = seq({0, 1});
    const TokenSeq d_pos = seq({0, 1, 2});
    const TokenSeq d_neg = seq({3, 4});
    Rng rng = make_rng(35, RngStream::kPerturb);
    const TriplePerturbation tp =
        make_triple_perturbation(make_constraint(PerturbKind::kLnc, 2), q, d_pos, d_neg, vocab, rng);

    LossConfig config;
    config.lambda = 0.0;
    const auto n = static_cast<size_t>(p.trainable_count());
    std::vector<double> with_pert(n, 0.0), without(n, 0.0);
    const TripleLossParts a =
        triple_loss_ar_accumulate(q, d_pos, d_neg, &tp, p, config, with_pert);
    const TripleLossParts b =
        triple_loss_ar_accumulate(q, d_pos, d_neg, nullptr, p, config, without);
    CHECK(a.total == b.total);
    CHECK(a.ranking_part == b.ranking_part);
    CHECK(with_pert == without);
}

TEST_CASE("gradient accumulation is additive across calls") {
    const Vocabulary vocab = sized_vocab(6);
    const KnrmParams p = live_params(vocab, 43);
    const TokenSeq q = seq({0, 2});
    const TokenSeq d_pos = seq({0, 2, 5});
    const TokenSeq d_neg = seq({1, 4});
    Rng rng = make_rng(36, RngStream::kPerturb);
    const TriplePerturbation tp =
        make_triple_perturbation(make_constraint(PerturbKind::kTfc1Add), q, d_pos, d_neg, vocab, rng);
    LossConfig config;
    config.lambda = 0.5;
    config.mu = 0.8;

    const auto n = static_cast<size_t>(p.trainable_count());
    std::vector<double> g1(n, 0.0), g2(n, 0.0), both(n, 0.0);
    triple_loss_ar_accumulate(q, d_pos, d_neg, &tp, p, config, g1);
    triple_loss_ar_accumulate(q, d_pos, d_neg, nullptr, p, config, g2);
    triple_loss_ar_accumulate(q, d_pos, d_neg, &tp, p, config, both);
    triple_loss_ar_accumulate(q, d_pos, d_neg, nullptr, p, config, both);
    for (size_t i = 0; i < n; ++i) {
        CHECK(both[i] == doctest::Approx(g1[i] + g2[i]).epsilon(1e-12));
    }
}

TEST_CASE("at the kink every hinge contributes zero slope") {
    // Zero-initialized output layer pins all scores to 0; with epsilon 0 and
    // mu 0 every hinge argument sits exactly on its kink, so the defined
    // subgradient is zero everywhere.
    const Vocabulary vocab = sized_vocab(6);
    const KnrmParams p = init_params(vocab, 4, 3, 44);  // w = 0, bias = 0
    const TokenSeq q = seq({0, 1});
    const TokenSeq d_pos = seq({0, 1, 2});
    const TokenSeq d_neg = seq({3, 4});
    Rng rng = make_rng(37, RngStream::kPerturb);
    const TriplePerturbation tp =
        make_triple_perturbation(make_constraint(PerturbKind::kTfc3), q, d_pos, d_neg, vocab, rng);
    LossConfig config;
    config.epsilon = 0.0;
    config.lambda = 0.3;
    config.mu = 0.0;

    const auto n = static_cast<size_t>(p.trainable_count());
    std::vector<double> grad(n, 0.0);
    const TripleLossParts parts = triple_loss_ar_accumulate(q, d_pos, d_neg, &tp, p, config, grad);
    CHECK(parts.total == 0.0);
    for (size_t i = 0; i < n; ++i) CHECK(grad[i] == 0.0);
}

TEST_CASE("the convenience wrapper matches the accumulating form") {
    const Vocabulary vocab = sized_vocab(6);
    const KnrmParams p = live_params(vocab, 45);
    const TokenSeq q = seq({1, 3});
    const TokenSeq d_pos = seq({1, 3, 3});
    const TokenSeq d_neg = seq({0, 5});
    Rng rng = make_rng(38, RngStream::kPerturb);
    const TriplePerturbation tp =
        make_triple_perturbation(make_constraint(PerturbKind::kTfc1Del), q, d_pos, d_neg, vocab, rng);
    LossConfig config;
    config.lambda = 0.25;
    config.mu = 0.5;

    const TripleLoss wrapped = triple_loss_ar(q, d_pos, d_neg, tp, p, config);
    std::vector<double> grad(static_cast<size_t>(p.trainable_count()), 0.0);
    const TripleLossParts parts = triple_loss_ar_accumulate(q, d_pos, d_neg, &tp, p, config, grad);
    CHECK(wrapped.total == parts.total);
    CHECK(wrapped.ranking_part == parts.ranking_part);
    CHECK(wrapped.ar_pos_part == parts.ar_pos_part);
    CHECK(wrapped.ar_neg_part == parts.ar_neg_part);
    CHECK(wrapped.gradient == grad);
}

TEST_CASE("regularized loss gradient matches central differences") {
    const Vocabulary vocab = sized_vocab(5);
    KnrmParams p = live_params(vocab, 46);
    const TokenSeq q = seq({0, 1});
    const TokenSeq d_pos = seq({0, 1, 4});
    const TokenSeq d_neg = seq({2, 3});
    Rng rng = make_rng(39, RngStream::kPerturb);
    const TriplePerturbation tp =
        make_triple_perturbation(make_constraint(PerturbKind::kTfc1Add), q, d_pos, d_neg, vocab, rng);
    LossConfig config;
    config.epsilon = 1.0;
    config.lambda = 0.4;
    config.mu = 0.6;

    const TripleLoss loss = triple_loss_ar(q, d_pos, d_neg, tp, p, config);
    // all three hinges must be strictly active and away from their kinks for
    // the finite-difference probe to be meaningful
    REQUIRE(loss.ranking_part > 1e-2);
    REQUIRE(loss.ar_pos_part > 1e-2);
    REQUIRE(loss.ar_neg_part > 1e-2);

    const auto n = static_cast<size_t>(p.trainable_count());
    const size_t emb_n = static_cast<size_t>(p.vocab_rows) * static_cast<size_t>(p.embed_dim);
    const double h = 1e-4;
    auto loss_at = [&](size_t idx, double delta) {
        KnrmParams probe = p;
        if (idx < emb_n) {
            probe.embeddings[idx] += delta;
        } else if (idx < emb_n + static_cast<size_t>(p.kernel_count)) {
            probe.out_weights[idx - emb_n] += delta;
        } else {
            probe.bias += delta;
        }
        return triple_loss_ar(q, d_pos, d_neg, tp, probe, config).total;
    };
    for (size_t i = 0; i < n; ++i) {
        const double fd = (loss_at(i, h) - loss_at(i, -h)) / (2.0 * h);
        const double a = loss.gradient[i];
        const double denom = std::max({std::fabs(a), std::fabs(fd), 1e-4});
        CHECK(std::fabs(a - fd) / denom <= 1e-3);
    }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "axirank/trainer.hpp"
#include "test_util.hpp"

using namespace axirank;

namespace {

TokenSeq seq(std::vector<TermId> ids) {
    TokenSeq s;
    s.surface_len = static_cast<int32_t>(ids.size());
    s.ids = std::move(ids);
    return s;
}

// Small but real training setup: 3 queries, 6 docs, 6 triples; dev has one
// relevant candidate per query.
struct Fixture {
    Dataset data;
    DevSet dev;
};

Fixture make_fixture() {
    Fixture f;
    for (int i = 0; i < 12; ++i) f.data.vocab.add_term("w" + std::to_string(i));
    f.data.queries = {seq({0, 1}), seq({2, 3}), seq({4, 5})};
    f.data.query_ids = {"q0", "q1", "q2"};
    f.data.docs = {seq({0, 1, 8}),  seq({8, 9, 10}), seq({2, 3, 9}),
                   seq({10, 11}),   seq({4, 5, 11}), seq({6, 7})};
    for (int i = 0; i < 6; ++i) f.data.doc_ids.push_back("d" + std::to_string(i));
    for (const TokenSeq& d : f.data.docs) f.data.vocab.add_document(d.ids);
    f.data.triples = {{0, 0, 1}, {0, 0, 3}, {1, 2, 1}, {1, 2, 5}, {2, 4, 3}, {2, 4, 5}};
    f.data.relevant_by_query.resize(3);
    f.data.relevant_by_query[0].insert(0);
    f.data.relevant_by_query[1].insert(2);
    f.data.relevant_by_query[2].insert(4);

    for (int qi = 0; qi < 3; ++qi) {
        DevQuery dq;
        dq.query_id = "q" + std::to_string(qi);
        dq.query = f.data.queries[static_cast<size_t>(qi)];
        const int pos = qi * 2;
        for (const int di : {pos, 1, 3, 5}) {
            CandidateDoc c;
            c.doc_id = "d" + std::to_string(di);
            c.tokens = f.data.docs[static_cast<size_t>(di)];
            c.grade = di == pos ? 1 : 0;
            dq.candidates.push_back(std::move(c));
        }
        f.dev.queries.push_back(std::move(dq));
    }
    return f;
}

TrainConfig quick_config() {
    TrainConfig config;
    config.max_steps = 6;
    config.eval_every = 3;
    config.batch_size = 4;
    config.seed = 5;
    return config;
}

}  // namespace

TEST_CASE("first adam step follows the written update rule") {
    const AdamConfig cfg;  // 0.9 / 0.999 / 1e-8 / 1e-5
    const double lr = 0.001;
    std::vector<double> theta{1.0, -2.0};
    const std::vector<double> g{1.0, -3.0};
    AdamMoments moments(2);
    adam_step(theta, g, moments, lr, cfg);
    CHECK(moments.t == 1);

    // oracle: replicate the documented arithmetic step for step one
    auto oracle = [&](double t0, double grad) {
        const double m = (1.0 - cfg.beta1) * grad;
        const double v = (1.0 - cfg.beta2) * grad * grad;
        const double mhat = m / (1.0 - std::pow(cfg.beta1, 1.0));
        const double vhat = v / (1.0 - std::pow(cfg.beta2, 1.0));
        double t = t0;
        t -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
        t -= lr * cfg.weight_decay * t;
        return t;
    };
    CHECK(theta[0] == oracle(1.0, 1.0));
    CHECK(theta[1] == oracle(-2.0, -3.0));

    // after bias correction the very first step has magnitude ~lr
    CHECK(theta[0] == doctest::Approx(1.0 - lr).epsilon(1e-4));
    CHECK(theta[1] == doctest::Approx(-2.0 + lr).epsilon(1e-4));

    // second step with the same gradient keeps moving the same way
    const double after_one = theta[0];
    adam_step(theta, g, moments, lr, cfg);
    CHECK(moments.t == 2);
    CHECK(theta[0] < after_one);
    CHECK(theta[1] > -2.0 + lr);
}

TEST_CASE("zero gradient leaves only the decay term") {
    AdamConfig cfg;
    cfg.weight_decay = 0.01;
    std::vector<double> theta{4.0};
    const std::vector<double> zero{0.0};
    AdamMoments moments(1);
    adam_step(theta, zero, moments, 0.5, cfg);
    // mhat = 0 and vhat = 0, so the gradient part moves nothing at all
    double expect = 4.0;
    expect -= 0.5 * 0.0 / (0.0 + cfg.eps);
    expect -= 0.5 * cfg.weight_decay * expect;
    CHECK(theta[0] == expect);
    CHECK(theta[0] == doctest::Approx(4.0 * (1.0 - 0.005)).epsilon(1e-12));
}

TEST_CASE("sgd step with power-of-two values is exact") {
    std::vector<double> theta{4.0};
    const std::vector<double> g{2.0};
    sgd_step(theta, g, 0.5, 0.5);
    // 4 - 0.5*2 = 3, then 3 - 0.5*0.5*3 = 2.25; every operand is a power sum
    CHECK(theta[0] == 2.25);

    std::vector<double> plain{1.0};
    sgd_step(plain, std::vector<double>{0.5}, 0.25, 0.0);
    CHECK(plain[0] == 0.875);
}

TEST_CASE("optimizer steps reject mismatched sizes") {
    std::vector<double> theta{1.0, 2.0};
    const std::vector<double> g{1.0};
    AdamMoments moments(2);
    CHECK_THROWS_AS(adam_step(theta, g, moments, 0.1, {}), std::invalid_argument);
    AdamMoments wrong(3);
    const std::vector<double> g2{1.0, 1.0};
    CHECK_THROWS_AS(adam_step(theta, g2, wrong, 0.1, {}), std::invalid_argument);
    CHECK_THROWS_AS(sgd_step(theta, g, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("training is bitwise reproducible for a fixed seed") {
    const Fixture f = make_fixture();
    const KnrmParams init = init_params(f.data.vocab, 4, 5, 77);
    const TrainConfig config = quick_config();

    const TrainResult a = train(f.data, f.dev, init, config);
    const TrainResult b = train(f.data, f.dev, init, config);
    CHECK(a.best_params.embeddings == b.best_params.embeddings);
    CHECK(a.best_params.out_weights == b.best_params.out_weights);
    CHECK(a.best_params.bias == b.best_params.bias);
    CHECK(a.best_dev_mrr == b.best_dev_mrr);
    CHECK(a.best_step == b.best_step);
    CHECK(a.initial_dev_mrr == b.initial_dev_mrr);
    REQUIRE(a.curve.size() == b.curve.size());
    for (size_t i = 0; i < a.curve.size(); ++i) {
        CHECK(a.curve[i].step == b.curve[i].step);
        CHECK(a.curve[i].ranking_loss == b.curve[i].ranking_loss);
        CHECK(a.curve[i].ar_loss == b.curve[i].ar_loss);
        CHECK(a.curve[i].total_loss == b.curve[i].total_loss);
        CHECK(a.curve[i].dev_mrr == b.curve[i].dev_mrr);
    }
    CHECK(a.counters.sampled == b.counters.sampled);
    CHECK(a.counters.applied == b.counters.applied);

    // another shuffle seed takes a different trajectory
    TrainConfig other = config;
    other.seed = 6;
    const TrainResult c = train(f.data, f.dev, init, other);
    CHECK(c.best_params.embeddings != a.best_params.embeddings);
}

TEST_CASE("curve rows land on the eval grid and keep the loss identity") {
    const Fixture f = make_fixture();
    const KnrmParams init = init_params(f.data.vocab, 4, 5, 78);

    TrainConfig config = quick_config();
    config.max_steps = 1;
    config.eval_every = 1;
    const TrainResult one = train(f.data, f.dev, init, config);
    REQUIRE(one.curve.size() == 1);
    CHECK(one.curve[0].step == 1);

    config.max_steps = 5;
    config.eval_every = 2;
    const TrainResult five = train(f.data, f.dev, init, config);
    REQUIRE(five.curve.size() == 2);
    CHECK(five.curve[0].step == 2);
    CHECK(five.curve[1].step == 4);
    for (const CurveRow& row : five.curve) {
        CHECK(row.total_loss == row.ranking_loss + row.ar_loss);  // exact by construction
        CHECK(row.ranking_loss >= 0.0);
        CHECK(row.ar_loss >= 0.0);
    }

    // the best tracker never reports less than anything it has seen
    double best_seen = five.initial_dev_mrr;
    for (const CurveRow& row : five.curve) best_seen = std::max(best_seen, row.dev_mrr);
    CHECK(five.best_dev_mrr == best_seen);
    if (five.best_step == 0) {
        CHECK(five.best_dev_mrr == five.initial_dev_mrr);
        CHECK(five.best_params.embeddings == init.embeddings);
    }
}

TEST_CASE("perturbation counters distinguish static from dynamic sampling") {
    const Fixture f = make_fixture();
    const KnrmParams init = init_params(f.data.vocab, 4, 5, 79);

    // regularizer off: nothing is ever sampled
    TrainConfig off = quick_config();
    off.loss.lambda = 0.0;
    const TrainResult r_off = train(f.data, f.dev, init, off);
    for (const size_t s : r_off.counters.sampled) CHECK(s == 0);
    for (const size_t a : r_off.counters.applied) CHECK(a == 0);

    // an empty axiom list disables it just as thoroughly
    TrainConfig none = quick_config();
    none.axioms.clear();
    const TrainResult r_none = train(f.data, f.dev, init, none);
    for (const size_t s : r_none.counters.sampled) CHECK(s == 0);

    // static: one draw per triple, up front
    TrainConfig stat = quick_config();
    const TrainResult r_stat = train(f.data, f.dev, init, stat);
    const size_t stat_total = std::accumulate(r_stat.counters.sampled.begin(),
                                              r_stat.counters.sampled.end(), size_t{0});
    CHECK(stat_total == f.data.triples.size());

    // dynamic: one draw per triple visit across all batches
    TrainConfig dyn = quick_config();
    dyn.perturb_mode = PerturbMode::kDynamic;
    dyn.max_steps = 4;
    dyn.batch_size = 4;
    const TrainResult r_dyn = train(f.data, f.dev, init, dyn);
    const size_t dyn_total = std::accumulate(r_dyn.counters.sampled.begin(),
                                             r_dyn.counters.sampled.end(), size_t{0});
    // 6 triples, batch 4: takes of 4, 2, 4, 2
    CHECK(dyn_total == 12);
    for (size_t k = 0; k < kAllPerturbKinds.size(); ++k) {
        CHECK(r_dyn.counters.applied[k] <= 2 * r_dyn.counters.sampled[k]);
    }

    // restricting the axiom list restricts what gets drawn
    TrainConfig only = quick_config();
    only.axioms = {PerturbKind::kLnc};
    const TrainResult r_only = train(f.data, f.dev, init, only);
    CHECK(r_only.counters.sampled[static_cast<size_t>(PerturbKind::kLnc)] ==
          f.data.triples.size());
    CHECK(r_only.counters.sampled[static_cast<size_t>(PerturbKind::kTfc1Add)] == 0);
}

TEST_CASE("turning the regularizer off reproduces the plain loss in the curve") {
    const Fixture f = make_fixture();
    const KnrmParams init = init_params(f.data.vocab, 4, 5, 80);
    TrainConfig config = quick_config();
    config.loss.lambda = 0.0;
    const TrainResult r = train(f.data, f.dev, init, config);
    for (const CurveRow& row : r.curve) {
        CHECK(row.ar_loss == 0.0);
        CHECK(row.total_loss == row.ranking_loss);
    }
}

TEST_CASE("exploding gradients stop the run with a step number") {
    // Hand-built model rigged to blow up: one-hot embeddings and a colossal
    // kernel weight. Scores stay finite (the dev eval before step one must
    // survive) but the first backward pass overflows the gradient.
    Dataset data;
    data.vocab.add_term("a");
    data.vocab.add_term("b");
    data.vocab.add_document({0});
    data.vocab.add_document({1});
    data.queries = {seq({0})};
    data.query_ids = {"q0"};
    data.docs = {seq({0}), seq({1})};
    data.doc_ids = {"d0", "d1"};
    data.triples = {{0, 0, 1}};
    data.relevant_by_query.resize(1);
    data.relevant_by_query[0].insert(0);

    DevSet dev;
    DevQuery dq;
    dq.query_id = "q0";
    dq.query = seq({0});
    CandidateDoc c;
    c.doc_id = "d0";
    c.tokens = seq({0});
    c.grade = 1;
    dq.candidates.push_back(c);
    dev.queries.push_back(std::move(dq));

    KnrmParams p;
    p.vocab_rows = 3;
    p.embed_dim = 2;
    p.kernel_count = 1;
    p.embeddings = {1, 0, 0, 1, 0, 0};
    p.kernel_means = {0.5};
    p.kernel_sigmas = {0.1};
    p.out_weights = {-1e308};
    p.bias = 0.0;

    TrainConfig config;
    config.max_steps = 3;
    config.eval_every = 3;
    config.batch_size = 1;
    config.loss.lambda = 0.0;
    config.clip_norm = 10.0;

    try {
        train(data, dev, p, config);
        FAIL("expected the run to abort");
    } catch (const NumericalDivergenceError& e) {
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
}

TEST_CASE("training validates its inputs") {
    const Fixture f = make_fixture();
    const KnrmParams init = init_params(f.data.vocab, 4, 5, 81);
    Dataset empty;
    empty.vocab = f.data.vocab;
    CHECK_THROWS_AS(train(empty, f.dev, init, quick_config()), EmptyDatasetError);
    TrainConfig bad = quick_config();
    bad.batch_size = 0;
    CHECK_THROWS_AS(train(f.data, f.dev, init, bad), std::invalid_argument);
    bad = quick_config();
    bad.max_steps = 0;
    CHECK_THROWS_AS(train(f.data, f.dev, init, bad), std::invalid_argument);
    bad = quick_config();
    bad.eval_every = 0;
    CHECK_THROWS_AS(train(f.data, f.dev, init, bad), std::invalid_argument);
}

TEST_CASE("sgd training also runs deterministically") {
    const Fixture f = make_fixture();
    const KnrmParams init = init_params(f.data.vocab, 4, 5, 82);
    TrainConfig config = quick_config();
    config.optimizer = OptimizerKind::kSgd;
    const TrainResult a = train(f.data, f.dev, init, config);
    const TrainResult b = train(f.data, f.dev, init, config);
    CHECK(a.best_params.embeddings == b.best_params.embeddings);
    CHECK(a.best_dev_mrr == b.best_dev_mrr);
}

TEST_CASE("curve files carry a header and one line per row") {
    TempDir tmp("curve");
    TrainResult result;
    result.curve.push_back({3, 1.5, 0.25, 1.75, 0.5});
    result.curve.push_back({6, 1.0, 0.125, 1.125, 0.75});
    const std::string path = tmp.file("curve.csv");
    write_curve_csv(path, result);
    CHECK(read_file(path) ==
          "step,ranking_loss,ar_loss,total_loss,dev_mrr\n"
          "3,1.5,0.25,1.75,0.5\n"
          "6,1,0.125,1.125,0.75\n");
}

TEST_CASE("ensembling averages runs and orders the output canonically") {
    Run a;
    a.push_back({"q2", "d1", 4.0});
    a.push_back({"q1", "d1", 1.0});
    a.push_back({"q1", "d2", 3.0});
    Run b;
    b.push_back({"q1", "d1", 3.0});
    b.push_back({"q1", "d2", 1.0});
    b.push_back({"q2", "d1", 0.0});
    const std::vector<Run> runs{a, b};
    const Run mean = ensemble_scores(runs);
    REQUIRE(mean.size() == 3);
    // q1 first; within q1 both docs average to 2, so doc id breaks the tie
    CHECK(mean[0].query_id == "q1");
    CHECK(mean[0].doc_id == "d1");
    CHECK(mean[0].score == 2.0);
    CHECK(mean[1].doc_id == "d2");
    CHECK(mean[1].score == 2.0);
    CHECK(mean[2].query_id == "q2");
    CHECK(mean[2].score == 2.0);

    // score ordering inside a query
    Run c;
    c.push_back({"q1", "d1", 0.0});
    c.push_back({"q1", "d2", 10.0});
    const std::vector<Run> single{c};
    const Run out = ensemble_scores(single);
    CHECK(out[0].doc_id == "d2");
    CHECK(out[1].doc_id == "d1");

    // a pair missing from one run is an error that names the pair
    Run partial;
    partial.push_back({"q1", "d1", 1.0});
    const std::vector<Run> uneven{a, partial};
    try {
        ensemble_scores(uneven);
        FAIL("expected a coverage failure");
    } catch (const CoverageError& e) {
        CHECK(std::string(e.what()).find("q1/d2") != std::string::npos);
    }
    CHECK_THROWS_AS(ensemble_scores(std::vector<Run>{}), std::invalid_argument);
}

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "axirank/axioms.hpp"
#include "axirank/corpus.hpp"
#include "axirank/eval.hpp"
#include "axirank/knrm.hpp"
#include "axirank/objective.hpp"

namespace axirank {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-5;
};

enum class OptimizerKind { kAdam, kSgd };

// When to draw the constraint attached to each training triple: once up front
// (same perturbed docs revisited every epoch) or fresh on every batch visit.
enum class PerturbMode { kStatic, kDynamic };

struct TrainConfig {
    double lr = 0.001;
    size_t batch_size = 64;
    size_t max_steps = 1000;
    size_t eval_every = 100;
    OptimizerKind optimizer = OptimizerKind::kAdam;
    AdamConfig adam;
    uint64_t seed = 42;
    LossConfig loss;
    int lnc_k = 1;
    std::vector<PerturbKind> axioms{kAllPerturbKinds.begin(), kAllPerturbKinds.end()};
    PerturbMode perturb_mode = PerturbMode::kStatic;
    double clip_norm = 10.0;
    size_t mrr_cutoff = 0;  // 0 = unbounded
};

// Adam state. Update order per step: moment update with bias correction,
// theta -= lr * mhat / (sqrt(vhat) + eps), then decoupled weight decay
// theta -= lr * weight_decay * theta.
struct AdamMoments {
    std::vector<double> m;
    std::vector<double> v;
    int64_t t = 0;

    explicit AdamMoments(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::span<double> params, std::span<const double> grad, AdamMoments& moments,
               double lr, const AdamConfig& config);

// Plain SGD: theta -= lr * grad, then the same decoupled decay.
void sgd_step(std::span<double> params, std::span<const double> grad, double lr,
              double weight_decay);

// One training-curve record, written at every eval_every-th step. Losses are
// batch means at the parameters the step started from; dev_mrr is measured
// after the update. ar_loss carries its lambda weight, so
// total_loss = ranking_loss + ar_loss.
struct CurveRow {
    size_t step = 0;
    double ranking_loss = 0.0;
    double ar_loss = 0.0;
    double total_loss = 0.0;
    double dev_mrr = 0.0;
};

// sampled[k]: constraint draws of kind k — static mode draws once per triple
// up front, dynamic mode on every batch visit. applied[k]: documents the
// operator actually changed (0..2 per draw).
struct PerturbCounters {
    std::array<size_t, kAllPerturbKinds.size()> sampled{};
    std::array<size_t, kAllPerturbKinds.size()> applied{};
};

struct TrainResult {
    KnrmParams best_params;
    double best_dev_mrr = 0.0;
    size_t best_step = 0;  // 0 = the untrained parameters were never beaten
    double initial_dev_mrr = 0.0;
    std::vector<CurveRow> curve;
    PerturbCounters counters;
};

// Single-threaded training loop. Deterministic for a fixed (dataset, dev,
// init, config): epoch shuffles and perturbation sampling use separate seeded
// streams, so runs with lambda = 0 see the same batch order as runs with
// lambda > 0. With lambda = 0 or no axioms selected, perturbed documents are
// never constructed or scored and the loss equals the plain ranking hinge
// bitwise. Non-finite batch loss or gradient raises
// NumericalDivergenceError naming the step.
TrainResult train(const Dataset& dataset, const DevSet& dev, const KnrmParams& init,
                  const TrainConfig& config);

void write_curve_csv(const std::string& path, const TrainResult& result);

// Mean score per (query_id, doc_id) across runs. Every pair must appear in
// every run, else CoverageError listing the missing pairs. Output ordered by
// query_id ascending, then score descending, then doc_id ascending.
Run ensemble_scores(std::span<const Run> runs);

}  // namespace axirank

#include "axirank/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "axirank/rng.hpp"
#include "axirank/strfmt.hpp"

namespace axirank {

void adam_step(std::span<double> params, std::span<const double> grad, AdamMoments& moments,
               double lr, const AdamConfig& config) {
    if (params.size() != grad.size() || params.size() != moments.m.size()) {
        throw std::invalid_argument("adam_step: size mismatch");
    }
    moments.t += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(moments.t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(moments.t));
    for (size_t i = 0; i < params.size(); ++i) {
        moments.m[i] = config.beta1 * moments.m[i] + (1.0 - config.beta1) * grad[i];
        moments.v[i] = config.beta2 * moments.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        const double mhat = moments.m[i] / bc1;
        const double vhat = moments.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + config.eps);
        params[i] -= lr * config.weight_decay * params[i];
    }
}

void sgd_step(std::span<double> params, std::span<const double> grad, double lr,
              double weight_decay) {
    if (params.size() != grad.size()) throw std::invalid_argument("sgd_step: size mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        params[i] -= lr * grad[i];
        params[i] -= lr * weight_decay * params[i];
    }
}

namespace {

void params_to_flat(const KnrmParams& p, std::vector<double>& flat) {
    flat.clear();
    flat.reserve(static_cast<size_t>(p.trainable_count()));
    flat.insert(flat.end(), p.embeddings.begin(), p.embeddings.end());
    flat.insert(flat.end(), p.out_weights.begin(), p.out_weights.end());
    flat.push_back(p.bias);
}

void flat_to_params(const std::vector<double>& flat, KnrmParams& p) {
    const size_t emb = p.embeddings.size();
    std::copy(flat.begin(), flat.begin() + emb, p.embeddings.begin());
    std::copy(flat.begin() + emb, flat.begin() + emb + p.out_weights.size(),
              p.out_weights.begin());
    p.bias = flat.back();
}

}  // namespace

TrainResult train(const Dataset& dataset, const DevSet& dev, const KnrmParams& init,
                  const TrainConfig& config) {
    if (dataset.triples.empty()) throw EmptyDatasetError("train: no training triples");
    if (config.batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
    if (config.max_steps == 0) throw std::invalid_argument("train: max_steps must be positive");
    if (config.eval_every == 0) throw std::invalid_argument("train: eval_every must be positive");

    TrainResult result;
    KnrmParams params = init;
    const size_t n_params = static_cast<size_t>(params.trainable_count());

    Rng rng_shuffle = make_rng(config.seed, RngStream::kShuffle);
    Rng rng_perturb = make_rng(config.seed, RngStream::kPerturb);
    const bool use_ar = config.loss.lambda != 0.0 && !config.axioms.empty();

    // Static mode fixes each triple's constraint and perturbed documents for
    // the whole run; dynamic mode redraws them at every visit below.
    std::vector<TriplePerturbation> static_perts;
    if (use_ar && config.perturb_mode == PerturbMode::kStatic) {
        static_perts.reserve(dataset.triples.size());
        for (const TrainTriple& t : dataset.triples) {
            const PerturbationConstraint c =
                sample_constraint(rng_perturb, config.axioms, config.lnc_k);
            result.counters.sampled[static_cast<size_t>(c.kind)] += 1;
            TriplePerturbation tp =
                make_triple_perturbation(c, dataset.queries[t.query], dataset.docs[t.pos_doc],
                                         dataset.docs[t.neg_doc], dataset.vocab, rng_perturb);
            result.counters.applied[static_cast<size_t>(c.kind)] +=
                (tp.pos.applied ? 1 : 0) + (tp.neg.applied ? 1 : 0);
            static_perts.push_back(std::move(tp));
        }
    }

    {
        const KnrmScorer scorer(params);
        result.initial_dev_mrr = dev_mean_mrr(scorer, dev, config.mrr_cutoff);
    }
    result.best_params = params;
    result.best_dev_mrr = result.initial_dev_mrr;
    result.best_step = 0;

    std::vector<double> theta;
    params_to_flat(params, theta);
    AdamMoments moments(config.optimizer == OptimizerKind::kAdam ? n_params : 0);

    std::vector<size_t> order(dataset.triples.size());
    std::iota(order.begin(), order.end(), size_t{0});
    size_t cursor = order.size();  // force a shuffle before the first batch

    std::vector<double> grad(n_params, 0.0);
    for (size_t step = 1; step <= config.max_steps; ++step) {
        if (cursor >= order.size()) {
            shuffle_vec(rng_shuffle, order);
            cursor = 0;
        }
        const size_t take = std::min(config.batch_size, order.size() - cursor);
        std::fill(grad.begin(), grad.end(), 0.0);
        double sum_rank = 0.0;
        double sum_ar = 0.0;
        for (size_t b = 0; b < take; ++b) {
            const size_t idx = order[cursor + b];
            const TrainTriple& t = dataset.triples[idx];
            const TriplePerturbation* pert = nullptr;
            TriplePerturbation dynamic_pert;
            if (use_ar) {
                if (config.perturb_mode == PerturbMode::kStatic) {
                    pert = &static_perts[idx];
                } else {
                    const PerturbationConstraint c =
                        sample_constraint(rng_perturb, config.axioms, config.lnc_k);
                    result.counters.sampled[static_cast<size_t>(c.kind)] += 1;
                    dynamic_pert = make_triple_perturbation(
                        c, dataset.queries[t.query], dataset.docs[t.pos_doc],
                        dataset.docs[t.neg_doc], dataset.vocab, rng_perturb);
                    result.counters.applied[static_cast<size_t>(c.kind)] +=
                        (dynamic_pert.pos.applied ? 1 : 0) + (dynamic_pert.neg.applied ? 1 : 0);
                    pert = &dynamic_pert;
                }
            }
            const TripleLossParts parts =
                triple_loss_ar_accumulate(dataset.queries[t.query], dataset.docs[t.pos_doc],
                                          dataset.docs[t.neg_doc], pert, params, config.loss,
                                          grad);
            sum_rank += parts.ranking_part;
            sum_ar += parts.total - parts.ranking_part;
        }
        cursor += take;

        const double inv = 1.0 / static_cast<double>(take);
        for (double& g : grad) g *= inv;
        const double mean_rank = sum_rank * inv;
        const double mean_ar = sum_ar * inv;
        const double mean_total = mean_rank + mean_ar;

        bool finite = std::isfinite(mean_total);
        double sq_norm = 0.0;
        for (const double g : grad) {
            sq_norm += g * g;
        }
        finite = finite && std::isfinite(sq_norm);
        if (!finite) {
            throw NumericalDivergenceError("training diverged at step " + std::to_string(step) +
                                           ": non-finite loss or gradient");
        }
        const double norm = std::sqrt(sq_norm);
        if (config.clip_norm > 0.0 && norm > config.clip_norm) {
            const double scale = config.clip_norm / norm;
            for (double& g : grad) g *= scale;
        }

        if (config.optimizer == OptimizerKind::kAdam) {
            adam_step(theta, grad, moments, config.lr, config.adam);
        } else {
            sgd_step(theta, grad, config.lr, config.adam.weight_decay);
        }
        flat_to_params(theta, params);

        if (step % config.eval_every == 0) {
            const KnrmScorer scorer(params);
            const double dev_mrr = dev_mean_mrr(scorer, dev, config.mrr_cutoff);
            result.curve.push_back({step, mean_rank, mean_ar, mean_total, dev_mrr});
            if (dev_mrr > result.best_dev_mrr) {
                result.best_dev_mrr = dev_mrr;
                result.best_step = step;
                result.best_params = params;
            }
        }
    }
    return result;
}

void write_curve_csv(const std::string& path, const TrainResult& result) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("write_curve_csv: cannot open " + path);
    out << "step,ranking_loss,ar_loss,total_loss,dev_mrr\n";
    for (const CurveRow& row : result.curve) {
        out << row.step << ',' << format_double(row.ranking_loss) << ','
            << format_double(row.ar_loss) << ',' << format_double(row.total_loss) << ','
            << format_double(row.dev_mrr) << '\n';
    }
    if (!out) throw IoError("write_curve_csv: write failed for " + path);
}

Run ensemble_scores(std::span<const Run> runs) {
    if (runs.empty()) throw std::invalid_argument("ensemble_scores: no runs");
    struct Acc {
        double sum = 0.0;
        size_t count = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const Run& run : runs) {
        for (const RunEntry& e : run) {
            Acc& a = acc[{e.query_id, e.doc_id}];
            a.sum += e.score;
            a.count += 1;
        }
    }
    std::vector<std::string> missing;
    for (const auto& [key, a] : acc) {
        if (a.count != runs.size()) missing.push_back(key.first + "/" + key.second);
    }
    if (!missing.empty()) {
        std::string msg = "ensemble_scores: " + std::to_string(missing.size()) +
                          " (query, doc) pairs absent from some run:";
        const size_t show = std::min<size_t>(missing.size(), 10);
        for (size_t i = 0; i < show; ++i) msg += " " + missing[i];
        if (missing.size() > show) msg += " ...";
        throw CoverageError(msg);
    }
    Run out;
    out.reserve(acc.size());
    for (const auto& [key, a] : acc) {
        out.push_back({key.first, key.second, a.sum / static_cast<double>(runs.size())});
    }
    std::sort(out.begin(), out.end(), [](const RunEntry& a, const RunEntry& b) {
        if (a.query_id != b.query_id) return a.query_id < b.query_id;
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    return out;
}

}  // namespace axirank

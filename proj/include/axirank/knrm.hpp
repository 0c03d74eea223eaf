#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "axirank/scorer.hpp"
#include "axirank/types.hpp"
#include "axirank/vocab.hpp"

namespace axirank {

// Kernel-pooling neural ranker. Scoring builds the query/document cosine
// similarity matrix over embeddings, soft-counts each query term's matches
// through K Gaussian kernels, log-compresses, and combines with a linear
// layer:
//   phi_k = sum_i log(1 + sum_j exp(-(M_ij - mean_k)^2 / (2 sigma_k^2)))
//   score = sum_k w_k * phi_k + bias
// Kernel means/sigmas are fixed; embeddings, w and bias train. The embedding
// table has vocab_rows = |V| + 1 rows, the last one owned by the OOV id.
struct KnrmParams {
    int64_t vocab_rows = 0;
    int32_t embed_dim = 0;
    int32_t kernel_count = 0;
    std::vector<double> embeddings;     // vocab_rows x embed_dim, row-major
    std::vector<double> kernel_means;   // fixed, not trained
    std::vector<double> kernel_sigmas;  // fixed, not trained
    std::vector<double> out_weights;
    double bias = 0.0;

    // Flat trainable layout: [embeddings..., out_weights..., bias].
    int64_t trainable_count() const {
        return vocab_rows * embed_dim + kernel_count + 1;
    }
};

// Fresh parameters: embeddings uniform in (-0.1, 0.1) from `seed`; one
// exact-match kernel (mean 1, sigma 0.001) plus kernel_count-1 soft kernels
// at the centers of equal-width bins over [-1, 1] with sigma 0.1; w and bias
// zero, so the initial score of any pair is 0. When `pretrained_path` is
// non-empty, rows of vocabulary terms present in the file are overwritten
// (file format: "term v1 v2 ... vE" per line; malformed -> ParseError).
KnrmParams init_params(const Vocabulary& vocab, int32_t embed_dim, int32_t kernel_count,
                       uint64_t seed, const std::string& pretrained_path = {});

// Forward score. Document tokens are histogram-aggregated by id (ascending),
// which makes the score exactly invariant to document token order. Throws
// EmptyInputError when either side is empty.
double knrm_score(const TokenSeq& q, const TokenSeq& d, const KnrmParams& params);

struct ScoreWithGradient {
    double score = 0.0;
    std::vector<double> gradient;  // d score / d theta, trainable layout
};

ScoreWithGradient knrm_score_with_grad(const TokenSeq& q, const TokenSeq& d,
                                       const KnrmParams& params);

// One evaluation with retained intermediates: run the forward pass once, read
// the score, then (optionally, many times) add coef * d score / d theta into
// a shared gradient buffer. knrm_score and knrm_score_with_grad route through
// this class, so all three agree bitwise.
class KnrmEval {
  public:
    KnrmEval(const TokenSeq& q, const TokenSeq& d, const KnrmParams& params);

    double score() const { return score_; }
    void backward(double coef, std::span<double> grad) const;

  private:
    const KnrmParams* params_;
    std::vector<TermId> q_ids_;
    std::vector<TermId> doc_ids_;      // unique, ascending
    std::vector<int32_t> doc_counts_;  // parallel to doc_ids_
    std::vector<double> q_norms_, d_norms_;
    std::vector<double> cos_;  // |q| x U
    std::vector<double> ssum_;  // |q| x K: kernel-pooled match mass per query token
    std::vector<double> phi_;
    double score_ = 0.0;
};

// Self-contained model file: vocabulary plus parameters, versioned binary,
// byte-stable across save/load/save round trips.
struct Checkpoint {
    Vocabulary vocab;
    KnrmParams params;
};

void save_checkpoint(const std::string& path, const Vocabulary& vocab, const KnrmParams& params);
Checkpoint load_checkpoint(const std::string& path);

struct KnrmScorer final : Scorer {
    const KnrmParams* params;

    explicit KnrmScorer(const KnrmParams& p) : params(&p) {}
    double score(const TokenSeq& query, const TokenSeq& doc) const override {
        return knrm_score(query, doc, *params);
    }
};

}  // namespace axirank

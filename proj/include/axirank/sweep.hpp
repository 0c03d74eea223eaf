#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "axirank/trainer.hpp"

namespace axirank {

inline constexpr std::array<double, 6> kDefaultSweepGrid = {0.001, 0.01, 0.1, 0.25, 0.5, 1.0};

struct SweepRow {
    std::string run_id;
    double lambda = 0.0;
    double mu = 0.0;
    std::string axioms;
    std::string status;  // "ok" or "failed"
    double best_dev_mrr = 0.0;
    size_t best_step = 0;
};

// Trains one run per (lambda, mu) pair, every run from the same initial
// parameters and base config. A run that throws becomes a "failed" row; the
// sweep continues.
std::vector<SweepRow> sweep_grid(const Dataset& dataset, const DevSet& dev,
                                 const KnrmParams& init, const TrainConfig& base,
                                 std::span<const double> lambdas, std::span<const double> mus);

// Six runs: unregularized baseline, one run per single perturbation kind, and
// one with all four, each using the base config's lambda and mu.
std::vector<SweepRow> sweep_ablation(const Dataset& dataset, const DevSet& dev,
                                     const KnrmParams& init, const TrainConfig& base);

// Rows sorted by best_dev_mrr descending (ties by run_id), failed rows last.
void write_sweep_csv(const std::string& path, std::span<const SweepRow> rows);
std::string sweep_to_table(std::span<const SweepRow> rows);

}  // namespace axirank

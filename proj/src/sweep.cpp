#include "axirank/sweep.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "axirank/strfmt.hpp"

namespace axirank {

namespace {

SweepRow run_one(const Dataset& dataset, const DevSet& dev, const KnrmParams& init,
                 const TrainConfig& config, std::string run_id) {
    SweepRow row;
    row.run_id = std::move(run_id);
    row.lambda = config.loss.lambda;
    row.mu = config.loss.mu;
    row.axioms = config.loss.lambda == 0.0 ? "none" : axioms_to_string(config.axioms);
    try {
        const TrainResult result = train(dataset, dev, init, config);
        row.status = "ok";
        row.best_dev_mrr = result.best_dev_mrr;
        row.best_step = result.best_step;
    } catch (const std::exception&) {
        row.status = "failed";
        row.best_dev_mrr = 0.0;
        row.best_step = 0;
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep_grid(const Dataset& dataset, const DevSet& dev,
                                 const KnrmParams& init, const TrainConfig& base,
                                 std::span<const double> lambdas, std::span<const double> mus) {
    if (lambdas.empty() || mus.empty()) {
        throw std::invalid_argument("sweep_grid: empty lambda or mu list");
    }
    std::vector<SweepRow> rows;
    for (const double lambda : lambdas) {
        for (const double mu : mus) {
            TrainConfig config = base;
            config.loss.lambda = lambda;
            config.loss.mu = mu;
            rows.push_back(run_one(dataset, dev, init, config,
                                   "l" + format_double(lambda) + "_m" + format_double(mu)));
        }
    }
    return rows;
}

std::vector<SweepRow> sweep_ablation(const Dataset& dataset, const DevSet& dev,
                                     const KnrmParams& init, const TrainConfig& base) {
    std::vector<SweepRow> rows;
    {
        TrainConfig config = base;
        config.loss.lambda = 0.0;
        rows.push_back(run_one(dataset, dev, init, config, "baseline"));
    }
    for (const PerturbKind kind : kAllPerturbKinds) {
        TrainConfig config = base;
        config.axioms = {kind};
        rows.push_back(run_one(dataset, dev, init, config, perturb_kind_name(kind)));
    }
    {
        TrainConfig config = base;
        config.axioms = {kAllPerturbKinds.begin(), kAllPerturbKinds.end()};
        rows.push_back(run_one(dataset, dev, init, config, "all"));
    }
    return rows;
}

namespace {

std::vector<SweepRow> sorted_rows(std::span<const SweepRow> rows) {
    std::vector<SweepRow> out(rows.begin(), rows.end());
    std::sort(out.begin(), out.end(), [](const SweepRow& a, const SweepRow& b) {
        const bool a_ok = a.status == "ok";
        const bool b_ok = b.status == "ok";
        if (a_ok != b_ok) return a_ok;
        if (a.best_dev_mrr != b.best_dev_mrr) return a.best_dev_mrr > b.best_dev_mrr;
        return a.run_id < b.run_id;
    });
    return out;
}

}  // namespace

void write_sweep_csv(const std::string& path, std::span<const SweepRow> rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("write_sweep_csv: cannot open " + path);
    out << "run_id,lambda,mu,axioms,status,best_dev_mrr,best_step\n";
    for (const SweepRow& row : sorted_rows(rows)) {
        out << row.run_id << ',' << format_double(row.lambda) << ',' << format_double(row.mu)
            << ',' << row.axioms << ',' << row.status << ',' << format_double(row.best_dev_mrr)
            << ',' << row.best_step << '\n';
    }
    if (!out) throw IoError("write_sweep_csv: write failed for " + path);
}

std::string sweep_to_table(std::span<const SweepRow> rows) {
    std::ostringstream out;
    out << "run_id        lambda  mu      axioms                 status  best_dev_mrr  best_step\n";
    char buf[200];
    for (const SweepRow& row : sorted_rows(rows)) {
        std::snprintf(buf, sizeof(buf), "%-12s  %-6g  %-6g  %-21s  %-6s  %.6f      %zu\n",
                      row.run_id.c_str(), row.lambda, row.mu, row.axioms.c_str(),
                      row.status.c_str(), row.best_dev_mrr, row.best_step);
        out << buf;
    }
    return out.str();
}

}  // namespace axirank

// Command-line front end: dataset generation, training, sweeps, evaluation,
// perturbation inspection, scorer audits, run ensembling.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "axirank/audit.hpp"
#include "axirank/axioms.hpp"
#include "axirank/bm25.hpp"
#include "axirank/corpus.hpp"
#include "axirank/eval.hpp"
#include "axirank/knrm.hpp"
#include "axirank/manifest.hpp"
#include "axirank/strfmt.hpp"
#include "axirank/sweep.hpp"
#include "axirank/synth.hpp"
#include "axirank/trainer.hpp"

namespace fs = std::filesystem;
using namespace axirank;

namespace {

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::string cur;
    auto flush = [&] {
        out.push_back(parse_double(cur, flag));
        cur.clear();
    };
    for (const char c : text) {
        if (c == ',') {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return out;
}

// Flags shared by train and sweep.
struct TrainArgs {
    std::string triples;
    std::string dev_qrels;
    std::string dev_candidates;
    std::string out_dir;
    std::string pretrained;
    double lambda = 0.1;
    double mu = 0.1;
    double epsilon = 1.0;
    size_t steps = 1000;
    size_t batch_size = 64;
    double lr = 0.001;
    uint64_t seed = 42;
    size_t eval_every = 100;
    std::string optimizer = "adam";
    std::string axioms = "all";
    int lnc_k = 1;
    std::string perturb_mode = "static";
    int embedding_dim = 64;
    int kernels = 11;
    double clip_norm = 10.0;
    double weight_decay = 1e-5;
    size_t subsample = 0;
    size_t dev_subsample = 0;
    size_t cutoff = 0;
    size_t query_max = 16;
    size_t doc_max = 128;
};

void add_train_flags(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--triples", a.triples, "Training triples TSV (query \\t positive \\t negative)")
        ->required();
    cmd->add_option("--dev-qrels", a.dev_qrels, "Dev qrels TSV (query-id \\t doc-id \\t grade)")
        ->required();
    cmd->add_option("--dev-candidates", a.dev_candidates,
                    "Dev candidates TSV (query-id \\t query \\t doc-id \\t doc)")
        ->required();
    cmd->add_option("--out-dir", a.out_dir, "Output directory")->required();
    cmd->add_option("--lambda", a.lambda, "Regularization weight (0 disables perturbations)")
        ->capture_default_str();
    cmd->add_option("--mu", a.mu, "Regularization hinge margin")->capture_default_str();
    cmd->add_option("--epsilon", a.epsilon, "Ranking hinge margin")->capture_default_str();
    cmd->add_option("--steps", a.steps, "Optimization steps")->capture_default_str();
    cmd->add_option("--batch-size", a.batch_size, "Triples per step")->capture_default_str();
    cmd->add_option("--lr", a.lr, "Learning rate")->capture_default_str();
    cmd->add_option("--seed", a.seed, "Seed for init, shuffling and perturbations")
        ->capture_default_str();
    cmd->add_option("--eval-every", a.eval_every, "Dev evaluation period in steps")
        ->capture_default_str();
    cmd->add_option("--optimizer", a.optimizer, "Optimizer")
        ->check(CLI::IsMember({"adam", "sgd"}))
        ->capture_default_str();
    cmd->add_option("--axioms", a.axioms,
                    "Perturbation kinds: comma list of tfc1a,tfc1d,tfc3,lnc or all/none")
        ->capture_default_str();
    cmd->add_option("--lnc-k", a.lnc_k, "Terms inserted by the length-noise perturbation")
        ->capture_default_str();
    cmd->add_option("--perturb-mode", a.perturb_mode,
                    "static: one perturbation per triple; dynamic: fresh per visit")
        ->check(CLI::IsMember({"static", "dynamic"}))
        ->capture_default_str();
    cmd->add_option("--embedding-dim", a.embedding_dim, "Embedding dimension")
        ->capture_default_str();
    cmd->add_option("--kernels", a.kernels, "Kernel count (1 exact + K-1 soft)")
        ->capture_default_str();
    cmd->add_option("--pretrained", a.pretrained,
                    "Optional embedding file (term v1 .. vE per line)");
    cmd->add_option("--clip-norm", a.clip_norm, "Global gradient norm cap (0 disables)")
        ->capture_default_str();
    cmd->add_option("--weight-decay", a.weight_decay, "Decoupled weight decay")
        ->capture_default_str();
    cmd->add_option("--subsample", a.subsample, "Train on N random queries (0 = all)")
        ->capture_default_str();
    cmd->add_option("--dev-subsample", a.dev_subsample, "Evaluate on N random dev queries (0 = all)")
        ->capture_default_str();
    cmd->add_option("--cutoff", a.cutoff, "Dev MRR rank cutoff (0 = unbounded)")
        ->capture_default_str();
    cmd->add_option("--query-max", a.query_max, "Query token cap")->capture_default_str();
    cmd->add_option("--doc-max", a.doc_max, "Document token cap")->capture_default_str();
}

TrainConfig to_train_config(const TrainArgs& a) {
    TrainConfig config;
    config.lr = a.lr;
    config.batch_size = a.batch_size;
    config.max_steps = a.steps;
    config.eval_every = a.eval_every;
    config.optimizer = a.optimizer == "sgd" ? OptimizerKind::kSgd : OptimizerKind::kAdam;
    config.adam.weight_decay = a.weight_decay;
    config.seed = a.seed;
    config.loss.lambda = a.lambda;
    config.loss.mu = a.mu;
    config.loss.epsilon = a.epsilon;
    config.lnc_k = a.lnc_k;
    config.axioms = parse_axiom_list(a.axioms);
    config.perturb_mode =
        a.perturb_mode == "dynamic" ? PerturbMode::kDynamic : PerturbMode::kStatic;
    config.clip_norm = a.clip_norm;
    config.mrr_cutoff = a.cutoff;
    return config;
}

void fill_manifest_config(RunManifest& m, const TrainArgs& a) {
    m.config = {{"triples", a.triples},
                {"dev_qrels", a.dev_qrels},
                {"dev_candidates", a.dev_candidates},
                {"out_dir", a.out_dir},
                {"lambda", format_double(a.lambda)},
                {"mu", format_double(a.mu)},
                {"epsilon", format_double(a.epsilon)},
                {"steps", std::to_string(a.steps)},
                {"batch_size", std::to_string(a.batch_size)},
                {"lr", format_double(a.lr)},
                {"seed", std::to_string(a.seed)},
                {"eval_every", std::to_string(a.eval_every)},
                {"optimizer", a.optimizer},
                {"axioms", a.axioms},
                {"lnc_k", std::to_string(a.lnc_k)},
                {"perturb_mode", a.perturb_mode},
                {"embedding_dim", std::to_string(a.embedding_dim)},
                {"kernels", std::to_string(a.kernels)},
                {"pretrained", a.pretrained},
                {"clip_norm", format_double(a.clip_norm)},
                {"weight_decay", format_double(a.weight_decay)},
                {"subsample", std::to_string(a.subsample)},
                {"dev_subsample", std::to_string(a.dev_subsample)},
                {"cutoff", std::to_string(a.cutoff)},
                {"query_max", std::to_string(a.query_max)},
                {"doc_max", std::to_string(a.doc_max)}};
}

struct LoadedData {
    Dataset data;
    DevSet dev;
    KnrmParams init;
};

LoadedData load_for_training(const TrainArgs& a) {
    LoadedData out;
    const TokenizeLimits limits{a.query_max, a.doc_max};
    out.data = load_triples(a.triples, limits);
    if (a.subsample > 0) out.data = subsample_queries(out.data, a.subsample, a.seed);
    out.dev = load_dev_set(a.dev_candidates, a.dev_qrels, out.data.vocab, limits);
    if (a.dev_subsample > 0) out.dev = subsample_dev(out.dev, a.dev_subsample, a.seed);
    out.init = init_params(out.data.vocab, a.embedding_dim, a.kernels, a.seed, a.pretrained);
    return out;
}

void write_train_summary(const std::string& path, const TrainArgs& a, const Dataset& data,
                         const TrainResult& result) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path);
    out << "{\n";
    out << "  \"initial_dev_mrr\": " << format_double(result.initial_dev_mrr) << ",\n";
    out << "  \"best_dev_mrr\": " << format_double(result.best_dev_mrr) << ",\n";
    out << "  \"best_step\": " << result.best_step << ",\n";
    out << "  \"steps\": " << a.steps << ",\n";
    out << "  \"triples\": " << data.triples.size() << ",\n";
    out << "  \"skipped_lines\": " << data.skipped_lines << ",\n";
    out << "  \"queries\": " << data.queries.size() << ",\n";
    out << "  \"docs\": " << data.docs.size() << ",\n";
    out << "  \"vocab_terms\": " << data.vocab.size() << ",\n";
    out << "  \"perturbations\": {";
    for (size_t i = 0; i < kAllPerturbKinds.size(); ++i) {
        if (i > 0) out << ",";
        out << "\n    \"" << perturb_kind_name(kAllPerturbKinds[i]) << "\": {\"sampled\": "
            << result.counters.sampled[i] << ", \"applied\": " << result.counters.applied[i]
            << "}";
    }
    out << "\n  }\n}\n";
    if (!out) throw IoError("write failed for " + path);
}

int run_train(const TrainArgs& a) {
    LoadedData loaded = load_for_training(a);
    fs::create_directories(a.out_dir);

    RunManifest manifest;
    manifest.command = "train";
    manifest.seed = a.seed;
    fill_manifest_config(manifest, a);
    add_input(manifest, a.triples);
    add_input(manifest, a.dev_qrels);
    add_input(manifest, a.dev_candidates);
    if (!a.pretrained.empty()) add_input(manifest, a.pretrained);
    const std::string ckpt_path = path_join(a.out_dir, "checkpoint.bin");
    const std::string curve_path = path_join(a.out_dir, "curve.csv");
    const std::string summary_path = path_join(a.out_dir, "summary.json");
    manifest.outputs = {ckpt_path, curve_path, summary_path};
    write_manifest(path_join(a.out_dir, "manifest.json"), manifest);

    const TrainResult result = train(loaded.data, loaded.dev, loaded.init, to_train_config(a));

    save_checkpoint(ckpt_path, loaded.data.vocab, result.best_params);
    write_curve_csv(curve_path, result);
    write_train_summary(summary_path, a, loaded.data, result);

    std::cout << "triples: " << loaded.data.triples.size() << " (skipped "
              << loaded.data.skipped_lines << ")  queries: " << loaded.data.queries.size()
              << "  docs: " << loaded.data.docs.size()
              << "  vocab: " << loaded.data.vocab.size() << "\n";
    std::cout << "dev queries: " << loaded.dev.queries.size() << "\n";
    std::cout << "initial dev MRR: " << format_double(result.initial_dev_mrr) << "\n";
    std::cout << "best dev MRR: " << format_double(result.best_dev_mrr) << " at step "
              << result.best_step << "\n";
    std::cout << "wrote " << ckpt_path << ", " << curve_path << ", " << summary_path << "\n";
    return 0;
}

int run_sweep(const TrainArgs& a, const std::string& ablation, const std::string& lambdas_text,
              const std::string& mus_text) {
    LoadedData loaded = load_for_training(a);
    fs::create_directories(a.out_dir);

    RunManifest manifest;
    manifest.command = "sweep";
    manifest.seed = a.seed;
    fill_manifest_config(manifest, a);
    manifest.config.emplace_back("ablation", ablation);
    manifest.config.emplace_back("lambdas", lambdas_text);
    manifest.config.emplace_back("mus", mus_text);
    add_input(manifest, a.triples);
    add_input(manifest, a.dev_qrels);
    add_input(manifest, a.dev_candidates);
    if (!a.pretrained.empty()) add_input(manifest, a.pretrained);
    const std::string csv_path = path_join(a.out_dir, "sweep.csv");
    manifest.outputs = {csv_path};
    write_manifest(path_join(a.out_dir, "manifest.json"), manifest);

    const TrainConfig base = to_train_config(a);
    std::vector<SweepRow> rows;
    if (!ablation.empty()) {
        rows = sweep_ablation(loaded.data, loaded.dev, loaded.init, base);
    } else {
        const std::vector<double> lambdas =
            lambdas_text.empty()
                ? std::vector<double>(kDefaultSweepGrid.begin(), kDefaultSweepGrid.end())
                : parse_double_list(lambdas_text, "--lambdas");
        const std::vector<double> mus =
            mus_text.empty()
                ? std::vector<double>(kDefaultSweepGrid.begin(), kDefaultSweepGrid.end())
                : parse_double_list(mus_text, "--mus");
        rows = sweep_grid(loaded.data, loaded.dev, loaded.init, base, lambdas, mus);
    }
    write_sweep_csv(csv_path, rows);
    std::cout << sweep_to_table(rows);
    std::cout << "wrote " << csv_path << "\n";
    return 0;
}

struct EvalArgs {
    std::string run;
    std::string qrels;
    std::string checkpoint;
    std::string candidates;
    std::string out;
    std::string run_out;
    size_t ndcg_k = 10;
    int rel_threshold = 1;
    size_t cutoff = 0;
    size_t query_max = 16;
    size_t doc_max = 128;
};

int run_eval(const EvalArgs& a) {
    const bool run_mode = !a.run.empty();
    const bool ckpt_mode = !a.checkpoint.empty();
    if (run_mode == ckpt_mode) {
        throw CLI::ValidationError("eval", "give exactly one of --run or --checkpoint");
    }
    if (ckpt_mode && a.candidates.empty()) {
        throw CLI::ValidationError("eval", "--checkpoint needs --candidates");
    }
    if (run_mode && !a.run_out.empty()) {
        throw CLI::ValidationError("eval", "--run-out only applies to --checkpoint mode");
    }

    std::vector<RankedList> lists;
    if (run_mode) {
        lists = lists_from_run(load_run(a.run), load_qrels(a.qrels));
    } else {
        const Checkpoint ckpt = load_checkpoint(a.checkpoint);
        const DevSet dev = load_dev_set(a.candidates, a.qrels, ckpt.vocab,
                                        TokenizeLimits{a.query_max, a.doc_max});
        const KnrmScorer scorer(ckpt.params);
        lists.reserve(dev.queries.size());
        for (const DevQuery& dq : dev.queries) {
            lists.push_back(rerank(scorer, dq.query_id, dq.query, dq.candidates));
        }
        if (!a.run_out.empty()) write_run(a.run_out, run_from_lists(lists));
    }
    const MetricReport report = evaluate_lists(lists, a.ndcg_k, a.rel_threshold, a.cutoff);
    std::cout << report_to_table(report);
    if (!a.out.empty()) {
        std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + a.out);
        out << report_to_jsonl(report);
        if (!out) throw IoError("write failed for " + a.out);
        std::cout << "wrote " << a.out << "\n";
    }
    if (!a.run_out.empty()) std::cout << "wrote " << a.run_out << "\n";
    return 0;
}

struct PerturbArgs {
    std::string axiom;
    int k = 1;
    std::string query;
    std::string text;
    uint64_t seed = 0;
    std::string triples;
    size_t query_max = 16;
    size_t doc_max = 128;
};

int run_perturb(const PerturbArgs& a) {
    Vocabulary vocab;
    if (!a.triples.empty()) {
        vocab = load_triples(a.triples, TokenizeLimits{a.query_max, a.doc_max}).vocab;
    }
    TokenSeq q = tokenize(a.query, vocab, VocabMode::kBuild, a.query_max);
    TokenSeq d = tokenize(a.text, vocab, VocabMode::kBuild, a.doc_max);

    const std::vector<PerturbKind> kinds = parse_axiom_list(a.axiom);
    if (kinds.size() != 1) {
        throw CLI::ValidationError("perturb", "--axiom takes exactly one kind");
    }
    Rng rng = make_rng(a.seed, RngStream::kPerturb);
    const PerturbationOutcome outcome =
        apply_perturbation(make_constraint(kinds[0], a.k), q, d, vocab, rng);

    std::string positions;
    for (size_t i = 0; i < outcome.positions.size(); ++i) {
        if (i > 0) positions += ",";
        positions += std::to_string(outcome.positions[i]);
    }
    std::cout << "axiom\tapplied\tpositions\toriginal\tperturbed\n";
    std::cout << perturb_kind_name(outcome.kind) << '\t' << (outcome.applied ? 1 : 0) << '\t'
              << positions << '\t' << detokenize(d, vocab) << '\t'
              << detokenize(outcome.perturbed, vocab) << '\n';
    return 0;
}

struct AuditArgs {
    std::string triples;
    std::string scorer = "bm25";
    std::string checkpoint;
    std::string axioms = "all";
    size_t n = 1000;
    uint64_t seed = 0;
    int lnc_k = 1;
    std::string out;
    std::string dump_pairs;
    size_t query_max = 16;
    size_t doc_max = 128;
};

int run_audit(const AuditArgs& a) {
    if (a.scorer == "checkpoint" && a.checkpoint.empty()) {
        throw CLI::ValidationError("audit", "--scorer checkpoint needs --checkpoint");
    }
    const std::vector<PerturbKind> kinds = parse_axiom_list(a.axioms);
    if (kinds.empty()) {
        throw CLI::ValidationError("audit", "--axioms none leaves nothing to audit");
    }
    const TokenizeLimits limits{a.query_max, a.doc_max};

    Dataset data;
    Checkpoint ckpt;
    std::unique_ptr<Scorer> scorer;
    if (a.scorer == "checkpoint") {
        ckpt = load_checkpoint(a.checkpoint);
        data = load_triples_frozen(a.triples, ckpt.vocab, limits);
        scorer = std::make_unique<KnrmScorer>(ckpt.params);
    } else {
        data = load_triples(a.triples, limits);
        scorer = std::make_unique<Bm25Scorer>(data.vocab);
    }

    std::ofstream dump;
    if (!a.dump_pairs.empty()) {
        dump.open(a.dump_pairs, std::ios::binary | std::ios::trunc);
        if (!dump) throw IoError("cannot open " + a.dump_pairs);
        dump << "axiom\tquery_id\tdoc_id\tscore_orig\tscore_pert\tmargin\tagreed\n";
    }
    const AuditReport report = audit(*scorer, data, kinds, a.n, a.seed, a.lnc_k,
                                     a.dump_pairs.empty() ? nullptr : &dump);
    std::cout << audit_report_to_table(report);
    if (!a.out.empty()) {
        std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + a.out);
        out << audit_report_to_json(report);
        if (!out) throw IoError("write failed for " + a.out);
        std::cout << "wrote " << a.out << "\n";
    }
    if (!a.dump_pairs.empty()) std::cout << "wrote " << a.dump_pairs << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise neural ranking with axiom-derived regularization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "Read flags from an INI file ([subcommand] sections)");

    // gen-synth
    SynthConfig synth_cfg;
    std::string synth_out;
    CLI::App* gen = app.add_subcommand("gen-synth", "Generate a synthetic retrieval corpus");
    gen->add_option("--out-dir", synth_out, "Output directory")->required();
    gen->add_option("--seed", synth_cfg.seed, "Generator seed")->capture_default_str();
    gen->add_option("--vocab-size", synth_cfg.vocab_size, "Total vocabulary terms")
        ->capture_default_str();
    gen->add_option("--query-band", synth_cfg.query_band, "Terms reserved for queries")
        ->capture_default_str();
    gen->add_option("--train-queries", synth_cfg.train_queries, "Training queries")
        ->capture_default_str();
    gen->add_option("--dev-queries", synth_cfg.dev_queries, "Dev queries")->capture_default_str();
    gen->add_option("--negs-per-query", synth_cfg.negs_per_query, "Training negatives per query")
        ->capture_default_str();
    gen->add_option("--dev-negatives", synth_cfg.dev_negatives, "Dev negatives per query")
        ->capture_default_str();
    gen->add_option("--doc-len-min", synth_cfg.doc_len_min, "Minimum document length")
        ->capture_default_str();
    gen->add_option("--doc-len-max", synth_cfg.doc_len_max, "Maximum document length")
        ->capture_default_str();
    gen->callback([&] {
        fs::create_directories(synth_out);
        RunManifest manifest;
        manifest.command = "gen-synth";
        manifest.seed = synth_cfg.seed;
        manifest.config = {{"out_dir", synth_out},
                           {"vocab_size", std::to_string(synth_cfg.vocab_size)},
                           {"query_band", std::to_string(synth_cfg.query_band)},
                           {"train_queries", std::to_string(synth_cfg.train_queries)},
                           {"dev_queries", std::to_string(synth_cfg.dev_queries)},
                           {"negs_per_query", std::to_string(synth_cfg.negs_per_query)},
                           {"dev_negatives", std::to_string(synth_cfg.dev_negatives)},
                           {"doc_len_min", std::to_string(synth_cfg.doc_len_min)},
                           {"doc_len_max", std::to_string(synth_cfg.doc_len_max)}};
        manifest.outputs = {path_join(synth_out, "train_triples.tsv"),
                            path_join(synth_out, "dev_qrels.tsv"),
                            path_join(synth_out, "dev_candidates.tsv")};
        write_manifest(path_join(synth_out, "manifest.json"), manifest);
        const SynthSummary summary = generate_synth(synth_cfg, synth_out);
        std::cout << "train triples: " << summary.train_triples
                  << "  dev queries: " << summary.dev_queries
                  << "  dev candidates: " << summary.dev_candidates << "\n";
        std::cout << "wrote " << synth_out << "/{train_triples,dev_qrels,dev_candidates}.tsv\n";
    });

    // train
    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "Train the neural ranker");
    add_train_flags(train_cmd, train_args);
    train_cmd->callback([&] { run_train(train_args); });

    // sweep
    TrainArgs sweep_args;
    std::string ablation;
    std::string lambdas_text;
    std::string mus_text;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Train one run per grid point or ablation arm");
    add_train_flags(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--ablation", ablation,
                          "add-one-in: baseline, one arm per perturbation kind, all")
        ->check(CLI::IsMember({"add-one-in"}));
    sweep_cmd->add_option("--lambdas", lambdas_text,
                          "Comma list of lambda values (default: built-in grid)");
    sweep_cmd->add_option("--mus", mus_text, "Comma list of mu values (default: built-in grid)");
    sweep_cmd->callback([&] { run_sweep(sweep_args, ablation, lambdas_text, mus_text); });

    // eval
    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score a run file or rerank with a checkpoint");
    eval_cmd->add_option("--run", eval_args.run, "Run TSV (query-id \\t doc-id \\t score)");
    eval_cmd->add_option("--qrels", eval_args.qrels, "Qrels TSV")->required();
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "Model checkpoint to rerank with");
    eval_cmd->add_option("--candidates", eval_args.candidates,
                         "Candidates TSV (needed with --checkpoint)");
    eval_cmd->add_option("--ndcg-k", eval_args.ndcg_k, "Report NDCG@1..k")->capture_default_str();
    eval_cmd->add_option("--rel-threshold", eval_args.rel_threshold,
                         "Minimum grade counted as relevant")
        ->capture_default_str();
    eval_cmd->add_option("--cutoff", eval_args.cutoff, "MRR rank cutoff (0 = unbounded)")
        ->capture_default_str();
    eval_cmd->add_option("--out", eval_args.out, "Write the per-query report as JSON lines");
    eval_cmd->add_option("--run-out", eval_args.run_out,
                         "Write the reranked scores as a run TSV (checkpoint mode)");
    eval_cmd->add_option("--query-max", eval_args.query_max, "Query token cap")
        ->capture_default_str();
    eval_cmd->add_option("--doc-max", eval_args.doc_max, "Document token cap")
        ->capture_default_str();
    eval_cmd->callback([&] { run_eval(eval_args); });

    // perturb
    PerturbArgs perturb_args;
    CLI::App* perturb_cmd =
        app.add_subcommand("perturb", "Apply one perturbation and print the pair as TSV");
    perturb_cmd->add_option("--axiom", perturb_args.axiom, "One of tfc1a, tfc1d, tfc3, lnc")
        ->required()
        ->check(CLI::IsMember({"tfc1a", "tfc1d", "tfc3", "lnc"}));
    perturb_cmd->add_option("--k", perturb_args.k, "Inserted terms (lnc only)")
        ->capture_default_str();
    perturb_cmd->add_option("--query", perturb_args.query, "Query text")->required();
    perturb_cmd->add_option("--text", perturb_args.text, "Document text")->required();
    perturb_cmd->add_option("--seed", perturb_args.seed, "Seed")->capture_default_str();
    perturb_cmd->add_option("--triples", perturb_args.triples,
                            "Optional triples TSV supplying the vocabulary");
    perturb_cmd->add_option("--query-max", perturb_args.query_max, "Query token cap")
        ->capture_default_str();
    perturb_cmd->add_option("--doc-max", perturb_args.doc_max, "Document token cap")
        ->capture_default_str();
    perturb_cmd->callback([&] { run_perturb(perturb_args); });

    // audit
    AuditArgs audit_args;
    CLI::App* audit_cmd =
        app.add_subcommand("audit", "Measure a scorer's agreement with the perturbation axioms");
    audit_cmd->add_option("--triples", audit_args.triples, "Triples TSV to sample pairs from")
        ->required();
    audit_cmd->add_option("--scorer", audit_args.scorer, "bm25 or checkpoint")
        ->check(CLI::IsMember({"bm25", "checkpoint"}))
        ->capture_default_str();
    audit_cmd->add_option("--checkpoint", audit_args.checkpoint,
                          "Checkpoint (with --scorer checkpoint)");
    audit_cmd->add_option("--axioms", audit_args.axioms, "Kinds to audit")->capture_default_str();
    audit_cmd->add_option("--n", audit_args.n, "Pairs per kind")->capture_default_str();
    audit_cmd->add_option("--seed", audit_args.seed, "Sampling seed")->capture_default_str();
    audit_cmd->add_option("--lnc-k", audit_args.lnc_k, "Terms inserted by the length-noise kind")
        ->capture_default_str();
    audit_cmd->add_option("--out", audit_args.out, "Write the report as JSON");
    audit_cmd->add_option("--dump-pairs", audit_args.dump_pairs,
                          "Write each applicable pair as a TSV row");
    audit_cmd->add_option("--query-max", audit_args.query_max, "Query token cap")
        ->capture_default_str();
    audit_cmd->add_option("--doc-max", audit_args.doc_max, "Document token cap")
        ->capture_default_str();
    audit_cmd->callback([&] { run_audit(audit_args); });

    // ensemble
    std::vector<std::string> ensemble_runs;
    std::string ensemble_out;
    CLI::App* ensemble_cmd =
        app.add_subcommand("ensemble", "Average runs score-wise into one run");
    ensemble_cmd->add_option("runs", ensemble_runs, "Run TSV files")->required()->expected(-1);
    ensemble_cmd->add_option("-o,--out", ensemble_out, "Output run TSV")->required();
    ensemble_cmd->callback([&] {
        std::vector<Run> runs;
        runs.reserve(ensemble_runs.size());
        for (const std::string& path : ensemble_runs) runs.push_back(load_run(path));
        write_run(ensemble_out, ensemble_scores(runs));
        std::cout << "wrote " << ensemble_out << " (" << runs.size() << " runs)\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

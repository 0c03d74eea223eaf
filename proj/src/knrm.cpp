#include "axirank/knrm.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "axirank/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace axirank {

namespace {

// Floor added inside each squared norm so zero vectors stay finite. The
// analytic gradient differentiates the floored expression exactly, keeping
// finite-difference checks honest.
constexpr double kCosEps = 1e-12;

// exp(-z) for z > 60 is ~9e-27: far below double rounding noise next to the
// O(1) kernel sums, so those kernel evaluations are skipped as exact zeros.
constexpr double kKernelCutoff = 60.0;

void check_ids(const std::vector<TermId>& ids, int64_t vocab_rows, const char* side) {
    for (const TermId id : ids) {
        if (id < 0 || id >= vocab_rows) {
            throw std::invalid_argument(std::string("knrm: ") + side + " token id " +
                                        std::to_string(id) + " outside embedding table");
        }
    }
}

}  // namespace

KnrmParams init_params(const Vocabulary& vocab, int32_t embed_dim, int32_t kernel_count,
                       uint64_t seed, const std::string& pretrained_path) {
    if (embed_dim < 1) throw std::invalid_argument("init_params: embed_dim must be >= 1");
    if (kernel_count < 1) throw std::invalid_argument("init_params: kernel_count must be >= 1");

    KnrmParams p;
    p.vocab_rows = static_cast<int64_t>(vocab.size()) + 1;  // + OOV row
    p.embed_dim = embed_dim;
    p.kernel_count = kernel_count;

    Rng rng = make_rng(seed, RngStream::kParamInit);
    p.embeddings.resize(static_cast<size_t>(p.vocab_rows) * embed_dim);
    for (double& v : p.embeddings) v = uniform_range(rng, -0.1, 0.1);

    // One near-delta kernel for exact matches, then the centers of
    // equal-width bins covering [-1, 1] for soft matches.
    p.kernel_means.assign(static_cast<size_t>(kernel_count), 0.0);
    p.kernel_sigmas.assign(static_cast<size_t>(kernel_count), 0.1);
    p.kernel_means[0] = 1.0;
    p.kernel_sigmas[0] = 0.001;
    const int soft = kernel_count - 1;
    for (int i = 0; i < soft; ++i) {
        const double width = 2.0 / soft;
        p.kernel_means[static_cast<size_t>(i) + 1] = 1.0 - width / 2.0 - i * width;
    }

    p.out_weights.assign(static_cast<size_t>(kernel_count), 0.0);
    p.bias = 0.0;

    if (!pretrained_path.empty()) {
        std::ifstream in(pretrained_path);
        if (!in) throw IoError("init_params: cannot open pretrained file " + pretrained_path);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const size_t sp = line.find(' ');
            if (sp == std::string::npos) {
                throw ParseError("pretrained line " + std::to_string(line_no) + ": no vector");
            }
            const std::string term = line.substr(0, sp);
            std::vector<double> vec;
            const char* cur = line.c_str() + sp;
            const char* end = line.c_str() + line.size();
            while (cur < end) {
                while (cur < end && *cur == ' ') ++cur;
                if (cur == end) break;
                double v = 0.0;
                const auto [next, ec] = std::from_chars(cur, end, v);
                if (ec != std::errc() || (next < end && *next != ' ')) {
                    throw ParseError("pretrained line " + std::to_string(line_no) + ": bad number");
                }
                vec.push_back(v);
                cur = next;
            }
            if (vec.size() != static_cast<size_t>(embed_dim)) {
                throw ParseError("pretrained line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(embed_dim) + " values, got " +
                                 std::to_string(vec.size()));
            }
            const TermId id = vocab.id_of(term);
            if (id == Vocabulary::kNoTerm) continue;  // terms outside the vocabulary are ignored
            std::copy(vec.begin(), vec.end(),
                      p.embeddings.begin() + static_cast<long>(id) * embed_dim);
        }
    }
    return p;
}

KnrmEval::KnrmEval(const TokenSeq& q, const TokenSeq& d, const KnrmParams& params)
    : params_(&params) {
    if (q.empty()) throw EmptyInputError("knrm: empty query");
    if (d.empty()) throw EmptyInputError("knrm: empty document");
    assert(params.embeddings.size() ==
           static_cast<size_t>(params.vocab_rows) * static_cast<size_t>(params.embed_dim));
    check_ids(q.ids, params.vocab_rows, "query");
    check_ids(d.ids, params.vocab_rows, "document");

    q_ids_ = q.ids;
    // Histogram the document in ascending-id order: the kernel sums below
    // then run in a canonical order, making the score exactly invariant to
    // document token permutation (and cheaper for repeated terms).
    std::map<TermId, int32_t> hist;
    for (const TermId id : d.ids) hist[id] += 1;
    doc_ids_.reserve(hist.size());
    doc_counts_.reserve(hist.size());
    for (const auto& [id, count] : hist) {
        doc_ids_.push_back(id);
        doc_counts_.push_back(count);
    }

    const size_t Q = q_ids_.size();
    const size_t U = doc_ids_.size();
    const size_t K = static_cast<size_t>(params.kernel_count);
    const size_t E = static_cast<size_t>(params.embed_dim);
    const double* emb = params.embeddings.data();

    auto norm_of = [&](TermId id) {
        const double* e = emb + static_cast<size_t>(id) * E;
        double dot = 0.0;
        for (size_t x = 0; x < E; ++x) dot += e[x] * e[x];
        return std::sqrt(dot + kCosEps);
    };
    q_norms_.resize(Q);
    for (size_t i = 0; i < Q; ++i) q_norms_[i] = norm_of(q_ids_[i]);
    d_norms_.resize(U);
    for (size_t u = 0; u < U; ++u) d_norms_[u] = norm_of(doc_ids_[u]);

    cos_.assign(Q * U, 0.0);
    ssum_.assign(Q * K, 0.0);
    for (size_t i = 0; i < Q; ++i) {
        const double* eq = emb + static_cast<size_t>(q_ids_[i]) * E;
        for (size_t u = 0; u < U; ++u) {
            const double* ed = emb + static_cast<size_t>(doc_ids_[u]) * E;
            double dot = 0.0;
            for (size_t x = 0; x < E; ++x) dot += eq[x] * ed[x];
            const double m = dot / (q_norms_[i] * d_norms_[u]);
            cos_[i * U + u] = m;
            for (size_t k = 0; k < K; ++k) {
                const double dm = m - params.kernel_means[k];
                const double sig = params.kernel_sigmas[k];
                const double z = dm * dm / (2.0 * sig * sig);
                if (z > kKernelCutoff) continue;
                ssum_[i * K + k] += static_cast<double>(doc_counts_[u]) * std::exp(-z);
            }
        }
    }

    phi_.assign(K, 0.0);
    for (size_t k = 0; k < K; ++k) {
        double acc = 0.0;
        for (size_t i = 0; i < Q; ++i) acc += std::log1p(ssum_[i * K + k]);
        phi_[k] = acc;
    }
    double s = params.bias;
    for (size_t k = 0; k < K; ++k) s += params.out_weights[k] * phi_[k];
    score_ = s;
}

void KnrmEval::backward(double coef, std::span<double> grad) const {
    const KnrmParams& p = *params_;
    const size_t Q = q_ids_.size();
    const size_t U = doc_ids_.size();
    const size_t K = static_cast<size_t>(p.kernel_count);
    const size_t E = static_cast<size_t>(p.embed_dim);
    assert(grad.size() == static_cast<size_t>(p.trainable_count()));

    const size_t w_off = static_cast<size_t>(p.vocab_rows) * E;
    for (size_t k = 0; k < K; ++k) grad[w_off + k] += coef * phi_[k];
    grad[w_off + K] += coef;  // bias

    const double* emb = p.embeddings.data();
    for (size_t i = 0; i < Q; ++i) {
        const double* eq = emb + static_cast<size_t>(q_ids_[i]) * E;
        const double qn = q_norms_[i];
        for (size_t u = 0; u < U; ++u) {
            const double m = cos_[i * U + u];
            // d score / d M_iu, folding in the doc-term multiplicity.
            double g_m = 0.0;
            for (size_t k = 0; k < K; ++k) {
                const double dm = m - p.kernel_means[k];
                const double sig2 = p.kernel_sigmas[k] * p.kernel_sigmas[k];
                const double z = dm * dm / (2.0 * sig2);
                if (z > kKernelCutoff) continue;
                g_m += p.out_weights[k] / (1.0 + ssum_[i * K + k]) * std::exp(-z) * (-dm / sig2);
            }
            if (g_m == 0.0) continue;
            g_m *= static_cast<double>(doc_counts_[u]) * coef;

            const double* ed = emb + static_cast<size_t>(doc_ids_[u]) * E;
            const double dn = d_norms_[u];
            const double a = g_m / (qn * dn);
            const double bq = g_m * m / (qn * qn);
            const double bd = g_m * m / (dn * dn);
            double* gq = grad.data() + static_cast<size_t>(q_ids_[i]) * E;
            double* gd = grad.data() + static_cast<size_t>(doc_ids_[u]) * E;
            for (size_t x = 0; x < E; ++x) {
                gq[x] += a * ed[x] - bq * eq[x];
                gd[x] += a * eq[x] - bd * ed[x];
            }
        }
    }
}

double knrm_score(const TokenSeq& q, const TokenSeq& d, const KnrmParams& params) {
    return KnrmEval(q, d, params).score();
}

ScoreWithGradient knrm_score_with_grad(const TokenSeq& q, const TokenSeq& d,
                                       const KnrmParams& params) {
    const KnrmEval eval(q, d, params);
    ScoreWithGradient out;
    out.score = eval.score();
    out.gradient.assign(static_cast<size_t>(params.trainable_count()), 0.0);
    eval.backward(1.0, out.gradient);
    return out;
}

namespace {

constexpr char kMagic[8] = {'A', 'X', 'R', 'K', 'C', 'K', 'P', '\n'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError("checkpoint: truncated file");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Vocabulary& vocab, const KnrmParams& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_checkpoint: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    write_pod(out, params.embed_dim);
    write_pod(out, params.kernel_count);
    write_pod(out, static_cast<uint64_t>(vocab.size()));
    write_pod(out, vocab.total_docs());
    write_pod(out, vocab.total_terms());
    for (size_t id = 0; id < vocab.size(); ++id) {
        const std::string& term = vocab.term_of(static_cast<TermId>(id));
        write_pod(out, static_cast<uint32_t>(term.size()));
        out.write(term.data(), static_cast<long>(term.size()));
    }
    for (size_t id = 0; id < vocab.size(); ++id) write_pod(out, vocab.df(static_cast<TermId>(id)));
    auto write_doubles = [&](const std::vector<double>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<long>(v.size() * sizeof(double)));
    };
    write_doubles(params.embeddings);
    write_doubles(params.kernel_means);
    write_doubles(params.kernel_sigmas);
    write_doubles(params.out_weights);
    write_pod(out, params.bias);
    if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError("load_checkpoint: not a checkpoint file: " + path);
    }
    const auto version = read_pod<uint32_t>(in);
    if (version != kVersion) {
        throw ParseError("load_checkpoint: unsupported version " + std::to_string(version));
    }

    Checkpoint ck;
    ck.params.embed_dim = read_pod<int32_t>(in);
    ck.params.kernel_count = read_pod<int32_t>(in);
    const auto terms = read_pod<uint64_t>(in);
    const auto total_docs = read_pod<int64_t>(in);
    const auto total_terms = read_pod<int64_t>(in);
    if (ck.params.embed_dim < 1 || ck.params.kernel_count < 1) {
        throw ParseError("load_checkpoint: bad dimensions");
    }

    std::vector<std::string> term_list(terms);
    for (uint64_t i = 0; i < terms; ++i) {
        const auto len = read_pod<uint32_t>(in);
        term_list[i].resize(len);
        in.read(term_list[i].data(), static_cast<long>(len));
        if (!in) throw ParseError("checkpoint: truncated term list");
    }
    std::vector<int64_t> df(terms);
    for (uint64_t i = 0; i < terms; ++i) df[i] = read_pod<int64_t>(in);
    ck.vocab = Vocabulary::from_parts(std::move(term_list), std::move(df), total_docs, total_terms);

    ck.params.vocab_rows = static_cast<int64_t>(terms) + 1;
    auto read_doubles = [&](std::vector<double>& v, size_t n) {
        v.resize(n);
        in.read(reinterpret_cast<char*>(v.data()), static_cast<long>(n * sizeof(double)));
        if (!in) throw ParseError("checkpoint: truncated parameter block");
    };
    read_doubles(ck.params.embeddings,
                 static_cast<size_t>(ck.params.vocab_rows) * ck.params.embed_dim);
    read_doubles(ck.params.kernel_means, static_cast<size_t>(ck.params.kernel_count));
    read_doubles(ck.params.kernel_sigmas, static_cast<size_t>(ck.params.kernel_count));
    read_doubles(ck.params.out_weights, static_cast<size_t>(ck.params.kernel_count));
    ck.params.bias = read_pod<double>(in);

    char extra;
    if (in.read(&extra, 1)) throw ParseError("load_checkpoint: trailing bytes in " + path);
    return ck;
}

}  // namespace axirank

#include "axirank/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "axirank/rng.hpp"
#include "axirank/types.hpp"

namespace axirank {

namespace {

std::string term_name(int id) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%04d", id);
    return buf;
}

using Covered = std::vector<std::pair<int, int>>;  // (term id, count)

class Generator {
  public:
    Generator(const SynthConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng) {}

    std::vector<int> draw_query() {
        const int nq = 3 + static_cast<int>(uniform_below(rng_, 2));
        std::vector<int> q;
        while (static_cast<int>(q.size()) < nq) {
            const int t = static_cast<int>(uniform_below(rng_, static_cast<uint64_t>(cfg_.query_band)));
            if (std::find(q.begin(), q.end(), t) == q.end()) q.push_back(t);
        }
        return q;
    }

    std::string build_doc(const Covered& covered) {
        const int len = cfg_.doc_len_min +
                        static_cast<int>(uniform_below(
                            rng_, static_cast<uint64_t>(cfg_.doc_len_max - cfg_.doc_len_min + 1)));
        std::vector<int> toks;
        toks.reserve(static_cast<size_t>(len));
        for (const auto& [t, tf] : covered) {
            for (int i = 0; i < tf; ++i) toks.push_back(t);
        }
        const int filler_band = cfg_.vocab_size - cfg_.query_band;
        while (static_cast<int>(toks.size()) < len) {
            toks.push_back(cfg_.query_band +
                           static_cast<int>(uniform_below(rng_, static_cast<uint64_t>(filler_band))));
        }
        shuffle_vec(rng_, toks);
        std::string text;
        for (size_t i = 0; i < toks.size(); ++i) {
            if (i > 0) text += ' ';
            text += term_name(toks[i]);
        }
        return text;
    }

    std::string positive(const std::vector<int>& q) {
        Covered covered;
        for (const int t : q) covered.emplace_back(t, 1);
        if (uniform_below(rng_, 2) == 0) {
            covered[uniform_below(rng_, covered.size())].second = 2;
        }
        return build_doc(covered);
    }

    std::string near_miss(const std::vector<int>& q) {
        const size_t drop = uniform_below(rng_, q.size());
        Covered covered;
        for (size_t i = 0; i < q.size(); ++i) {
            if (i != drop) covered.emplace_back(q[i], 1);
        }
        return build_doc(covered);
    }

    std::string weak(const std::vector<int>& q) {
        const size_t cnt = 1 + uniform_below(rng_, 2);
        std::vector<size_t> picked;
        while (picked.size() < cnt) {
            const size_t i = uniform_below(rng_, q.size());
            if (std::find(picked.begin(), picked.end(), i) == picked.end()) picked.push_back(i);
        }
        Covered covered;
        for (const size_t i : picked) covered.emplace_back(q[i], 1);
        return build_doc(covered);
    }

    std::string high_tf(const std::vector<int>& q) {
        const size_t a = uniform_below(rng_, q.size());
        size_t b = a;
        while (b == a) b = uniform_below(rng_, q.size());
        Covered covered;
        covered.emplace_back(q[a], 3 + static_cast<int>(uniform_below(rng_, 2)));
        covered.emplace_back(q[b], 3 + static_cast<int>(uniform_below(rng_, 2)));
        return build_doc(covered);
    }

    std::string no_match() { return build_doc({}); }

    std::string query_text(const std::vector<int>& q) {
        std::string text;
        for (size_t i = 0; i < q.size(); ++i) {
            if (i > 0) text += ' ';
            text += term_name(q[i]);
        }
        return text;
    }

  private:
    const SynthConfig& cfg_;
    Rng& rng_;
};

void validate(const SynthConfig& c) {
    if (c.vocab_size < 100 || c.vocab_size > 9999) {
        throw std::invalid_argument("generate_synth: vocab_size must be in [100, 9999]");
    }
    if (c.query_band < 20 || c.query_band > c.vocab_size - 10) {
        throw std::invalid_argument("generate_synth: query_band must leave a filler band");
    }
    if (c.train_queries < 1 || c.dev_queries < 1) {
        throw std::invalid_argument("generate_synth: need at least one train and one dev query");
    }
    if (c.negs_per_query < 4) {
        throw std::invalid_argument("generate_synth: negs_per_query must be >= 4");
    }
    if (c.dev_negatives < 3 || c.dev_negatives > 99) {
        throw std::invalid_argument("generate_synth: dev_negatives must be in [3, 99]");
    }
    if (c.doc_len_min < 10 || c.doc_len_max < c.doc_len_min) {
        throw std::invalid_argument("generate_synth: bad document length range");
    }
}

}  // namespace

SynthSummary generate_synth(const SynthConfig& config, const std::string& out_dir) {
    validate(config);
    Rng rng = make_rng(config.seed, RngStream::kSynth);
    Generator gen(config, rng);

    std::ofstream triples(out_dir + "/train_triples.tsv", std::ios::binary | std::ios::trunc);
    std::ofstream qrels(out_dir + "/dev_qrels.tsv", std::ios::binary | std::ios::trunc);
    std::ofstream cands(out_dir + "/dev_candidates.tsv", std::ios::binary | std::ios::trunc);
    if (!triples || !qrels || !cands) {
        throw IoError("generate_synth: cannot open output files in " + out_dir);
    }

    SynthSummary summary;
    for (int qi = 0; qi < config.train_queries; ++qi) {
        const std::vector<int> q = gen.draw_query();
        const std::string qtext = gen.query_text(q);
        const std::string pos = gen.positive(q);
        std::vector<std::string> negs;
        for (int i = 0; i < config.negs_per_query - 3; ++i) negs.push_back(gen.near_miss(q));
        negs.push_back(gen.weak(q));
        negs.push_back(gen.high_tf(q));
        negs.push_back(gen.no_match());
        for (const std::string& neg : negs) {
            triples << qtext << '\t' << pos << '\t' << neg << '\n';
            ++summary.train_triples;
        }
    }

    const int dev_weak = config.dev_negatives / 4;
    const int dev_none = config.dev_negatives / 5;
    const int dev_near = config.dev_negatives - dev_weak - dev_none;
    char idbuf[32];
    for (int qi = 0; qi < config.dev_queries; ++qi) {
        const std::vector<int> q = gen.draw_query();
        const std::string qtext = gen.query_text(q);
        std::snprintf(idbuf, sizeof(idbuf), "dq%04d", qi);
        const std::string qid = idbuf;
        std::snprintf(idbuf, sizeof(idbuf), "qd%04d_p", qi);
        const std::string pos_id = idbuf;

        cands << qid << '\t' << qtext << '\t' << pos_id << '\t' << gen.positive(q) << '\n';
        qrels << qid << '\t' << pos_id << '\t' << 1 << '\n';
        ++summary.dev_candidates;
        int neg_no = 0;
        auto emit_neg = [&](const std::string& text) {
            std::snprintf(idbuf, sizeof(idbuf), "qd%04d_n%02d", qi, neg_no++);
            cands << qid << '\t' << qtext << '\t' << idbuf << '\t' << text << '\n';
            ++summary.dev_candidates;
        };
        for (int i = 0; i < dev_near; ++i) emit_neg(gen.near_miss(q));
        for (int i = 0; i < dev_weak; ++i) emit_neg(gen.weak(q));
        for (int i = 0; i < dev_none; ++i) emit_neg(gen.no_match());
        ++summary.dev_queries;
    }

    if (!triples || !qrels || !cands) throw IoError("generate_synth: write failed in " + out_dir);
    return summary;
}

}  // namespace axirank

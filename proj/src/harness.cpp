#include "nsbc/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nsbc/channel.hpp"
#include "nsbc/json_io.hpp"
#include "nsbc/rng.hpp"
#include "nsbc/schemes.hpp"
#include "nsbc/tree.hpp"

namespace nsbc {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "scheme=" << scheme << ";field=" << field << ";trials=" << trials
       << ";seed=" << seed << ";n=" << n << ";dof=";
    for (std::size_t i = 0; i < dof.size(); ++i) {
        if (i) os << ",";
        os << dof[i];
    }
    os << ";pattern=";
    if (pattern) {
        for (const auto& r : pattern->rows()) os << r << "|";
    }
    return os.str();
}

namespace {

unsigned worker_count(std::uint64_t trials) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("NSBC_THREADS")) {
        const unsigned long cap = std::strtoul(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned long>(n, cap);
    }
    n = static_cast<unsigned>(std::min<std::uint64_t>(n, trials));
    return std::max(1u, n);
}

std::string record_payload(const ExperimentRecord& r) {
    std::ostringstream os;
    os << r.schema_version << ";" << r.library_version << ";" << r.config_hash << ";"
       << r.scheme << ";" << r.field << ";" << r.trials << ";" << r.seed << ";errors=";
    for (const auto e : r.error_counts) os << e << ",";
    os << ";rates=";
    for (const double b : r.rate_bits) {
        os.precision(17);
        os << b << ",";
    }
    return os.str();
}

} // namespace

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
    const Field F = Field::parse(cfg.field);

    const auto t0 = std::chrono::steady_clock::now();

    int users = 0;
    std::function<SchemeRun(SeededRng&)> trial;

    if (cfg.scheme == "ns-successive" || cfg.scheme == "ns-multipartite") {
        if (!cfg.pattern)
            throw std::invalid_argument("run_experiment: " + cfg.scheme + " needs a pattern");
        const Pattern M = *cfg.pattern;
        scheme_order(M); // validates triangularizability up front
        users = M.K();
        const bool successive = cfg.scheme == "ns-successive";
        trial = [M, &F, successive, users](SeededRng& rng) {
            std::vector<fe> W(static_cast<std::size_t>(users));
            for (auto& w : W) w = F.uniform(rng);
            return successive ? ns_successive(M, F, W, rng) : ns_multipartite(M, F, W, rng);
        };
    } else if (cfg.scheme == "tdma") {
        if (!cfg.pattern)
            throw std::invalid_argument("run_experiment: tdma needs a pattern");
        const auto parsed = tree_from_pattern(*cfg.pattern);
        if (!parsed.ok())
            throw std::invalid_argument("run_experiment: tdma needs a tree network pattern: " +
                                        parsed.rejection);
        const TreeNetwork T = *parsed.tree;
        if (static_cast<int>(cfg.dof.size()) != T.K)
            throw std::invalid_argument("run_experiment: tdma needs a DoF tuple of length K");
        const DofTuple d{cfg.dof};
        if (!classical_region_contains(T, d))
            throw std::invalid_argument("run_experiment: DoF tuple outside classical region");
        users = T.K;
        const int n = cfg.n;
        trial = [T, d, &F, n](SeededRng& rng) {
            const auto counts = tdma_symbol_counts(T, d, n);
            std::vector<std::vector<fe>> W(counts.size());
            for (std::size_t k = 0; k < counts.size(); ++k) {
                W[k].resize(static_cast<std::size_t>(counts[k]));
                for (auto& w : W[k]) w = F.uniform(rng);
            }
            return classical_tdma(T, d, F, n, W, rng);
        };
    } else if (cfg.scheme == "fading-dirt") {
        users = 1;
        trial = [&F](SeededRng& rng) {
            const fe w = F.uniform(rng);
            const fe theta = F.uniform(rng);
            const fe g = F.uniform(rng);
            const FadingDirtRun r = fading_dirt_ns(F, w, theta, g, rng);
            SchemeRun run;
            run.K = 1;
            run.messages = {{w}};
            run.decoded = {{r.decoded}};
            run.error = {r.error};
            run.rate_bits = {r.rate_bits};
            run.trace_x = {r.x};
            run.trace_y = {r.y};
            run.trace_g = {g};
            return run;
        };
    } else if (cfg.scheme == "toy1-ns" || cfg.scheme == "toy2-ns") {
        users = 2;
        const bool toy2 = cfg.scheme == "toy2-ns";
        trial = [&F, toy2](SeededRng& rng) {
            const ToyChannel ch = toy2 ? make_toy2(F) : make_toy1(F);
            return toy_ns_run(ch, F.uniform(rng), F.uniform(rng), rng);
        };
    } else {
        throw std::invalid_argument("run_experiment: unknown scheme '" + cfg.scheme + "'");
    }

    ExperimentRecord rec;
    rec.config_hash = to_hex(fnv1a64(cfg.canonical()));
    rec.scheme = cfg.scheme;
    rec.field = cfg.field;
    rec.trials = cfg.trials;
    rec.seed = cfg.seed;
    rec.error_counts.assign(static_cast<std::size_t>(users), 0);
    rec.rate_bits.assign(static_cast<std::size_t>(users), 0.0);

    const bool tracing = !cfg.trace_path.empty();
    std::vector<std::string> trace_rows(tracing ? cfg.trials : 0);
    const unsigned workers = worker_count(cfg.trials);

    auto run_range = [&](std::uint64_t lo, std::uint64_t hi,
                         std::vector<std::uint64_t>& errors, std::vector<double>& rates) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            SeededRng rng(derive_seed(cfg.seed, i));
            const SchemeRun out = trial(rng);
            for (int k = 0; k < users; ++k) {
                if (out.error[k]) ++errors[k];
                rates[k] += out.rate_bits[k];
            }
            if (tracing) {
                std::ostringstream row;
                row << i;
                for (int k = 0; k < users; ++k) row << "," << (out.error[k] ? 1 : 0);
                for (const fe v : out.trace_x) row << "," << v;
                for (const fe v : out.trace_y) row << "," << v;
                for (const fe v : out.trace_g) row << "," << v;
                trace_rows[i] = row.str();
            }
        }
    };

    if (workers == 1) {
        run_range(0, cfg.trials, rec.error_counts, rec.rate_bits);
    } else {
        std::vector<std::vector<std::uint64_t>> errs(
            workers, std::vector<std::uint64_t>(static_cast<std::size_t>(users), 0));
        std::vector<std::vector<double>> rates(
            workers, std::vector<double>(static_cast<std::size_t>(users), 0.0));
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex error_mutex;
        const std::uint64_t chunk = (cfg.trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t lo = w * chunk;
            const std::uint64_t hi = std::min<std::uint64_t>(cfg.trials, lo + chunk);
            pool.emplace_back([&, w, lo, hi]() {
                try {
                    run_range(lo, hi, errs[w], rates[w]);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
        for (unsigned w = 0; w < workers; ++w)
            for (int k = 0; k < users; ++k) {
                rec.error_counts[k] += errs[w][k];
                rec.rate_bits[k] += rates[w][k];
            }
    }
    for (auto& r : rec.rate_bits) r /= static_cast<double>(cfg.trials);

    if (tracing) {
        std::ofstream csv(cfg.trace_path);
        if (!csv) throw std::runtime_error("run_experiment: cannot write " + cfg.trace_path);
        csv << "trial,errors...,x...,y...,G(row-major)...\n";
        for (const auto& row : trace_rows) csv << row << "\n";
    }

    rec.record_hash = to_hex(fnv1a64(record_payload(rec)));
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    if (!cfg.out_path.empty()) {
        std::ofstream f(cfg.out_path);
        if (!f) throw std::runtime_error("run_experiment: cannot write " + cfg.out_path);
        f << record_to_json(rec).dump(2) << "\n";
    }
    return rec;
}

// --------------------------------------------------------------------------
// Fixed reference scheme for the same-marginals comparison: uncoded symbols,
// each receiver inverting its pivot coefficient (its own-index antenna when
// starred, otherwise the first antenna it hears). Arbitrary but fixed.

namespace {

int pivot_antenna(const Pattern& M, int k) {
    if (k < M.B() && M.star(k, k)) return k;
    for (int b = 0; b < M.B(); ++b)
        if (M.star(k, b)) return b;
    return 0; // unreachable for valid patterns
}

std::vector<bool> naive_run(const Pattern& M, const Field& F, const std::vector<fe>& W,
                            const ChannelDraw& draw) {
    const auto obs = apply_channel(draw, F, W);
    std::vector<bool> err(static_cast<std::size_t>(M.K()), false);
    for (int k = 0; k < M.K(); ++k) {
        const int b = pivot_antenna(M, k);
        const fe w_hat = F.div(obs[k].y, obs[k].csir[b]);
        err[k] = w_hat != W[k];
    }
    return err;
}

} // namespace

PairedRecord compare_same_marginals_mc(const Pattern& M, const Field& F,
                                       std::uint64_t trials, std::uint64_t seed) {
    if (M.K() != M.B())
        throw std::invalid_argument("compare_same_marginals: pattern must be square");
    const int K = M.K();
    PairedRecord rec;
    rec.trials = trials;
    rec.errors_original.assign(static_cast<std::size_t>(K), 0);
    rec.errors_coupled.assign(static_cast<std::size_t>(K), 0);
    // running moments of the per-trial error-indicator difference
    std::vector<double> sum_d(static_cast<std::size_t>(K), 0.0);
    std::vector<double> sum_d2(static_cast<std::size_t>(K), 0.0);

    for (std::uint64_t i = 0; i < trials; ++i) {
        SeededRng rng(derive_seed(seed, i));
        std::vector<fe> W(static_cast<std::size_t>(K));
        for (auto& w : W) w = F.uniform(rng);
        const auto [orig, coupled] = couple_same_marginals(M, F, rng);
        const auto e1 = naive_run(M, F, W, orig);
        const auto e2 = naive_run(M, F, W, coupled);
        for (int k = 0; k < K; ++k) {
            if (e1[k]) ++rec.errors_original[k];
            if (e2[k]) ++rec.errors_coupled[k];
            const double d = static_cast<double>(e1[k]) - static_cast<double>(e2[k]);
            sum_d[k] += d;
            sum_d2[k] += d * d;
        }
    }
    rec.diff.resize(static_cast<std::size_t>(K));
    rec.sigma3.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double n = static_cast<double>(trials);
        const double mean = sum_d[k] / n;
        const double var = sum_d2[k] / n - mean * mean;
        rec.diff[k] = mean;
        rec.sigma3[k] = 3.0 * std::sqrt(std::max(var, 0.0) / n);
    }
    return rec;
}

PairedRecord compare_same_marginals_exact(const Pattern& M, const Field& F) {
    if (M.K() != M.B())
        throw std::invalid_argument("compare_same_marginals: pattern must be square");
    const int K = M.K(), B = M.B();
    const int q = static_cast<int>(F.q());
    const int qm1 = q - 1;

    std::vector<std::pair<int, int>> stars;
    for (int k = 0; k < K; ++k)
        for (int b = 0; b < B; ++b)
            if (M.star(k, b)) stars.emplace_back(k, b);

    std::uint64_t w_count = 1;
    for (int i = 0; i < B; ++i) w_count *= static_cast<std::uint64_t>(q);
    std::uint64_t g_count = 1;
    for (std::size_t i = 0; i < stars.size(); ++i) g_count *= static_cast<std::uint64_t>(qm1);
    std::uint64_t l_count = 1;
    for (int i = 0; i < B; ++i) l_count *= static_cast<std::uint64_t>(qm1);

    PairedRecord rec;
    rec.exact = true;
    rec.trials = 0;
    rec.p_original.assign(static_cast<std::size_t>(K), Rat(0));
    rec.p_coupled.assign(static_cast<std::size_t>(K), Rat(0));
    const Rat w_w(1, static_cast<long long>(w_count));
    const Rat w_g(1, static_cast<long long>(g_count));
    const Rat w_l(1, static_cast<long long>(l_count));

    ChannelDraw draw;
    draw.K = K;
    draw.B = B;
    draw.G.assign(static_cast<std::size_t>(K) * B, 0);

    std::vector<fe> W(static_cast<std::size_t>(B));
    for (std::uint64_t wi = 0; wi < w_count; ++wi) {
        std::uint64_t tw = wi;
        for (int b = 0; b < B; ++b) {
            W[b] = static_cast<fe>(tw % q);
            tw /= q;
        }
        for (std::uint64_t gi = 0; gi < g_count; ++gi) {
            std::uint64_t tg = gi;
            for (const auto& [k, b] : stars) {
                draw.at(k, b) = static_cast<fe>(1 + tg % qm1);
                tg /= qm1;
            }
            const auto e1 = naive_run(M, F, W, draw);
            for (int k = 0; k < K; ++k)
                if (e1[k]) rec.p_original[k] += w_w * w_g;

            for (std::uint64_t li = 0; li < l_count; ++li) {
                std::uint64_t tl = li;
                ChannelDraw scaled = draw;
                for (int b = 0; b < B; ++b) {
                    const fe lambda = static_cast<fe>(1 + tl % qm1);
                    tl /= qm1;
                    for (int k = 0; k < K; ++k)
                        scaled.at(k, b) = F.mul(draw.at(k, b), lambda);
                }
                const auto e2 = naive_run(M, F, W, scaled);
                for (int k = 0; k < K; ++k)
                    if (e2[k]) rec.p_coupled[k] += w_w * w_g * w_l;
            }
        }
    }
    rec.diff.resize(static_cast<std::size_t>(K));
    rec.sigma3.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k)
        rec.diff[k] = to_double(rec.p_original[k] - rec.p_coupled[k]);
    return rec;
}

} // namespace nsbc

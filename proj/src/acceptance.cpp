#include "nsbc/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "nsbc/channel.hpp"
#include "nsbc/harness.hpp"
#include "nsbc/infotools.hpp"
#include "nsbc/minrank.hpp"
#include "nsbc/nsbox.hpp"
#include "nsbc/schemes.hpp"
#include "nsbc/tree.hpp"

namespace nsbc {

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
    bool pass = true;
    std::ostringstream details;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            details << "FAILED: " << what << "; ";
        }
    }
    void note(const std::string& what) { details << what << "; "; }
};

Pattern random_small_pattern(SeededRng& rng, int K, int B) {
    while (true) {
        std::vector<std::uint8_t> cells(static_cast<std::size_t>(K) * B, 0);
        for (auto& c : cells) c = rng.uniform_below(100) < 55 ? 1 : 0;
        bool ok = true;
        for (int k = 0; k < K && ok; ++k) {
            bool any = false;
            for (int b = 0; b < B; ++b) any |= cells[static_cast<std::size_t>(k) * B + b] != 0;
            ok &= any;
        }
        for (int b = 0; b < B && ok; ++b) {
            bool any = false;
            for (int k = 0; k < K; ++k) any |= cells[static_cast<std::size_t>(k) * B + b] != 0;
            ok &= any;
        }
        if (ok) return Pattern(K, B, std::move(cells));
    }
}

TreeNetwork random_tree(SeededRng& rng, int B, int extra_rx) {
    std::vector<int> parent(static_cast<std::size_t>(B));
    for (int b = 1; b <= B; ++b)
        parent[b - 1] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(b)));
    std::vector<int> assoc;
    for (int b = 1; b <= B; ++b) assoc.push_back(b);
    for (int i = 0; i < extra_rx; ++i)
        assoc.push_back(1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(B))));
    return TreeNetwork::from_parents(parent, assoc);
}

DofTuple random_feasible(const TreeNetwork& T, SeededRng& rng) {
    DofTuple d;
    d.d.resize(static_cast<std::size_t>(T.K));
    for (auto& v : d.d) v = rng.uniform01();
    double worst = 0.0;
    for (const int leaf : T.leaves) {
        double s = 0.0;
        for (const int b : T.root_path(leaf)) s += dof_at_antenna(T, d, b);
        worst = std::max(worst, s);
    }
    for (auto& v : d.d) v /= worst * 1.0000001;
    return d;
}

// ---- criterion bodies -----------------------------------------------------

Check c1_zero_error_broadcast(std::uint64_t seed) {
    Check c;
    const Pattern path4 = Pattern::lower_triangular(4);
    for (const std::string scheme : {"ns-successive", "ns-multipartite"}) {
        for (const std::string field : {"GF(5)", "GF(9)"}) {
            ExperimentConfig cfg;
            cfg.scheme = scheme;
            cfg.pattern = path4;
            cfg.field = field;
            cfg.trials = 10000;
            cfg.seed = seed;
            const auto rec = run_experiment(cfg);
            const double lq = std::log2(static_cast<double>(Field::parse(field).q()));
            for (int k = 0; k < 4; ++k) {
                c.require(rec.error_counts[k] == 0,
                          scheme + " " + field + " user " + std::to_string(k + 1) +
                              " errors=" + std::to_string(rec.error_counts[k]));
                c.require(std::abs(rec.rate_bits[k] - lq) < 1e-12,
                          scheme + " " + field + " rate mismatch");
            }
        }
    }
    c.note("4 runs x 10^4 trials, all error counts 0");
    return c;
}

Check c2_factor_k_separation(std::uint64_t seed) {
    Check c;
    const Field F = Field::make(5, 1);
    const double lq = std::log2(5.0);
    const Pattern path4 = Pattern::lower_triangular(4);

    SeededRng rng(seed);
    double ns_sum = 0.0;
    for (int it = 0; it < 100; ++it) {
        std::vector<fe> W(4);
        for (auto& w : W) w = F.uniform(rng);
        const auto run = ns_successive(path4, F, W, rng);
        c.require(!run.any_error(), "NS scheme errored");
        ns_sum = 0.0;
        for (const double r : run.rate_bits) ns_sum += r;
    }
    c.require(std::abs(ns_sum - 4 * lq) < 1e-12, "NS sum rate != 4 log2 q");

    const int n = 100;
    const TreeNetwork T = TreeNetwork::path(4);
    const DofTuple leaf_sat{{0, 0, 0, 1}}; // all DoF on the single leaf
    std::vector<std::vector<fe>> W(4);
    W[3].resize(static_cast<std::size_t>(n));
    for (auto& w : W[3]) w = F.uniform(rng);
    const auto tdma = classical_tdma(T, leaf_sat, F, n, W, rng);
    c.require(!tdma.any_error(), "TDMA errored");
    double tdma_sum = 0.0;
    for (const double r : tdma.rate_bits) tdma_sum += r;
    c.require(tdma_sum <= (1.0 + 4.0 / n) * lq + 1e-12, "TDMA sum rate above bound");

    const double ratio = ns_sum / tdma_sum;
    std::ostringstream os;
    os << "ns_sum=" << ns_sum << " tdma_sum=" << tdma_sum << " ratio=" << ratio;
    c.note(os.str());
    c.require(ratio >= 3.8, "separation ratio below 3.8");
    return c;
}

Check c3_fano(std::uint64_t) {
    Check c;
    const Pattern fano = Pattern::fano();
    c.require(triangle_number(fano) == 3, "tri(fano) != 3");

    const Field F3 = Field::make(3, 1);
    const auto solver3 = minrank_exact(fano, F3);
    c.require(!solver3.budget_exceeded, "GF(3) solver budget exceeded");
    c.require(solver3.rank == 4, "minrank over GF(3) != 4 (solver)");

    WorkBudget wide;
    wide.limit = 4'000'000'000ULL;
    // independent oracle: 2^21 row-normalized fitting matrices, each ranked
    const auto oracle3 = minrank_bruteforce(fano, F3, /*normalize_rows=*/true, wide);
    c.require(!oracle3.budget_exceeded, "GF(3) oracle budget exceeded");
    c.require(oracle3.rank == 4, "minrank over GF(3) != 4 (oracle)");
    c.require(oracle3.rank == solver3.rank, "solver and oracle disagree over GF(3)");

    const Field F4 = Field::make(2, 2);
    const auto solver4 = minrank_exact(fano, F4);
    c.require(!solver4.budget_exceeded, "GF(4) solver budget exceeded");
    c.require(solver4.rank == 3, "minrank over GF(4) != 3");

    const Field F2 = Field::make(2, 1);
    const auto single = minrank_bruteforce(fano, F2); // exactly one fitting matrix
    const auto solver2 = minrank_exact(fano, F2);
    c.require(solver2.rank == single.rank, "GF(2) solver disagrees with the single matrix");
    std::ostringstream os;
    os << "tri=3 minrank(GF3)=" << solver3.rank << " minrank(GF4)=" << solver4.rank
       << " rank of the unique GF(2) fitting matrix=" << single.rank;
    c.note(os.str());
    return c;
}

Check c4_small_patterns(std::uint64_t seed) {
    Check c;
    SeededRng rng(seed ^ 0xABCDEF);
    int oracle_checked = 0, oracle_disagreements = 0;
    int mismatch[3] = {0, 0, 0}; // per field q = 2, 3, 4
    int min_over_fields_mismatch = 0;
    std::string witness;
    for (int it = 0; it < 200; ++it) {
        const int K = 2 + static_cast<int>(rng.uniform_below(5));
        const int B = 2 + static_cast<int>(rng.uniform_below(5));
        const Pattern M = random_small_pattern(rng, K, B);
        const int tri = triangle_number(M);
        int best_rank = std::min(K, B);
        const std::uint32_t fields[3] = {2u, 3u, 4u};
        for (int fi = 0; fi < 3; ++fi) {
            const Field F = Field::from_order(fields[fi]);
            const auto mr = minrank_exact(M, F);
            c.require(!mr.budget_exceeded, "budget exceeded on a small pattern");
            if (mr.budget_exceeded) continue;
            best_rank = std::min(best_rank, mr.rank);
            if (mr.rank != tri) {
                ++mismatch[fi];
                if (witness.empty()) {
                    std::ostringstream w;
                    w << "first witness: q=" << fields[fi] << " tri=" << tri
                      << " minrank=" << mr.rank << " pattern=";
                    for (const auto& row : M.rows()) w << row << "|";
                    witness = w.str();
                }
            }
            if (M.total_stars() <= 12) {
                WorkBudget wide;
                wide.limit = 1'000'000'000ULL;
                const auto oracle = minrank_bruteforce(M, F, false, wide);
                if (oracle.rank != mr.rank) ++oracle_disagreements;
                ++oracle_checked;
            }
        }
        if (best_rank != tri) ++min_over_fields_mismatch;
    }
    c.require(oracle_disagreements == 0, "solver disagrees with the brute-force oracle");
    c.require(mismatch[0] + mismatch[1] + mismatch[2] == 0,
              "minrank != tri on some pattern/field pair with min(K,B) <= 6");
    std::ostringstream os;
    os << "200 patterns; minrank!=tri counts: q=2:" << mismatch[0] << " q=3:" << mismatch[1]
       << " q=4:" << mismatch[2] << "; min over the three fields != tri: "
       << min_over_fields_mismatch << "; brute-force cross-checks: " << oracle_checked
       << " (disagreements: " << oracle_disagreements << ")";
    if (!witness.empty()) os << "; " << witness;
    c.note(os.str());
    return c;
}

Check c5_ns_verifier(std::uint64_t) {
    Check c;
    const Field F3 = Field::make(3, 1);
    c.require(verify_nonsignaling(TriangularBox(F3, 2).tabularize()).ok,
              "triangular K=2 failed");
    c.require(verify_nonsignaling(TriangularBox(F3, 3).tabularize()).ok,
              "triangular K=3 failed");
    c.require(verify_nonsignaling(OtpBox(F3, 2).tabularize()).ok, "otp k=2 failed");
    c.require(verify_nonsignaling(OtpBox(F3, 3).tabularize()).ok, "otp k=3 failed");
    c.require(verify_nonsignaling(FadingDirtBox(F3).tabularize()).ok, "fading-dirt failed");
    const auto product = [&F3](fe t, const std::vector<fe>& s) {
        fe out = t;
        for (const fe v : s) out = F3.mul(out, v);
        return out;
    };
    c.require(verify_nonsignaling(MacBox(F3, 2, product).tabularize()).ok, "mac failed");

    const auto leak = verify_nonsignaling(make_leak_box(F3));
    c.require(!leak.ok, "leak box passed");
    c.require(leak.subset == std::vector<int>{2}, "leak witness subset is not {2}");
    c.note("six boxes verified exactly; leak box rejected with witness subset {2}");
    return c;
}

Check c6_same_marginals(std::uint64_t seed) {
    Check c;
    const Pattern M = Pattern::fully_connected(2, 2);

    const auto exact = compare_same_marginals_exact(M, Field::make(3, 1));
    for (int k = 0; k < 2; ++k)
        c.require(exact.p_original[k] == exact.p_coupled[k],
                  "exact q=3 error probabilities differ for user " + std::to_string(k + 1));
    std::ostringstream os;
    os << "exact q=3: P_e = [" << format_rat(exact.p_original[0]) << ", "
       << format_rat(exact.p_original[1]) << "] on both channels";

    const auto mc = compare_same_marginals_mc(M, Field::make(5, 1), 100000, seed);
    for (int k = 0; k < 2; ++k)
        c.require(std::abs(mc.diff[k]) <= mc.sigma3[k] + 1e-12,
                  "q=5 Monte Carlo difference outside 3 sigma");
    os << "; q=5 MC diffs = [" << mc.diff[0] << ", " << mc.diff[1] << "]";
    c.note(os.str());
    return c;
}

Check c7_toy_certificates(std::uint64_t seed) {
    Check c;
    const double l3 = std::log2(3.0);
    const auto cert = classical_toy1_f3();
    c.require(std::abs(cert.r2_bits - 0.5 * l3) < 1e-9, "I(U;Y2bar) != 0.5 log2 3");
    c.require(std::abs(cert.sum_bits - 1.5 * l3) < 1e-9, "classical sum != 1.5 log2 3");

    const Field F3 = Field::make(3, 1);
    SeededRng rng(seed ^ 0x70707);
    for (const bool toy2 : {false, true}) {
        const ToyChannel ch = toy2 ? make_toy2(F3) : make_toy1(F3);
        for (fe w1 = 0; w1 < 3; ++w1)
            for (fe w2 = 0; w2 < 3; ++w2)
                for (int rep = 0; rep < 20; ++rep) {
                    const auto run = toy_ns_run(ch, w1, w2, rng);
                    c.require(!run.any_error(), "toy NS run errored");
                    c.require(std::abs(run.rate_bits[0] - l3) < 1e-12 &&
                                  std::abs(run.rate_bits[1] - l3) < 1e-12,
                              "toy NS rate point is not (log2 3, log2 3)");
                }
    }
    std::ostringstream os;
    os << "I(U;Y2bar)=" << cert.r2_bits << " sum=" << cert.sum_bits
       << " NS point (log2 3, log2 3) with zero error";
    c.note(os.str());
    return c;
}

Check c8_fading_dirt(std::uint64_t seed) {
    Check c;
    const Field F7 = Field::make(7, 1);
    SeededRng rng(seed ^ 0xF4D);
    for (int it = 0; it < 10000; ++it) {
        const auto r = fading_dirt_ns(F7, F7.uniform(rng), F7.uniform(rng), F7.uniform(rng), rng);
        c.require(!r.error, "NS fading-dirt scheme errored");
        c.require(std::abs(r.rate_bits - std::log2(7.0)) < 1e-12, "rate != log2 7");
        if (!c.pass) break;
    }

    std::ostringstream os;
    os << "q=7 zero error over 10^4 trials";
    for (const std::uint32_t q : {3u, 5u}) {
        const Field F = Field::from_order(q);
        const double mi =
            fading_dirt_baseline_joint(F).mutual_information_bits({"X"}, {"Y"}, {"G"});
        const double expect = std::log2(static_cast<double>(q)) / q;
        c.require(std::abs(mi - expect) < 1e-9,
                  "classical baseline != (1/q) log2 q at q=" + std::to_string(q));
        const double ratio = std::log2(static_cast<double>(q)) / mi;
        c.require(ratio >= static_cast<double>(q) - 1e-6,
                  "separation ratio below q at q=" + std::to_string(q));
        os << "; q=" << q << " baseline=" << mi << " ratio=" << ratio;
    }
    c.note(os.str());
    return c;
}

Check c9_mac_conversion(std::uint64_t) {
    Check c;
    const Field F3 = Field::make(3, 1);
    const auto product = [&F3](fe t, const std::vector<fe>& s) {
        fe out = t;
        for (const fe v : s) out = F3.mul(out, v);
        return out;
    };
    const std::vector<Rat> uniform_noise(3, Rat(1, 3));
    const Rat tv = mac_conversion_tv(F3, 2, product, uniform_noise);
    c.require(tv == Rat(0), "total variation distance is " + format_rat(tv) + ", not 0");
    c.note("exhaustive q=3, K=2: TV(converted, interference-free) = 0 exactly");
    return c;
}

Check c10_gaussian(std::uint64_t seed) {
    Check c;
    const Pattern tri3 = Pattern::lower_triangular(3);
    const double P = 1e4;
    const int n = 100000;
    SeededRng rng(seed ^ 0x6A055);
    GaussianModBox probe(P, 2);
    const int Q = probe.modulus();
    std::vector<std::vector<int>> W(3, std::vector<int>(static_cast<std::size_t>(n)));
    for (auto& row : W)
        for (auto& w : row) w = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(Q)));

    const auto run = gaussian_convert(tri3, P, n, W, rng, {});
    std::ostringstream os;
    os << "P=1e4, n=1e5: var(Zbar) = [";
    for (int k = 0; k < 3; ++k) {
        c.require(run.diag.zbar_var[k] <= 2.25,
                  "var(Zbar_" + std::to_string(k + 1) + ") above 9/4");
        os << run.diag.zbar_var[k] << (k < 2 ? ", " : "]");
    }
    c.require(run.diag.average_total_power <= P, "power constraint violated");
    os << " avg_power=" << run.diag.average_total_power;

    const double ratio = std::log2(std::ceil(std::sqrt(1e6))) / (0.5 * std::log2(1e6));
    c.require(ratio >= 0.95 && ratio <= 1.0, "DoF-trend ratio outside [0.95, 1] at P=1e6");
    os << " dof_ratio(P=1e6)=" << ratio;
    c.note(os.str());
    return c;
}

Check c11_tdma_schedule(std::uint64_t seed) {
    Check c;
    // the six-antenna example tree and its closed-form interval map
    const TreeNetwork fig = TreeNetwork::from_parents({0, 1, 2, 2, 1, 5}, {1, 2, 3, 4, 5, 6});
    SeededRng rng(seed ^ 0x7D3A);
    for (int it = 0; it < 50; ++it) {
        const DofTuple d = random_feasible(fig, rng);
        const auto s = tdma_schedule(fig, d);
        const auto& dv = d.d;
        const double expected[6][2] = {
            {0, dv[0]},
            {dv[0], dv[0] + dv[1]},
            {dv[0] + dv[1], dv[0] + dv[1] + dv[2]},
            {dv[0] + dv[1], dv[0] + dv[1] + dv[3]},
            {dv[0], dv[0] + dv[4]},
            {dv[0] + dv[4], dv[0] + dv[4] + dv[5]},
        };
        for (int b = 1; b <= 6; ++b) {
            c.require(std::abs(s.intervals.at(b).first - expected[b - 1][0]) <= 1e-12 &&
                          std::abs(s.intervals.at(b).second - expected[b - 1][1]) <= 1e-12,
                      "interval " + std::to_string(b) + " deviates from the closed form");
        }
    }

    int trees = 0;
    while (trees < 100) {
        const int B = 2 + static_cast<int>(rng.uniform_below(7)); // K,B <= 8
        const TreeNetwork T = random_tree(rng, B, 2);
        if (T.K > 8) continue;
        ++trees;
        const DofTuple d = random_feasible(T, rng);
        const auto s = tdma_schedule(T, d);
        for (int k = 0; k < T.K; ++k) {
            const auto path = T.root_path(T.rx_assoc[k]);
            for (std::size_t i = 0; i < path.size(); ++i)
                for (std::size_t j = i + 1; j < path.size(); ++j) {
                    const auto& a = s.intervals.at(path[i]);
                    const auto& b = s.intervals.at(path[j]);
                    const double overlap =
                        std::min(a.second, b.second) - std::max(a.first, b.first);
                    c.require(overlap <= 1e-9, "receiver-path intervals overlap");
                }
        }
    }
    c.note("closed-form match on 50 random tuples; orthogonality on 100 random trees");
    return c;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    struct Entry {
        int id;
        const char* name;
        Check (*fn)(std::uint64_t);
        double time_limit_ms; // 0 = no stated limit
    };
    const Entry entries[] = {
        {1, "zero-error NS broadcast on the path-4 network", c1_zero_error_broadcast, 10e3},
        {2, "factor-K sum-rate separation at K=4", c2_factor_k_separation, 10e3},
        {3, "Fano pattern: triangle number and min-rank per field", c3_fano, 15 * 60e3},
        {4, "min-rank equals triangle number for min(K,B) <= 6", c4_small_patterns, 10 * 60e3},
        {5, "non-signaling verifier on the box family", c5_ns_verifier, 60e3},
        {6, "same-marginals coupling leaves error rates unchanged", c6_same_marginals, 0},
        {7, "toy-channel certificates over GF(3)", c7_toy_certificates, 1e3},
        {8, "fading dirty paper: NS scheme vs classical baseline", c8_fading_dirt, 0},
        {9, "MAC conversion is exactly interference-free", c9_mac_conversion, 0},
        {10, "Gaussian conversion diagnostics", c10_gaussian, 60e3},
        {11, "TDMA scheduler closed form and orthogonality", c11_tdma_schedule, 0},
    };

    std::vector<CriterionResult> results;
    for (const auto& e : entries) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = e.id;
        r.name = e.name;
        try {
            Check c = e.fn(opts.seed);
            r.pass = c.pass;
            r.details = c.details.str();
        } catch (const std::exception& ex) {
            r.pass = false;
            r.details = std::string("exception: ") + ex.what();
        }
        r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        if (e.time_limit_ms > 0 && r.wall_ms > e.time_limit_ms) {
            r.pass = false;
            r.details += "FAILED: over the stated runtime limit; ";
        }
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace nsbc

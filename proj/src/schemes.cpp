#include "nsbc/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "nsbc/minrank.hpp"

namespace nsbc {

namespace {

double log2q(const Field& F) { return std::log2(static_cast<double>(F.q())); }

void check_messages(const Field& F, const std::vector<fe>& W, int K) {
    if (static_cast<int>(W.size()) != K)
        throw std::invalid_argument("scheme: expected " + std::to_string(K) + " messages");
    for (const fe w : W)
        if (!F.contains(w)) throw std::invalid_argument("scheme: message outside field");
}

} // namespace

SchemeOrder scheme_order(const Pattern& M) {
    if (M.K() != M.B())
        throw std::invalid_argument("scheme_order: pattern must be square (one receiver per "
                                    "antenna); got K=" + std::to_string(M.K()) +
                                    ", B=" + std::to_string(M.B()));
    const int K = M.K();

    const auto parsed = tree_from_pattern(M);
    if (parsed.ok()) {
        const auto& T = *parsed.tree;
        bool unique_assoc = true;
        std::vector<int> rx_of(static_cast<std::size_t>(K) + 1, -1);
        for (int k = 0; k < K; ++k) {
            if (rx_of[T.rx_assoc[k]] != -1) {
                unique_assoc = false;
                break;
            }
            rx_of[T.rx_assoc[k]] = k;
        }
        if (unique_assoc) {
            SchemeOrder ord;
            for (const int b : T.dfs_order()) {
                ord.tx.push_back(b - 1);
                ord.rx.push_back(rx_of[b]);
            }
            return ord;
        }
    }

    const auto cert = find_triangular_order(M, K);
    if (!cert)
        throw std::invalid_argument(
            "scheme_order: pattern is not triangularizable (no ordering puts stars on the "
            "whole main diagonal with zeros above)");
    return {cert->first, cert->second};
}

// --------------------------------------------------------------------------

std::vector<fe> ns_successive_encode(const SchemeOrder& ord, const Field& F,
                                     const std::vector<fe>& W,
                                     const std::vector<RefereeSession*>& tx_sessions) {
    const int K = static_cast<int>(ord.rx.size());
    std::vector<fe> x(static_cast<std::size_t>(K), 0);
    x[ord.tx[0]] = W[ord.rx[0]];
    for (int k = 2; k <= K; ++k) {
        std::vector<fe> s(static_cast<std::size_t>(k - 1));
        for (int j = 0; j < k - 1; ++j) s[j] = x[ord.tx[j]];
        const fe u = tx_sessions[k - 2]->submit(0, s)[0];
        x[ord.tx[k - 1]] = F.sub(W[ord.rx[k - 1]], u);
    }
    return x;
}

fe ns_successive_decode(const SchemeOrder& ord, const Field& F, int k,
                        const ReceiverObservation& obs, RefereeSession* rx_session) {
    const fe inv_d = F.inv(obs.csir[ord.tx[k]]);
    const fe ytilde = F.mul(obs.y, inv_d);
    if (k == 0) return ytilde;
    std::vector<fe> t(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) t[j] = F.mul(obs.csir[ord.tx[j]], inv_d);
    const fe v = rx_session->submit(1, t)[0];
    return F.sub(ytilde, v);
}

SchemeRun ns_successive(const Pattern& M, const Field& F, const std::vector<fe>& W,
                        SeededRng& rng) {
    const SchemeOrder ord = scheme_order(M);
    const int K = static_cast<int>(ord.rx.size());
    check_messages(F, W, K);

    std::vector<OtpBox> boxes;
    boxes.reserve(static_cast<std::size_t>(K) - 1);
    std::vector<std::unique_ptr<RefereeSession>> sessions;
    for (int k = 2; k <= K; ++k) {
        boxes.emplace_back(F, k);
        sessions.push_back(boxes.back().open(rng.next()));
    }
    std::vector<RefereeSession*> handles;
    for (auto& s : sessions) handles.push_back(s.get());

    const std::vector<fe> x = ns_successive_encode(ord, F, W, handles);
    const ChannelDraw draw = draw_channel(M, F, rng);
    const auto obs = apply_channel(draw, F, x);

    SchemeRun run;
    run.K = K;
    run.messages.resize(static_cast<std::size_t>(K));
    run.decoded.resize(static_cast<std::size_t>(K));
    run.error.assign(static_cast<std::size_t>(K), false);
    run.rate_bits.assign(static_cast<std::size_t>(K), log2q(F));
    run.trace_x = x;
    run.trace_g = draw.G;
    for (const auto& o : obs) run.trace_y.push_back(o.y);
    for (int k = 0; k < K; ++k) {
        const int user = ord.rx[k];
        const fe w_hat = ns_successive_decode(ord, F, k, obs[user],
                                              k == 0 ? nullptr : handles[k - 1]);
        run.messages[user] = {W[user]};
        run.decoded[user] = {w_hat};
        run.error[user] = w_hat != W[user];
    }
    return run;
}

// --------------------------------------------------------------------------

std::vector<fe> ns_multipartite_encode(const SchemeOrder& ord, const Field& F,
                                       const std::vector<fe>& W, RefereeSession& tx_session) {
    const int K = static_cast<int>(ord.rx.size());
    std::vector<fe> s(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) s[k] = W[ord.rx[k]];
    const auto u = tx_session.submit(0, s);
    std::vector<fe> x(static_cast<std::size_t>(K), 0);
    for (int k = 0; k < K; ++k) x[ord.tx[k]] = u[k];
    (void)F;
    return x;
}

fe ns_multipartite_decode(const SchemeOrder& ord, const Field& F, int k,
                          const ReceiverObservation& obs, RefereeSession& session) {
    const fe inv_d = F.inv(obs.csir[ord.tx[k]]);
    const fe ytilde = F.mul(obs.y, inv_d);
    std::vector<fe> t(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) t[j] = F.mul(obs.csir[ord.tx[j]], inv_d);
    const fe v = session.submit(k + 1, t)[0];
    return F.sub(v, ytilde);
}

SchemeRun ns_multipartite(const Pattern& M, const Field& F, const std::vector<fe>& W,
                          SeededRng& rng) {
    const SchemeOrder ord = scheme_order(M);
    const int K = static_cast<int>(ord.rx.size());
    check_messages(F, W, K);

    TriangularBox box(F, K);
    auto session = box.open(rng.next());

    const std::vector<fe> x = ns_multipartite_encode(ord, F, W, *session);
    const ChannelDraw draw = draw_channel(M, F, rng);
    const auto obs = apply_channel(draw, F, x);

    SchemeRun run;
    run.K = K;
    run.messages.resize(static_cast<std::size_t>(K));
    run.decoded.resize(static_cast<std::size_t>(K));
    run.error.assign(static_cast<std::size_t>(K), false);
    run.rate_bits.assign(static_cast<std::size_t>(K), log2q(F));
    run.trace_x = x;
    run.trace_g = draw.G;
    for (const auto& o : obs) run.trace_y.push_back(o.y);
    for (int k = 0; k < K; ++k) {
        const int user = ord.rx[k];
        const fe w_hat = ns_multipartite_decode(ord, F, k, obs[user], *session);
        run.messages[user] = {W[user]};
        run.decoded[user] = {w_hat};
        run.error[user] = w_hat != W[user];
    }
    return run;
}

// --------------------------------------------------------------------------

std::vector<int> tdma_symbol_counts(const TreeNetwork& T, const DofTuple& d, int n) {
    std::vector<int> m(static_cast<std::size_t>(T.K));
    for (int k = 0; k < T.K; ++k)
        m[k] = static_cast<int>(std::floor(n * d.d[k] + 1e-9));
    return m;
}

SchemeRun classical_tdma(const TreeNetwork& T, const DofTuple& d, const Field& F, int n,
                         const std::vector<std::vector<fe>>& W, SeededRng& rng) {
    if (n < 1) throw std::invalid_argument("classical_tdma: need n >= 1 uses");
    if (!classical_region_contains(T, d))
        throw std::invalid_argument("classical_tdma: DoF tuple outside the classical region");
    const int K = T.K, B = T.B;
    const auto m = tdma_symbol_counts(T, d, n);
    if (static_cast<int>(W.size()) != K)
        throw std::invalid_argument("classical_tdma: expected one message block per user");
    for (int k = 0; k < K; ++k)
        if (static_cast<int>(W[k].size()) != m[k])
            throw std::invalid_argument("classical_tdma: user " + std::to_string(k + 1) +
                                        " must send " + std::to_string(m[k]) + " symbols");

    // integer burning schedule: an antenna's slot starts when its parent's
    // finishes; users split their antenna's slot in index order
    std::vector<int> antenna_used(static_cast<std::size_t>(B) + 1, 0);
    for (int b = 1; b <= B; ++b)
        for (const int k : T.receivers_of(b)) antenna_used[b] += m[k];
    std::vector<int> antenna_start(static_cast<std::size_t>(B) + 1, 0);
    for (const int b : T.dfs_order()) {
        const int p = T.parent[b];
        antenna_start[b] = p == 0 ? 0 : antenna_start[p] + antenna_used[p];
    }
    std::vector<int> user_start(static_cast<std::size_t>(K), 0);
    for (int b = 1; b <= B; ++b) {
        int t = antenna_start[b];
        for (const int k : T.receivers_of(b)) {
            user_start[k] = t;
            t += m[k];
        }
    }

    const Pattern M = T.to_pattern();
    SchemeRun run;
    run.K = K;
    run.messages = W;
    run.decoded.assign(static_cast<std::size_t>(K), {});
    run.error.assign(static_cast<std::size_t>(K), false);
    run.rate_bits.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        run.decoded[k].resize(static_cast<std::size_t>(m[k]));
        run.rate_bits[k] = m[k] * log2q(F) / n;
    }

    for (int tau = 0; tau < n; ++tau) {
        std::vector<fe> x(static_cast<std::size_t>(B), 0);
        for (int k = 0; k < K; ++k) {
            if (tau >= user_start[k] && tau < user_start[k] + m[k])
                x[T.rx_assoc[k] - 1] = W[k][tau - user_start[k]];
        }
        const ChannelDraw draw = draw_channel(M, F, rng);
        const auto obs = apply_channel(draw, F, x);
        for (int k = 0; k < K; ++k) {
            if (tau < user_start[k] || tau >= user_start[k] + m[k]) continue;
            const int b = T.rx_assoc[k] - 1;
            const fe w_hat = F.div(obs[k].y, obs[k].csir[b]);
            run.decoded[k][tau - user_start[k]] = w_hat;
            if (w_hat != W[k][tau - user_start[k]]) run.error[k] = true;
        }
    }
    return run;
}

// --------------------------------------------------------------------------

SchemeRun toy_ns_run(const ToyChannel& ch, fe w1, fe w2, SeededRng& rng) {
    const Field& F = *ch.field;
    OtpBox box(F, 2);
    auto session = box.open(rng.next());

    const fe x1 = w1;
    const fe u = session->submit(0, {x1})[0];
    const fe x2 = F.sub(w2, u);

    const auto out = ch.transmit(x1, x2, rng);

    const fe w1_hat = out.y1_x1; // Rx-1 reads X1 directly in both toys
    const fe v = session->submit(1, {out.g})[0];
    const fe w2_hat = F.sub(out.y2, v);

    SchemeRun run;
    run.K = 2;
    run.messages = {{w1}, {w2}};
    run.decoded = {{w1_hat}, {w2_hat}};
    run.error = {w1_hat != w1, w2_hat != w2};
    run.rate_bits = {log2q(F), log2q(F)};
    run.trace_x = {x1, x2};
    run.trace_y = {out.y1_x1, out.y2};
    run.trace_g = {1, 0, out.g, 1};
    return run;
}

Toy1CertificateF3 classical_toy1_f3() {
    static const Field F3 = Field::make(3, 1);
    const Field& F = F3;
    PmfBuilder b;
    b.uniform("W1", 3)
        .uniform("W2", 3)
        .uniform_nonzero("G", 3)
        .derived("U", 3, {"W2"}, [](const std::vector<int>& v) { return v[0]; })
        .derived("X1", 3, {"W1"}, [](const std::vector<int>& v) { return v[0]; })
        .derived("X2", 3, {"W2", "W1"},
                 [&](const std::vector<int>& v) {
                     return static_cast<int>(F.sub(static_cast<fe>(v[0]), static_cast<fe>(v[1])));
                 })
        .derived("Y1", 3, {"X1"}, [](const std::vector<int>& v) { return v[0]; })
        .derived("Y2", 3, {"G", "X1", "X2"}, [&](const std::vector<int>& v) {
            return static_cast<int>(F.add(F.mul(static_cast<fe>(v[0]), static_cast<fe>(v[1])),
                                          static_cast<fe>(v[2])));
        });
    JointPmf pmf = b.build();

    Toy1CertificateF3 cert{0, 0, 0, 0, pmf};
    cert.r1_bits = pmf.entropy_bits({"Y1"});
    cert.r2_bits = pmf.mutual_information_bits({"U"}, {"Y2", "G"});
    cert.h_y1_given_u = pmf.entropy_bits({"Y1"}, {"U"});
    cert.sum_bits = cert.h_y1_given_u + cert.r2_bits;
    return cert;
}

JointPmf fading_dirt_baseline_joint(const Field& F) {
    const int q = static_cast<int>(F.q());
    PmfBuilder b;
    b.uniform("X", q).uniform("Theta", q).uniform("G", q).derived(
        "Y", q, {"X", "G", "Theta"}, [&](const std::vector<int>& v) {
            return static_cast<int>(F.add(static_cast<fe>(v[0]),
                                          F.mul(static_cast<fe>(v[1]), static_cast<fe>(v[2]))));
        });
    return b.build();
}

FadingDirtRun fading_dirt_ns(const Field& F, fe w, fe theta, fe g, SeededRng& rng) {
    FadingDirtBox box(F);
    auto session = box.open(rng.next());

    // encoder side: sees (w, theta) only
    const fe u = session->submit(0, {theta})[0];
    const fe x = F.add(w, u);

    // channel
    const fe y = F.add(x, F.mul(g, theta));

    // decoder side: sees (y, g) only
    const fe v = session->submit(1, {g})[0];
    const fe w_hat = F.sub(y, v);

    return {w_hat, w_hat != w, log2q(F), x, y};
}

// --------------------------------------------------------------------------

namespace {

fe sample_from_law(const std::vector<Rat>& law, SeededRng& rng) {
    long long lcm = 1;
    for (const auto& p : law)
        if (p != Rat(0)) lcm = std::lcm(lcm, p.denominator());
    std::uint64_t total = 0;
    std::vector<std::uint64_t> ticket(law.size(), 0);
    for (std::size_t i = 0; i < law.size(); ++i) {
        if (law[i] != Rat(0))
            ticket[i] =
                static_cast<std::uint64_t>(law[i].numerator() * (lcm / law[i].denominator()));
        total += ticket[i];
    }
    std::uint64_t draw = rng.uniform_below(total);
    for (std::size_t i = 0; i < ticket.size(); ++i) {
        if (draw < ticket[i]) return static_cast<fe>(i);
        draw -= ticket[i];
    }
    return 0;
}

void check_noise_law(const Field& F, const std::vector<Rat>& law) {
    if (law.size() != F.q())
        throw std::invalid_argument("mac: noise law must cover the field alphabet");
    Rat t(0);
    for (const auto& p : law) t += p;
    if (t != Rat(1)) throw std::invalid_argument("mac: noise law must sum to 1");
}

} // namespace

SchemeRun mac_convert(const Field& F, int K, MacBox::InterferenceFn f,
                      const std::function<SchemeRun(const Field&, int, ConvertedMacUse&)>& inner,
                      const std::vector<Rat>& noise_law, SeededRng& rng) {
    check_noise_law(F, noise_law);
    MacBox box(F, K, std::move(f));

    ConvertedMacUse use = [&](const std::vector<fe>& xbar) -> fe {
        if (static_cast<int>(xbar.size()) != K)
            throw std::invalid_argument("mac_convert: xbar dimension mismatch");
        auto session = box.open(rng.next());
        // fresh state per use: theta_0 at the receiver, theta_k at tx-k
        std::vector<fe> theta(static_cast<std::size_t>(K) + 1);
        for (auto& t : theta) t = F.uniform(rng);

        std::vector<fe> x(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            const fe u = session->submit(k, {theta[k + 1]})[0];
            x[k] = F.add(u, xbar[k]);
        }
        fe y = sample_from_law(noise_law, rng);
        for (int k = 0; k < K; ++k) y = F.add(y, x[k]);
        std::vector<fe> svals(theta.begin() + 1, theta.end());
        y = F.add(y, box.interference(theta[0], svals));

        const fe v = session->submit(K, {theta[0]})[0];
        return F.sub(y, v);
    };
    return inner(F, K, use);
}

std::function<SchemeRun(const Field&, int, ConvertedMacUse&)>
slotted_mac_inner(const std::vector<fe>& W) {
    return [W](const Field& F, int K, ConvertedMacUse& use) {
        SchemeRun run;
        run.K = K;
        run.messages.resize(static_cast<std::size_t>(K));
        run.decoded.resize(static_cast<std::size_t>(K));
        run.error.assign(static_cast<std::size_t>(K), false);
        run.rate_bits.assign(static_cast<std::size_t>(K),
                             std::log2(static_cast<double>(F.q())) / K);
        for (int slot = 0; slot < K; ++slot) {
            std::vector<fe> xbar(static_cast<std::size_t>(K), 0);
            xbar[slot] = W[slot];
            const fe ybar = use(xbar);
            run.messages[slot] = {W[slot]};
            run.decoded[slot] = {ybar};
            run.error[slot] = ybar != W[slot];
        }
        return run;
    };
}

Rat mac_conversion_tv(const Field& F, int K, MacBox::InterferenceFn f,
                      const std::vector<Rat>& noise_law) {
    check_noise_law(F, noise_law);
    MacBox box(F, K, std::move(f));
    const int q = static_cast<int>(F.q());

    std::uint64_t states = 1; // theta_0 .. theta_K
    for (int i = 0; i <= K; ++i) states *= static_cast<std::uint64_t>(q);
    std::uint64_t latents = 1; // u_1 .. u_K
    for (int i = 0; i < K; ++i) latents *= static_cast<std::uint64_t>(q);
    std::uint64_t inputs = 1; // xbar
    for (int i = 0; i < K; ++i) inputs *= static_cast<std::uint64_t>(q);

    const Rat state_w(1, static_cast<long long>(states));
    const Rat latent_w(1, static_cast<long long>(latents));

    Rat worst(0);
    for (std::uint64_t xi = 0; xi < inputs; ++xi) {
        std::vector<fe> xbar(static_cast<std::size_t>(K));
        std::uint64_t t = xi;
        for (int k = 0; k < K; ++k) {
            xbar[k] = static_cast<fe>(t % q);
            t /= q;
        }

        // interference-free law: P(ybar) = P(Z = ybar - sum xbar)
        fe sum_x = 0;
        for (const fe v : xbar) sum_x = F.add(sum_x, v);
        std::vector<Rat> free_law(static_cast<std::size_t>(q), Rat(0));
        for (int z = 0; z < q; ++z)
            free_law[F.add(sum_x, static_cast<fe>(z))] += noise_law[z];

        // converted law, marginalized over states, latent and noise
        std::vector<Rat> conv_law(static_cast<std::size_t>(q), Rat(0));
        for (std::uint64_t si = 0; si < states; ++si) {
            std::vector<fe> theta(static_cast<std::size_t>(K) + 1);
            std::uint64_t ts = si;
            for (int i = 0; i <= K; ++i) {
                theta[i] = static_cast<fe>(ts % q);
                ts /= q;
            }
            std::vector<fe> svals(theta.begin() + 1, theta.end());
            const fe intf = box.interference(theta[0], svals);
            for (std::uint64_t li = 0; li < latents; ++li) {
                std::vector<fe> u(static_cast<std::size_t>(K));
                std::uint64_t tl = li;
                fe sum_u = 0;
                for (int k = 0; k < K; ++k) {
                    u[k] = static_cast<fe>(tl % q);
                    tl /= q;
                    sum_u = F.add(sum_u, u[k]);
                }
                const fe v = F.add(sum_u, intf);
                for (int z = 0; z < q; ++z) {
                    if (noise_law[z] == Rat(0)) continue;
                    // y = sum(u + xbar) + intf + z ; ybar = y - v
                    fe y = static_cast<fe>(z);
                    for (int k = 0; k < K; ++k) y = F.add(y, F.add(u[k], xbar[k]));
                    y = F.add(y, intf);
                    conv_law[F.sub(y, v)] += state_w * latent_w * noise_law[z];
                }
            }
        }

        Rat tv(0);
        for (int y = 0; y < q; ++y) {
            const Rat diff = conv_law[y] - free_law[y];
            tv += diff < Rat(0) ? -diff : diff;
        }
        tv /= 2;
        worst = std::max(worst, tv);
    }
    return worst;
}

// --------------------------------------------------------------------------

namespace {

// wraparound representative of y - x in (-Q/2, Q/2]
double wrap_delta(double y, double x, int Q) {
    double d = std::fmod(y - x, static_cast<double>(Q));
    if (d < 0) d += Q;
    if (d > Q / 2.0) d -= Q;
    return d;
}

int nearest_integer_mod(double y, int Q) {
    const double base = std::floor(y);
    // ties (fraction exactly .5) broken downward
    const int r = (y - base > 0.5) ? static_cast<int>(base) + 1 : static_cast<int>(base);
    return ((r % Q) + Q) % Q;
}

} // namespace

GaussianRun gaussian_convert(const Pattern& M, double P, int n,
                             const std::vector<std::vector<int>>& W, SeededRng& rng,
                             const GaussianConvertOptions& opts) {
    if (M.K() != M.B())
        throw std::invalid_argument("gaussian_convert: pattern must be square");
    const int K = M.K();
    for (int k = 0; k < K; ++k) {
        if (!M.star(k, k))
            throw std::invalid_argument("gaussian_convert: pattern needs stars on the diagonal");
        for (int j = k + 1; j < K; ++j)
            if (M.star(k, j))
                throw std::invalid_argument(
                    "gaussian_convert: pattern must be lower triangular");
    }
    GaussianModBox probe(P, 2);
    const int Q = probe.modulus();
    if (static_cast<int>(W.size()) != K)
        throw std::invalid_argument("gaussian_convert: expected K message streams");
    for (const auto& row : W) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("gaussian_convert: each stream needs n symbols");
        for (const int v : row)
            if (v < 0 || v >= Q)
                throw std::invalid_argument("gaussian_convert: message symbol out of range [0," +
                                            std::to_string(Q) + ")");
    }

    std::vector<GaussianModBox> boxes;
    for (int k = 2; k <= K; ++k) boxes.emplace_back(P, k);

    GaussianRun run;
    run.modulus = Q;
    run.decoded.assign(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(n)));
    run.per_user_rate_bits = std::log2(static_cast<double>(Q));
    run.dof_ratio = run.per_user_rate_bits / (0.5 * std::log2(P));
    auto& diag = run.diag;
    diag.zbar_mean.assign(static_cast<std::size_t>(K), 0.0);
    diag.zbar_var.assign(static_cast<std::size_t>(K), 0.0);
    diag.symbol_errors.assign(static_cast<std::size_t>(K), 0);
    if (opts.keep_converted) diag.converted.assign(static_cast<std::size_t>(K), {});

    std::vector<double> sum_z(static_cast<std::size_t>(K), 0.0);
    std::vector<double> sum_z2(static_cast<std::size_t>(K), 0.0);
    PowerTracker power(P);

    for (int tau = 0; tau < n; ++tau) {
        GaussianDraw draw = draw_gaussian_normalized(M, opts.coeff_bound, rng);
        if (opts.inject_zero_noise) std::fill(draw.z.begin(), draw.z.end(), 0.0);

        std::vector<GaussianModBox::Session> sessions;
        sessions.reserve(static_cast<std::size_t>(K) - 1);
        for (int k = 2; k <= K; ++k) sessions.push_back(boxes[k - 2].open(rng.next()));

        std::vector<double> x(static_cast<std::size_t>(K));
        x[0] = static_cast<double>(W[0][tau]);
        for (int k = 2; k <= K; ++k) {
            const std::vector<double> s(x.begin(), x.begin() + (k - 1));
            const int u = sessions[k - 2].submit_tx(s);
            const int masked = ((W[k - 1][tau] - u) % Q + Q) % Q;
            x[k - 1] = static_cast<double>(masked);
        }

        const std::vector<double> y = gaussian_apply(draw, x, power);

        for (int k = 1; k <= K; ++k) {
            double ybar;
            if (k == 1) {
                ybar = std::fmod(y[0], static_cast<double>(Q));
                if (ybar < 0) ybar += Q;
            } else {
                std::vector<double> t(static_cast<std::size_t>(k - 1));
                for (int j = 0; j < k - 1; ++j) t[j] = draw.at(k - 1, j);
                const int v = sessions[k - 2].submit_rx(t);
                ybar = std::fmod(y[k - 1] - v, static_cast<double>(Q));
                if (ybar < 0) ybar += Q;
            }
            const double z = wrap_delta(ybar, static_cast<double>(W[k - 1][tau]), Q);
            sum_z[k - 1] += z;
            sum_z2[k - 1] += z * z;
            const int decoded = nearest_integer_mod(ybar, Q);
            run.decoded[k - 1][tau] = decoded;
            if (decoded != W[k - 1][tau]) ++diag.symbol_errors[k - 1];
            if (opts.keep_converted) diag.converted[k - 1].push_back(ybar);
        }
    }

    power.check();
    diag.average_total_power = power.average();
    diag.uses = power.uses();
    for (int k = 0; k < K; ++k) {
        const double mean = sum_z[k] / n;
        diag.zbar_mean[k] = mean;
        diag.zbar_var[k] = sum_z2[k] / n - mean * mean;
    }
    return run;
}

} // namespace nsbc

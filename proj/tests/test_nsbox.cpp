#include <doctest.h>

#include <array>
#include <cmath>
#include <map>

#include "nsbc/json_io.hpp"
#include "nsbc/nsbox.hpp"

using namespace nsbc;

namespace {

// chi-square-style 3 sigma band for a count with success probability p
bool within3sigma(std::uint64_t count, std::uint64_t n, double p) {
    const double mean = static_cast<double>(n) * p;
    const double sigma = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    return std::abs(static_cast<double>(count) - mean) <= 3.0 * sigma + 1e-9;
}

} // namespace

TEST_SUITE("nsbox") {

TEST_CASE("tabular box validation") {
    // a valid coin: one party, trivial input, uniform bit output
    CHECK_NOTHROW(TabularBox({1}, {2}, {Rat(1, 2), Rat(1, 2)}));
    // slice does not sum to 1
    CHECK_THROWS_AS(TabularBox({1}, {2}, {Rat(1, 2), Rat(1, 3)}), std::invalid_argument);
    // negative entry
    CHECK_THROWS_AS(TabularBox({1}, {2}, {Rat(3, 2), Rat(-1, 2)}), std::invalid_argument);
}

TEST_CASE("OTP box tabularization equals the hand-built table") {
    const Field F = Field::make(3, 1);
    const OtpBox box(F, 2);
    const TabularBox tab = box.tabularize();
    REQUIRE(tab.input_count() == 9);
    REQUIRE(tab.output_count() == 9);
    for (int s = 0; s < 3; ++s)
        for (int t = 0; t < 3; ++t)
            for (int u = 0; u < 3; ++u)
                for (int v = 0; v < 3; ++v) {
                    const Rat expect = F.add(static_cast<fe>(u), static_cast<fe>(v)) ==
                                               F.mul(static_cast<fe>(s), static_cast<fe>(t))
                                           ? Rat(1, 3)
                                           : Rat(0);
                    CHECK(tab.prob({s, t}, {u, v}) == expect);
                }
}

TEST_CASE("non-signaling verifier accepts the box family") {
    // every structured box, tabularized exactly, at small fields
    for (const std::uint32_t q : {2u, 3u, 4u}) {
        const Field F = Field::from_order(q);
        CAPTURE(q);
        CHECK(verify_nonsignaling(OtpBox(F, 2).tabularize()).ok);
        CHECK(verify_nonsignaling(OtpBox(F, 3).tabularize()).ok);
        CHECK(verify_nonsignaling(FadingDirtBox(F).tabularize()).ok);
        CHECK(verify_nonsignaling(TriangularBox(F, 2).tabularize()).ok);
        const auto product = [&F](fe t, const std::vector<fe>& s) {
            fe out = t;
            for (const fe v : s) out = F.mul(out, v);
            return out;
        };
        CHECK(verify_nonsignaling(MacBox(F, 2, product).tabularize()).ok);
    }
    CHECK(verify_nonsignaling(TriangularBox(Field::make(3, 1), 3).tabularize()).ok);
}

TEST_CASE("the leak box fails with the signaling receiver as witness") {
    const Field F = Field::make(3, 1);
    const auto result = verify_nonsignaling(make_leak_box(F));
    CHECK_FALSE(result.ok);
    CHECK(result.subset == std::vector<int>{2});
    CHECK(result.inputs_a[0] != result.inputs_b[0]);
    CHECK(result.describe().find("subset {2}") != std::string::npos);
}

TEST_CASE("box JSON round trip") {
    const Field F = Field::make(3, 1);
    const TabularBox tab = OtpBox(F, 2).tabularize();
    const TabularBox back = tabular_box_from_json(tabular_box_to_json(tab));
    CHECK(back.input_sizes() == tab.input_sizes());
    for (std::size_t a = 0; a < tab.input_count(); ++a)
        for (std::size_t b = 0; b < tab.output_count(); ++b)
            CHECK(back.prob(a, b) == tab.prob(a, b));
}

TEST_CASE("OTP box forced values") {
    const Field F = Field::make(3, 1);
    const OtpBox box(F, 2);
    // s=2, t=2: s.t = 4 = 1; u=1 forces v=0
    const auto outs = box.outputs_from_latent({{2}, {2}}, {1});
    CHECK(outs[0][0] == 1);
    CHECK(outs[1][0] == 0);
}

TEST_CASE("triangular box forced values") {
    const Field F = Field::make(3, 1);
    const TriangularBox box(F, 2);
    // s=(1,2), t_21=2, u=(1,0): v = (1+1, 2+2*1+0) = (2,1)
    const auto outs = box.outputs_from_latent({{1, 2}, {}, {2}}, {1, 0});
    CHECK(outs[0] == std::vector<fe>{1, 0});
    CHECK(outs[1] == std::vector<fe>{2});
    CHECK(outs[2] == std::vector<fe>{1});
}

TEST_CASE("fading-dirt box forced values") {
    const Field F = Field::make(5, 1);
    const FadingDirtBox box(F);
    // S=2, T=4, U=1: V = 1 + 8 = 9 = 4 mod 5
    const auto outs = box.outputs_from_latent({{2}, {4}}, {1});
    CHECK(outs[1][0] == 4);
}

TEST_CASE("MAC box forced values and codomain validation") {
    const Field F = Field::make(3, 1);
    const auto product = [&F](fe t, const std::vector<fe>& s) {
        fe out = t;
        for (const fe v : s) out = F.mul(out, v);
        return out;
    };
    const MacBox box(F, 2, product);
    // S=(1,2), T=0, U=(1,1): V = 1+1+f(0,1,2) = 2
    const auto outs = box.outputs_from_latent({{1}, {2}, {0}}, {1, 1});
    CHECK(outs[2][0] == 2);

    const MacBox bad(F, 2, [](fe, const std::vector<fe>&) { return static_cast<fe>(7); });
    CHECK_THROWS_AS(bad.outputs_from_latent({{0}, {0}, {0}}, {0, 0}), std::domain_error);
}

TEST_CASE("referee sessions enforce the protocol") {
    const Field F = Field::make(3, 1);
    const OtpBox box(F, 2);
    auto s = box.open(1);
    s->submit(0, {1});
    CHECK_THROWS_AS(s->submit(0, {1}), std::logic_error);      // double submission
    CHECK_THROWS_AS(s->submit(1, {1, 2}), std::invalid_argument); // wrong arity
    CHECK_THROWS_AS(s->submit(5, {1}), std::invalid_argument);
}

TEST_CASE("referee transcripts are deterministic under a fixed seed") {
    const Field F = Field::make(5, 1);
    const TriangularBox box(F, 3);
    for (int rep = 0; rep < 5; ++rep) {
        auto a = box.open(123), b = box.open(123);
        const auto ua = a->submit(0, {1, 2, 3});
        const auto ub = b->submit(0, {1, 2, 3});
        CHECK(ua == ub);
        CHECK(a->submit(2, {4}) == b->submit(2, {4}));
    }
}

TEST_CASE("defining relations hold with probability one in every session") {
    const Field F = Field::make(5, 1);
    SeededRng seeds(7);

    SUBCASE("otp: u + v = s.t under both orders") {
        const OtpBox box(F, 3);
        for (int it = 0; it < 2000; ++it) {
            const std::vector<fe> s = {F.uniform(seeds), F.uniform(seeds)};
            const std::vector<fe> t = {F.uniform(seeds), F.uniform(seeds)};
            auto sess = box.open(seeds.next());
            fe u, v;
            if (it % 2 == 0) {
                u = sess->submit(0, s)[0];
                v = sess->submit(1, t)[0];
            } else {
                v = sess->submit(1, t)[0];
                u = sess->submit(0, s)[0];
            }
            CHECK(F.add(u, v) == box.inner_product(s, t));
        }
    }

    SUBCASE("triangular: v = s + L(t) u under random orders") {
        const TriangularBox box(F, 3);
        for (int it = 0; it < 2000; ++it) {
            const std::vector<fe> s = {F.uniform(seeds), F.uniform(seeds), F.uniform(seeds)};
            const std::vector<std::vector<fe>> t = {{}, {F.uniform(seeds)},
                                                    {F.uniform(seeds), F.uniform(seeds)}};
            auto sess = box.open(seeds.next());
            std::array<int, 4> order{0, 1, 2, 3};
            for (int i = 3; i > 0; --i)
                std::swap(order[i], order[seeds.uniform_below(static_cast<std::uint64_t>(i + 1))]);
            std::vector<fe> u;
            std::array<fe, 4> v{};
            for (const int party : order) {
                if (party == 0)
                    u = sess->submit(0, s);
                else
                    v[party] = sess->submit(party, t[party - 1])[0];
            }
            // check v_k = s_k + sum_{j<k} t_kj u_j + u_k
            for (int k = 1; k <= 3; ++k) {
                fe expect = s[k - 1];
                for (int j = 0; j < k - 1; ++j)
                    expect = F.add(expect, F.mul(t[k - 1][j], u[j]));
                expect = F.add(expect, u[k - 1]);
                CHECK(v[k] == expect);
            }
        }
    }

    SUBCASE("mac: v = sum u + f under random orders") {
        const auto f = [&F](fe t, const std::vector<fe>& s) {
            fe out = t;
            for (const fe x : s) out = F.add(out, F.mul(x, x));
            return out;
        };
        const MacBox box(F, 3, f);
        for (int it = 0; it < 2000; ++it) {
            const std::vector<fe> s = {F.uniform(seeds), F.uniform(seeds), F.uniform(seeds)};
            const fe t = F.uniform(seeds);
            auto sess = box.open(seeds.next());
            std::array<int, 4> order{0, 1, 2, 3};
            for (int i = 3; i > 0; --i)
                std::swap(order[i], order[seeds.uniform_below(static_cast<std::uint64_t>(i + 1))]);
            std::array<fe, 4> out{};
            for (const int party : order)
                out[party] = sess->submit(party, party == 3 ? std::vector<fe>{t}
                                                            : std::vector<fe>{s[party]})[0];
            fe expect = f(t, s);
            for (int k = 0; k < 3; ++k) expect = F.add(expect, out[k]);
            CHECK(out[3] == expect);
        }
    }
}

TEST_CASE("referee order independence: empirical joint matches the pmf") {
    const Field F = Field::make(3, 1);
    const std::uint64_t n = 20000;

    SUBCASE("otp box, rx first") {
        const OtpBox box(F, 2);
        const std::vector<fe> s = {2}, t = {1};
        std::map<std::pair<fe, fe>, std::uint64_t> count;
        SeededRng seeds(99);
        for (std::uint64_t i = 0; i < n; ++i) {
            auto sess = box.open(seeds.next());
            const fe v = sess->submit(1, t)[0];
            const fe u = sess->submit(0, s)[0];
            ++count[{u, v}];
        }
        // valid pairs (u, s.t - u) each carry probability 1/3
        CHECK(count.size() == 3);
        for (const auto& [uv, c] : count) {
            CHECK(F.add(uv.first, uv.second) == F.mul(2, 1));
            CHECK(within3sigma(c, n, 1.0 / 3.0));
        }
    }

    SUBCASE("triangular box K=2, receivers before the transmitter") {
        const TriangularBox box(F, 2);
        const std::vector<fe> s = {1, 2};
        const std::vector<fe> t2 = {2};
        std::map<std::array<fe, 4>, std::uint64_t> count;
        SeededRng seeds(1234);
        for (std::uint64_t i = 0; i < n; ++i) {
            auto sess = box.open(seeds.next());
            const fe v1 = sess->submit(1, {})[0];
            const fe v2 = sess->submit(2, t2)[0];
            const auto u = sess->submit(0, s);
            ++count[{u[0], u[1], v1, v2}];
        }
        // u uniform on F_3^2 determines (v1, v2): 9 atoms of probability 1/9
        CHECK(count.size() == 9);
        for (const auto& [key, c] : count) {
            CHECK(key[2] == F.add(static_cast<fe>(1), key[0]));
            CHECK(key[3] == F.add(static_cast<fe>(2),
                                  F.add(F.mul(2, key[0]), key[1])));
            CHECK(within3sigma(c, n, 1.0 / 9.0));
        }
    }

    SUBCASE("tx first: u is uniform regardless of the later t") {
        const OtpBox box(F, 2);
        std::array<std::uint64_t, 3> count{};
        SeededRng seeds(555);
        for (std::uint64_t i = 0; i < n; ++i) {
            auto sess = box.open(seeds.next());
            ++count[sess->submit(0, {1})[0]];
        }
        for (const auto c : count) CHECK(within3sigma(c, n, 1.0 / 3.0));
    }
}

TEST_CASE("gaussian mod box") {
    const GaussianModBox box(100.0, 2);
    CHECK(box.modulus() == 10);

    SUBCASE("relation u + v = floor(s.t) mod Q") {
        // s.t = 12.7 -> floor 12 -> 2 mod 10; u = 3 forces v = 9
        auto sess = box.open(77);
        SeededRng probe(77);
        (void)probe;
        const int u = sess.submit_tx({12.7});
        const int v = sess.submit_rx({1.0});
        CHECK((u + v) % 10 == 2);
    }
    SUBCASE("outputs uniform over {0..Q-1}") {
        std::array<std::uint64_t, 10> count{};
        SeededRng seeds(31);
        const std::uint64_t n = 50000;
        for (std::uint64_t i = 0; i < n; ++i) {
            auto sess = box.open(seeds.next());
            ++count[sess.submit_rx({-3.4})];
        }
        for (const auto c : count) CHECK(within3sigma(c, n, 0.1));
    }
    SUBCASE("negative inner products use the floored modulus") {
        auto sess = box.open(5);
        const int u = sess.submit_tx({-2.5});
        const int v = sess.submit_rx({1.0});
        // floor(-2.5) = -3 -> 7 mod 10
        CHECK((u + v) % 10 == 7);
    }
}

TEST_CASE("tabular session: chain-rule sampling matches the pmf") {
    const Field F = Field::make(3, 1);
    const TabularBox tab = OtpBox(F, 2).tabularize();
    std::map<std::pair<int, int>, std::uint64_t> count;
    SeededRng seeds(246);
    const std::uint64_t n = 20000;
    for (std::uint64_t i = 0; i < n; ++i) {
        TabularSession sess(tab, seeds.next());
        const int v = sess.submit(1, 2); // t = 2 first
        const int u = sess.submit(0, 2); // s = 2
        ++count[{u, v}];
    }
    CHECK(count.size() == 3);
    for (const auto& [uv, c] : count) {
        CHECK(F.add(static_cast<fe>(uv.first), static_cast<fe>(uv.second)) == F.mul(2, 2));
        CHECK(within3sigma(c, n, 1.0 / 3.0));
    }

    SUBCASE("refuses a signaling box") {
        CHECK_THROWS_AS(TabularSession(make_leak_box(F), 1), std::invalid_argument);
    }
}

TEST_CASE("affine solution sampling is uniform over the solution set") {
    const Field F = Field::make(3, 1);
    SeededRng rng(909);
    std::map<std::pair<fe, fe>, int> count;
    for (int i = 0; i < 9000; ++i) {
        const auto x = sample_affine_solution({{1, 0}}, {2}, 2, F, rng);
        CHECK(x[0] == 2);
        ++count[{x[0], x[1]}];
    }
    CHECK(count.size() == 3);
    for (const auto& [k, c] : count) CHECK(within3sigma(c, 9000, 1.0 / 3.0));
    CHECK_THROWS_AS(sample_affine_solution({{1, 0}, {1, 0}}, {1, 2}, 2, F, rng),
                    std::logic_error);
}

TEST_CASE("oversized tabularization is rejected") {
    const Field F16 = Field::make(2, 4);
    CHECK_THROWS_AS(TriangularBox(F16, 4).tabularize(), std::invalid_argument);
}

} // TEST_SUITE

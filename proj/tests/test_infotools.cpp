#include <doctest.h>

#include <cmath>

#include "nsbc/field.hpp"
#include "nsbc/infotools.hpp"
#include "nsbc/rng.hpp"

using namespace nsbc;

TEST_SUITE("infotools") {

TEST_CASE("entropy of simple laws") {
    JointPmf uniform8({{"X", 8}});
    for (int x = 0; x < 8; ++x) uniform8.add({x}, Rat(1, 8));
    CHECK(uniform8.total() == Rat(1));
    CHECK(uniform8.entropy_bits({"X"}) == doctest::Approx(3.0).epsilon(1e-12));

    JointPmf point({{"X", 4}});
    point.add({2}, Rat(1));
    CHECK(point.entropy_bits({"X"}) == doctest::Approx(0.0));
}

TEST_CASE("input validation") {
    JointPmf p({{"X", 2}, {"Y", 2}});
    p.add({0, 0}, Rat(1, 2));
    p.add({1, 1}, Rat(1, 2));
    CHECK_THROWS_AS(p.entropy_bits({"Z"}), std::invalid_argument);
    CHECK_THROWS_AS(p.entropy_bits({"X"}, {"X"}), std::invalid_argument);
    CHECK_THROWS_AS(p.add({0, 5}, Rat(1)), std::invalid_argument);
    CHECK_THROWS_AS(JointPmf({{"X", 2000}, {"Y", 2000}, {"Z", 3000}}),
                    std::invalid_argument); // exceeds enumeration budget
}

TEST_CASE("independent variables carry zero information") {
    PmfBuilder b;
    b.uniform("A", 4).uniform("B", 6);
    const JointPmf p = b.build();
    CHECK(p.mutual_information_bits({"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.entropy_bits({"A"}, {"B"}) == doctest::Approx(2.0));
}

TEST_CASE("identities on random small pmfs") {
    SeededRng rng(8080);
    for (int it = 0; it < 25; ++it) {
        // random joint over 3 x 3 x 2 with rational weights
        JointPmf p({{"A", 3}, {"B", 3}, {"C", 2}});
        const int denom = 64;
        std::vector<int> w(18, 0);
        int left = denom;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            w[i] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(left + 1)));
            left -= w[i];
        }
        w.back() = left;
        int idx = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 2; ++c) p.add({a, b, c}, Rat(w[idx++], denom));

        const double ha = p.entropy_bits({"A"});
        const double hb = p.entropy_bits({"B"});
        const double hab = p.entropy_bits({"A", "B"});
        const double mi = p.mutual_information_bits({"A"}, {"B"});
        CHECK(mi == doctest::Approx(ha + hb - hab).epsilon(1e-12));
        CHECK(mi >= -1e-12);
        // chain rule: H(A,B) = H(A) + H(B|A)
        CHECK(hab == doctest::Approx(ha + p.entropy_bits({"B"}, {"A"})).epsilon(1e-12));
        // conditional MI nonnegative
        CHECK(p.mutual_information_bits({"A"}, {"B"}, {"C"}) >= -1e-12);
    }
}

TEST_CASE("data processing on deterministic post-processing") {
    const Field F = Field::make(5, 1);
    SeededRng rng(17);
    for (int it = 0; it < 10; ++it) {
        // B = A + N, f(B) = B^2: I(A; f(B)) <= I(A; B)
        PmfBuilder b;
        b.uniform("A", 5).uniform_nonzero("N", 5);
        b.derived("B", 5, {"A", "N"}, [&](const std::vector<int>& v) {
            return static_cast<int>(F.add(static_cast<fe>(v[0]), static_cast<fe>(v[1])));
        });
        const int shift = static_cast<int>(rng.uniform_below(5));
        b.derived("FB", 5, {"B"}, [&, shift](const std::vector<int>& v) {
            return static_cast<int>(
                F.mul(static_cast<fe>(v[0]),
                      F.add(static_cast<fe>(v[0]), static_cast<fe>(shift))));
        });
        const JointPmf p = b.build();
        CHECK(p.mutual_information_bits({"A"}, {"FB"}) <=
              p.mutual_information_bits({"A"}, {"B"}) + 1e-12);
    }
}

TEST_CASE("builder enumerates exact channel joints") {
    const Field F = Field::make(3, 1);

    SUBCASE("toy1 under uniform inputs has 18 atoms summing to one") {
        PmfBuilder b;
        b.uniform("W1", 3).uniform("W2", 3).uniform_nonzero("G", 3);
        b.derived("Y2", 3, {"G", "W1", "W2"}, [&](const std::vector<int>& v) {
            return static_cast<int>(F.add(F.mul(static_cast<fe>(v[0]), static_cast<fe>(v[1])),
                                          static_cast<fe>(v[2])));
        });
        const JointPmf p = b.build();
        CHECK(p.atom_count() == 18);
        CHECK(p.total() == Rat(1));
    }

    SUBCASE("toy2: the strong receiver's output is determined by the inputs") {
        PmfBuilder b;
        b.uniform("X1", 3).uniform("X2", 3).uniform_nonzero("G", 3);
        b.derived("Y1a", 3, {"X1"}, [](const std::vector<int>& v) { return v[0]; });
        b.derived("Y1b", 3, {"X2"}, [](const std::vector<int>& v) { return v[0]; });
        const JointPmf p = b.build();
        CHECK(p.entropy_bits({"Y1a", "Y1b"}, {"X1", "X2"}) == doctest::Approx(0.0));
    }

    SUBCASE("degenerate GF(2) toy1 supports interference-free decoding") {
        const Field F2 = Field::make(2, 1);
        PmfBuilder b;
        b.uniform("W1", 2).uniform("W2", 2);
        b.derived("X1", 2, {"W1"}, [](const std::vector<int>& v) { return v[0]; });
        b.derived("X2", 2, {"W2", "W1"}, [&](const std::vector<int>& v) {
            return static_cast<int>(F2.sub(static_cast<fe>(v[0]), static_cast<fe>(v[1])));
        });
        // G = 1 is constant, Y2 = X1 + X2 = W2
        b.derived("Y2", 2, {"X1", "X2"}, [&](const std::vector<int>& v) {
            return static_cast<int>(F2.add(static_cast<fe>(v[0]), static_cast<fe>(v[1])));
        });
        const JointPmf p = b.build();
        CHECK(p.mutual_information_bits({"W2"}, {"Y2"}) == doctest::Approx(1.0));
    }
}

TEST_CASE("builder rejects bad inputs") {
    PmfBuilder b;
    CHECK_THROWS_AS(b.source("X", {Rat(1, 2), Rat(1, 3)}), std::invalid_argument);
    PmfBuilder c;
    c.uniform("X", 2);
    c.derived("Y", 2, {"Missing"}, [](const std::vector<int>&) { return 0; });
    CHECK_THROWS_AS(c.build(), std::invalid_argument);
}

} // TEST_SUITE

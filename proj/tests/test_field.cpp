#include <doctest.h>

#include <array>
#include <set>
#include <vector>

#include "nsbc/field.hpp"

using namespace nsbc;

namespace {

// Independent oracle: schoolbook polynomial multiplication modulo the
// reduction polynomial, on base-p digit vectors.
fe oracle_mul(const Field& F, fe a, fe b) {
    const int p = F.p(), m = F.m();
    auto digits = [&](fe v) {
        std::vector<int> d(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i) {
            d[i] = v % p;
            v = static_cast<fe>(v / p);
        }
        return d;
    };
    const auto da = digits(a), db = digits(b);
    std::vector<int> prod(static_cast<std::size_t>(2 * m), 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
    const auto& red = F.reduction_poly(); // c0..c_{m-1}, 1
    for (int d = 2 * m - 1; d >= m; --d) {
        const int c = prod[d];
        if (c == 0) continue;
        prod[d] = 0;
        for (int i = 0; i < m; ++i) {
            prod[d - m + i] = ((prod[d - m + i] - c * red[i]) % p + p) % p;
        }
    }
    fe out = 0;
    for (int i = m - 1; i >= 0; --i) out = static_cast<fe>(out * p + prod[i]);
    return out;
}

} // namespace

TEST_SUITE("field") {

TEST_CASE("prime field GF(3) basics") {
    const Field F = Field::make(3, 1);
    CHECK(F.q() == 3);
    CHECK(F.add(2, 2) == 1);
    CHECK(F.inv(2) == 2); // 2*2 = 4 = 1
    CHECK(F.mul(2, 2) == 1);
    CHECK(F.sub(0, 1) == 2);
    CHECK(F.name() == "GF(3)");
}

TEST_CASE("GF(4) uses x^2+x+1 and reduces x*x to x+1") {
    const Field F = Field::make(2, 2);
    CHECK(F.reduction_poly() == std::vector<int>{1, 1, 1});
    // value 2 encodes x, value 3 encodes x+1
    CHECK(F.mul(2, 2) == 3);
}

TEST_CASE("multiplication matches the polynomial oracle") {
    for (const auto [p, m] : std::array<std::pair<int, int>, 4>{{{2, 2}, {2, 3}, {3, 2}, {5, 2}}}) {
        const Field F = Field::make(p, m);
        for (fe a = 0; a < F.q(); ++a)
            for (fe b = 0; b < F.q(); ++b) {
                CAPTURE(p);
                CAPTURE(m);
                CAPTURE(a);
                CAPTURE(b);
                CHECK(F.mul(a, b) == oracle_mul(F, a, b));
            }
    }
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(Field::make(4, 1), std::invalid_argument);  // not prime
    CHECK_THROWS_AS(Field::make(3, 0), std::invalid_argument);  // degree 0
    CHECK_THROWS_AS(Field::make(2, 17), std::invalid_argument); // exceeds 2^16
    CHECK_THROWS_AS(Field::from_order(6), std::invalid_argument);
    CHECK_THROWS_AS(Field::from_order(12), std::invalid_argument);
    CHECK_THROWS_AS(Field::parse("GF(6)"), std::invalid_argument);
    CHECK_THROWS_AS(Field::parse("gf(9)"), std::invalid_argument);
    CHECK(Field::parse("GF(9)") == Field::make(3, 2));
    CHECK(Field::from_order(65536) == Field::make(2, 16));
}

TEST_CASE("division and inversion") {
    const Field F = Field::make(3, 2);
    CHECK_THROWS_AS(F.inv(0), std::domain_error);
    CHECK_THROWS_AS(F.div(1, 0), std::domain_error);
    for (fe a = 1; a < F.q(); ++a) {
        CHECK(F.mul(a, F.inv(a)) == 1);
        CHECK(F.inv(F.inv(a)) == a); // involution
    }
}

TEST_CASE("field axioms hold exhaustively for q <= 16") {
    for (const std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u}) {
        const Field F = Field::from_order(q);
        for (fe a = 0; a < q; ++a)
            for (fe b = 0; b < q; ++b) {
                CHECK(F.add(a, b) == F.add(b, a));
                CHECK(F.mul(a, b) == F.mul(b, a));
                for (fe c = 0; c < q; ++c) {
                    CHECK(F.add(F.add(a, b), c) == F.add(a, F.add(b, c)));
                    CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
                    CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
                }
            }
    }
}

TEST_CASE("scaling by a nonzero element permutes the field") {
    const Field F = Field::make(2, 3);
    for (fe g = 1; g < F.q(); ++g) {
        std::set<fe> image;
        for (fe x = 0; x < F.q(); ++x) image.insert(F.mul(g, x));
        CHECK(image.size() == F.q());
    }
}

TEST_CASE("prime subfield arithmetic agrees with GF(p)") {
    for (const auto [p, m] : std::array<std::pair<int, int>, 3>{{{3, 2}, {2, 4}, {5, 2}}}) {
        const Field Fp = Field::make(p, 1);
        const Field Fq = Field::make(p, m);
        for (fe a = 0; a < Fp.q(); ++a)
            for (fe b = 0; b < Fp.q(); ++b) {
                CHECK(Fq.add(a, b) == Fp.add(a, b));
                CHECK(Fq.mul(a, b) == Fp.mul(a, b));
            }
    }
}

TEST_CASE("uniform nonzero sampling") {
    SUBCASE("GF(2) always returns 1") {
        const Field F = Field::make(2, 1);
        SeededRng rng(7);
        for (int i = 0; i < 100; ++i) CHECK(F.uniform_nonzero(rng) == 1);
    }
    SUBCASE("GF(5) counts within 3 sigma over 1e5 draws") {
        const Field F = Field::make(5, 1);
        SeededRng rng(20260809);
        std::array<int, 5> count{};
        const int n = 100000;
        for (int i = 0; i < n; ++i) ++count[F.uniform_nonzero(rng)];
        CHECK(count[0] == 0);
        const double mean = n / 4.0;
        const double sigma3 = 3.0 * std::sqrt(n * 0.25 * 0.75);
        for (int v = 1; v <= 4; ++v) CHECK(std::abs(count[v] - mean) < sigma3);
    }
    SUBCASE("same seed reproduces the stream") {
        const Field F = Field::make(7, 1);
        SeededRng a(42), b(42);
        for (int i = 0; i < 1000; ++i) CHECK(F.uniform_nonzero(a) == F.uniform_nonzero(b));
    }
}

TEST_CASE("checked elements reject field mixing") {
    const Field F3 = Field::make(3, 1);
    const Field F4 = Field::make(2, 2);
    const FieldElement a(2, F3), b(2, F4);
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    CHECK_THROWS_AS(FieldElement(5, F3), std::invalid_argument);
    CHECK((FieldElement(2, F3) + FieldElement(2, F3)).value == 1);
}

} // TEST_SUITE

#include "nsbc/field.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsbc {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

namespace {

// Polynomials over GF(p), coefficient vectors with coeff[i] on x^i.
using Poly = std::vector<int>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// a mod b, b monic
Poly poly_mod(Poly a, const Poly& b, int p) {
    trim(a);
    const int db = static_cast<int>(b.size()) - 1;
    while (static_cast<int>(a.size()) - 1 >= db) {
        const int da = static_cast<int>(a.size()) - 1;
        const int c = a[da];
        if (c != 0) {
            for (int i = 0; i <= db; ++i) {
                int& t = a[da - db + i];
                t = (t - c * b[i]) % p;
                if (t < 0) t += p;
            }
        }
        a.pop_back();
        trim(a);
    }
    return a;
}

Poly poly_mul(const Poly& a, const Poly& b, int p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    trim(r);
    return r;
}

bool divides(const Poly& g, const Poly& f, int p) {
    return poly_mod(f, g, p).empty();
}

// Exhaustive factor test: f (monic, degree m) is irreducible iff no monic
// polynomial of degree 1..m/2 divides it.
bool is_irreducible(const Poly& f, int p) {
    const int m = static_cast<int>(f.size()) - 1;
    for (int d = 1; 2 * d <= m; ++d) {
        std::uint64_t count = 1;
        for (int i = 0; i < d; ++i) count *= static_cast<std::uint64_t>(p);
        for (std::uint64_t v = 0; v < count; ++v) {
            Poly g(d + 1, 0);
            g[d] = 1;
            std::uint64_t t = v;
            for (int i = 0; i < d; ++i) {
                g[i] = static_cast<int>(t % p);
                t /= p;
            }
            if (divides(g, f, p)) return false;
        }
    }
    return true;
}

Poly smallest_irreducible(int p, int m) {
    std::uint64_t count = 1;
    for (int i = 0; i < m; ++i) count *= static_cast<std::uint64_t>(p);
    for (std::uint64_t v = 0; v < count; ++v) {
        Poly f(m + 1, 0);
        f[m] = 1;
        std::uint64_t t = v;
        for (int i = 0; i < m; ++i) {
            f[i] = static_cast<int>(t % p);
            t /= p;
        }
        if (is_irreducible(f, p)) return f;
    }
    throw std::logic_error("no irreducible polynomial found"); // unreachable
}

std::uint32_t encode(const Poly& a, int p) {
    std::uint32_t v = 0;
    for (std::size_t i = a.size(); i-- > 0;)
        v = v * static_cast<std::uint32_t>(p) + static_cast<std::uint32_t>(a[i]);
    return v;
}

Poly decode(std::uint32_t v, int p, int m) {
    Poly a(m, 0);
    for (int i = 0; i < m; ++i) {
        a[i] = static_cast<int>(v % static_cast<std::uint32_t>(p));
        v /= static_cast<std::uint32_t>(p);
    }
    trim(a);
    return a;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> fs;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            fs.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) fs.push_back(n);
    return fs;
}

} // namespace

Field Field::make(int p, int m) {
    if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
        throw std::invalid_argument("Field::make: p = " + std::to_string(p) + " is not prime");
    if (m < 1) throw std::invalid_argument("Field::make: extension degree m must be >= 1");
    std::uint64_t q = 1;
    for (int i = 0; i < m; ++i) {
        q *= static_cast<std::uint64_t>(p);
        if (q > 65536) throw std::invalid_argument("Field::make: q = p^m exceeds 2^16");
    }
    Field f;
    f.p_ = p;
    f.m_ = m;
    f.q_ = static_cast<std::uint32_t>(q);
    if (m > 1) {
        f.reduction_ = smallest_irreducible(p, m);
    }
    f.build_tables();
    return f;
}

Field Field::from_order(std::uint32_t q) {
    if (q < 2) throw std::invalid_argument("Field::from_order: q must be >= 2");
    std::uint32_t n = q;
    std::uint32_t p = 0;
    for (std::uint32_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            p = d;
            break;
        }
    }
    if (p == 0) p = n; // q itself prime
    int m = 0;
    while (n > 1) {
        if (n % p != 0)
            throw std::invalid_argument("Field::from_order: " + std::to_string(q) +
                                        " is not a prime power");
        n /= p;
        ++m;
    }
    return make(static_cast<int>(p), m);
}

Field Field::parse(std::string_view name) {
    std::string s(name);
    if (s.size() < 5 || s.substr(0, 3) != "GF(" || s.back() != ')')
        throw std::invalid_argument("Field::parse: expected \"GF(q)\", got \"" + s + "\"");
    const std::string inner = s.substr(3, s.size() - 4);
    std::size_t pos = 0;
    unsigned long q = 0;
    try {
        q = std::stoul(inner, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("Field::parse: bad field order in \"" + s + "\"");
    }
    if (pos != inner.size() || q == 0 || q > 65536)
        throw std::invalid_argument("Field::parse: bad field order in \"" + s + "\"");
    return from_order(static_cast<std::uint32_t>(q));
}

void Field::build_tables() {
    const std::uint32_t q = q_;

    neg_table_.resize(q);
    if (p_ == 2) {
        for (std::uint32_t a = 0; a < q; ++a) neg_table_[a] = static_cast<fe>(a);
    } else {
        for (std::uint32_t a = 0; a < q; ++a) {
            std::uint32_t v = 0, scale = 1, t = a;
            for (int i = 0; i < m_; ++i) {
                const std::uint32_t digit = t % static_cast<std::uint32_t>(p_);
                v += ((static_cast<std::uint32_t>(p_) - digit) % p_) * scale;
                scale *= static_cast<std::uint32_t>(p_);
                t /= static_cast<std::uint32_t>(p_);
            }
            neg_table_[a] = static_cast<fe>(v);
        }
    }

    if (q <= 256 && p_ != 2) {
        add_table_.resize(static_cast<std::size_t>(q) * q);
        for (std::uint32_t a = 0; a < q; ++a)
            for (std::uint32_t b = 0; b < q; ++b)
                add_table_[static_cast<std::size_t>(a) * q + b] =
                    add_slow(static_cast<fe>(a), static_cast<fe>(b));
    }

    // log/antilog from a fixed primitive element: smallest value whose order
    // is q-1. Multiplication results do not depend on the generator choice.
    auto raw_mul = [&](std::uint32_t a, std::uint32_t b) -> std::uint32_t {
        if (m_ == 1) return (a * b) % q;
        const Poly prod = poly_mul(decode(a, p_, m_), decode(b, p_, m_), p_);
        return encode(poly_mod(prod, reduction_, p_), p_);
    };
    auto raw_pow = [&](std::uint32_t a, std::uint64_t e) -> std::uint32_t {
        std::uint32_t r = 1, base = a;
        while (e > 0) {
            if (e & 1) r = raw_mul(r, base);
            base = raw_mul(base, base);
            e >>= 1;
        }
        return r;
    };
    const auto factors = prime_factors(q - 1);
    std::uint32_t g = 0;
    for (std::uint32_t cand = 1; cand < q; ++cand) {
        bool primitive = true;
        for (const auto f : factors) {
            if (raw_pow(cand, (q - 1) / f) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) {
            g = cand;
            break;
        }
    }

    exp_.resize(q - 1);
    log_.assign(q, 0);
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < q - 1; ++i) {
        exp_[i] = static_cast<fe>(x);
        log_[x] = static_cast<std::uint16_t>(i);
        x = raw_mul(x, g);
    }
}

fe Field::add_slow(fe a, fe b) const {
    if (m_ == 1) {
        const std::uint32_t s = static_cast<std::uint32_t>(a) + b;
        return static_cast<fe>(s >= q_ ? s - q_ : s);
    }
    std::uint32_t v = 0, scale = 1;
    std::uint32_t ta = a, tb = b;
    for (int i = 0; i < m_; ++i) {
        const std::uint32_t digit =
            (ta % static_cast<std::uint32_t>(p_) + tb % static_cast<std::uint32_t>(p_)) %
            static_cast<std::uint32_t>(p_);
        v += digit * scale;
        scale *= static_cast<std::uint32_t>(p_);
        ta /= static_cast<std::uint32_t>(p_);
        tb /= static_cast<std::uint32_t>(p_);
    }
    return static_cast<fe>(v);
}

fe Field::inv(fe a) const {
    if (a == 0) throw std::domain_error("Field::inv: zero has no inverse");
    const std::uint32_t e = (q_ - 1 - log_[a]) % (q_ - 1);
    return exp_[e];
}

fe Field::div(fe a, fe b) const {
    if (b == 0) throw std::domain_error("Field::div: division by zero");
    if (a == 0) return 0;
    std::uint32_t d = log_[a] + (q_ - 1) - log_[b];
    if (d >= q_ - 1) d -= q_ - 1;
    return exp_[d];
}

fe Field::pow(fe a, std::uint64_t e) const {
    if (a == 0) return e == 0 ? static_cast<fe>(1) : static_cast<fe>(0);
    const std::uint64_t le = (static_cast<std::uint64_t>(log_[a]) * (e % (q_ - 1))) % (q_ - 1);
    return exp_[le];
}

FieldElement::FieldElement(fe v, const Field& f) : value(v), field(&f) {
    if (!f.contains(v))
        throw std::invalid_argument("FieldElement: value " + std::to_string(v) +
                                    " outside " + f.name());
}

namespace {
const Field& same_field(const FieldElement& a, const FieldElement& b) {
    if (a.field == nullptr || b.field == nullptr)
        throw std::invalid_argument("FieldElement: uninitialized element");
    if (*a.field != *b.field)
        throw std::invalid_argument("FieldElement: field mismatch " + a.field->name() +
                                    " vs " + b.field->name());
    return *a.field;
}
} // namespace

FieldElement FieldElement::operator+(const FieldElement& o) const {
    const Field& f = same_field(*this, o);
    return {f.add(value, o.value), f};
}
FieldElement FieldElement::operator-(const FieldElement& o) const {
    const Field& f = same_field(*this, o);
    return {f.sub(value, o.value), f};
}
FieldElement FieldElement::operator*(const FieldElement& o) const {
    const Field& f = same_field(*this, o);
    return {f.mul(value, o.value), f};
}
FieldElement FieldElement::operator/(const FieldElement& o) const {
    const Field& f = same_field(*this, o);
    return {f.div(value, o.value), f};
}
FieldElement FieldElement::operator-() const {
    if (field == nullptr) throw std::invalid_argument("FieldElement: uninitialized element");
    return {field->neg(value), *field};
}
FieldElement FieldElement::inverse() const {
    if (field == nullptr) throw std::invalid_argument("FieldElement: uninitialized element");
    return {field->inv(value), *field};
}
bool FieldElement::operator==(const FieldElement& o) const {
    same_field(*this, o);
    return value == o.value;
}

} // namespace nsbc

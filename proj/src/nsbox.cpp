#include "nsbc/nsbox.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace nsbc {

namespace {
constexpr std::size_t kTableBudget = 10'000'000;
}

TabularBox::TabularBox(std::vector<int> input_sizes, std::vector<int> output_sizes,
                       std::vector<Rat> pmf)
    : input_sizes_(std::move(input_sizes)),
      output_sizes_(std::move(output_sizes)),
      pmf_(std::move(pmf)) {
    if (input_sizes_.empty() || input_sizes_.size() != output_sizes_.size())
        throw std::invalid_argument("TabularBox: party count mismatch");
    for (const int s : input_sizes_)
        if (s < 1) throw std::invalid_argument("TabularBox: empty input alphabet");
    for (const int s : output_sizes_)
        if (s < 1) throw std::invalid_argument("TabularBox: empty output alphabet");
    for (const int s : input_sizes_) {
        if (in_count_ > kTableBudget / static_cast<std::size_t>(s))
            throw std::invalid_argument("TabularBox: table too large");
        in_count_ *= static_cast<std::size_t>(s);
    }
    for (const int s : output_sizes_) {
        if (out_count_ > kTableBudget / static_cast<std::size_t>(s))
            throw std::invalid_argument("TabularBox: table too large");
        out_count_ *= static_cast<std::size_t>(s);
    }
    if (in_count_ > kTableBudget / out_count_)
        throw std::invalid_argument("TabularBox: table too large");
    if (pmf_.size() != in_count_ * out_count_)
        throw std::invalid_argument("TabularBox: pmf size does not match alphabets");
    for (std::size_t a = 0; a < in_count_; ++a) {
        Rat total(0);
        for (std::size_t b = 0; b < out_count_; ++b) {
            const Rat& p = pmf_[a * out_count_ + b];
            if (p < Rat(0)) throw std::invalid_argument("TabularBox: negative probability");
            if (p != Rat(0)) total += p;
        }
        if (total != Rat(1))
            throw std::invalid_argument("TabularBox: conditional slice " + std::to_string(a) +
                                        " sums to " + format_rat(total) + ", not 1");
    }
}

std::size_t TabularBox::pack(const std::vector<int>& v, const std::vector<int>& sizes) {
    if (v.size() != sizes.size()) throw std::invalid_argument("TabularBox: bad tuple length");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0 || v[i] >= sizes[i])
            throw std::invalid_argument("TabularBox: tuple value out of alphabet");
        idx = idx * static_cast<std::size_t>(sizes[i]) + static_cast<std::size_t>(v[i]);
    }
    return idx;
}

std::vector<int> TabularBox::unpack(std::size_t idx, const std::vector<int>& sizes) {
    std::vector<int> v(sizes.size());
    for (std::size_t i = sizes.size(); i-- > 0;) {
        v[i] = static_cast<int>(idx % static_cast<std::size_t>(sizes[i]));
        idx /= static_cast<std::size_t>(sizes[i]);
    }
    return v;
}

const std::vector<TabularBox::Entry>& TabularBox::nonzeros() const {
    if (!nonzeros_built_) {
        for (std::size_t a = 0; a < in_count_; ++a)
            for (std::size_t b = 0; b < out_count_; ++b) {
                const Rat& p = pmf_[a * out_count_ + b];
                if (p != Rat(0)) nonzeros_.push_back({a, b, p});
            }
        nonzeros_built_ = true;
    }
    return nonzeros_;
}

std::string NsVerifyResult::describe() const {
    if (ok) return "non-signaling";
    std::string s = "signaling subset {";
    for (std::size_t i = 0; i < subset.size(); ++i)
        s += (i ? "," : "") + std::to_string(subset[i]);
    s += "}: marginal depends on outside inputs (witness input pair found)";
    return s;
}

NsVerifyResult verify_nonsignaling(const TabularBox& box) {
    const int kappa = box.parties();
    const auto& entries = box.nonzeros();
    const auto& in_sizes = box.input_sizes();
    const auto& out_sizes = box.output_sizes();

    for (std::uint32_t mask = 1; mask + 1 < (1u << kappa); ++mask) {
        // project an index onto the subset's coordinates
        auto project = [&](std::size_t idx, const std::vector<int>& sizes) {
            std::vector<int> full(sizes.size());
            std::size_t t = idx;
            for (std::size_t i = sizes.size(); i-- > 0;) {
                full[i] = static_cast<int>(t % static_cast<std::size_t>(sizes[i]));
                t /= static_cast<std::size_t>(sizes[i]);
            }
            std::size_t p = 0;
            for (int i = 0; i < kappa; ++i)
                if (mask & (1u << i))
                    p = p * static_cast<std::size_t>(sizes[i]) + static_cast<std::size_t>(full[i]);
            return p;
        };

        // marginal over subset outputs for every full input, sparse
        std::unordered_map<std::size_t, std::map<std::size_t, Rat>> marg;
        for (const auto& e : entries) marg[e.in][project(e.out, out_sizes)] += e.p;

        // all full inputs sharing a subset projection must give equal marginals
        std::unordered_map<std::size_t, std::size_t> representative;
        for (std::size_t a = 0; a < box.input_count(); ++a) {
            const std::size_t key = project(a, in_sizes);
            static const std::map<std::size_t, Rat> kEmpty;
            const auto ita = marg.find(a);
            const auto& cur = ita == marg.end() ? kEmpty : ita->second;
            const auto [rit, inserted] = representative.try_emplace(key, a);
            if (inserted) continue;
            const auto itr = marg.find(rit->second);
            const auto& ref = itr == marg.end() ? kEmpty : itr->second;
            if (cur != ref) {
                NsVerifyResult r;
                r.ok = false;
                for (int i = 0; i < kappa; ++i)
                    if (mask & (1u << i)) r.subset.push_back(i + 1);
                r.inputs_a = box.unpack_input(rit->second);
                r.inputs_b = box.unpack_input(a);
                return r;
            }
        }
    }
    NsVerifyResult r;
    r.ok = true;
    return r;
}

TabularBox make_leak_box(const Field& F) {
    const int q = static_cast<int>(F.q());
    // party 1: input in F_q, trivial output; party 2: trivial input, output = party 1's input
    std::vector<int> in_sizes = {q, 1};
    std::vector<int> out_sizes = {1, q};
    std::vector<Rat> pmf(static_cast<std::size_t>(q) * q, Rat(0));
    for (int a = 0; a < q; ++a) pmf[static_cast<std::size_t>(a) * q + a] = Rat(1);
    return TabularBox(std::move(in_sizes), std::move(out_sizes), std::move(pmf));
}

// ---------------------------------------------------------------------------

std::unique_ptr<RefereeSession> NsBox::open(std::uint64_t seed) const {
    return std::make_unique<RefereeSession>(*this, seed);
}

TabularBox NsBox::tabularize() const {
    const Field& F = field();
    const std::size_t q = F.q();
    const int kappa = parties();

    std::vector<int> in_sizes(static_cast<std::size_t>(kappa)),
        out_sizes(static_cast<std::size_t>(kappa));
    for (int i = 0; i < kappa; ++i) {
        std::size_t s = 1;
        for (int j = 0; j < input_len(i); ++j) s *= q;
        in_sizes[i] = static_cast<int>(s);
        s = 1;
        for (int j = 0; j < output_len(i); ++j) s *= q;
        out_sizes[i] = static_cast<int>(s);
    }
    std::size_t in_count = 1, out_count = 1;
    for (const int s : in_sizes) in_count *= static_cast<std::size_t>(s);
    for (const int s : out_sizes) out_count *= static_cast<std::size_t>(s);
    if (in_count > kTableBudget || out_count > kTableBudget ||
        in_count > kTableBudget / out_count)
        throw std::invalid_argument("tabularize: " + kind() + " box too large to enumerate");

    std::size_t latent_count = 1;
    for (int i = 0; i < latent_dim(); ++i) latent_count *= q;
    const Rat weight(1, static_cast<long long>(latent_count));

    // tuple <-> index: little-endian base-q digits
    auto decode_tuple = [&](std::size_t idx, int len) {
        std::vector<fe> t(static_cast<std::size_t>(len));
        for (int i = 0; i < len; ++i) {
            t[i] = static_cast<fe>(idx % q);
            idx /= q;
        }
        return t;
    };
    auto encode_tuple = [&](const std::vector<fe>& t) {
        std::size_t idx = 0;
        for (std::size_t i = t.size(); i-- > 0;) idx = idx * q + t[i];
        return idx;
    };

    std::vector<Rat> pmf(in_count * out_count, Rat(0));
    std::vector<std::vector<fe>> inputs(static_cast<std::size_t>(kappa));
    for (std::size_t a = 0; a < in_count; ++a) {
        std::size_t t = a;
        for (int i = kappa - 1; i >= 0; --i) {
            inputs[i] = decode_tuple(t % static_cast<std::size_t>(in_sizes[i]), input_len(i));
            t /= static_cast<std::size_t>(in_sizes[i]);
        }
        for (std::size_t l = 0; l < latent_count; ++l) {
            const auto latent = decode_tuple(l, latent_dim());
            const auto outs = outputs_from_latent(inputs, latent);
            std::size_t b = 0;
            for (int i = 0; i < kappa; ++i)
                b = b * static_cast<std::size_t>(out_sizes[i]) + encode_tuple(outs[i]);
            pmf[a * out_count + b] += weight;
        }
    }
    return TabularBox(std::move(in_sizes), std::move(out_sizes), std::move(pmf));
}

RefereeSession::RefereeSession(const NsBox& box, std::uint64_t seed)
    : box_(box),
      rng_(seed),
      submitted_(static_cast<std::size_t>(box.parties()), false),
      inputs_(static_cast<std::size_t>(box.parties())),
      outputs_(static_cast<std::size_t>(box.parties())) {}

std::vector<fe> RefereeSession::submit(int party, const std::vector<fe>& input) {
    if (party < 0 || party >= box_.parties())
        throw std::invalid_argument("RefereeSession: unknown party " + std::to_string(party));
    if (submitted_[party])
        throw std::logic_error("RefereeSession: party " + std::to_string(party) +
                               " already submitted");
    if (static_cast<int>(input.size()) != box_.input_len(party))
        throw std::invalid_argument("RefereeSession: input length " +
                                    std::to_string(input.size()) + " for party " +
                                    std::to_string(party) + ", expected " +
                                    std::to_string(box_.input_len(party)));
    for (const fe v : input)
        if (!box_.field().contains(v))
            throw std::invalid_argument("RefereeSession: input value outside field");
    inputs_[party] = input;
    submitted_[party] = true;
    outputs_[party] = box_.conditional_output(*this, party);
    return outputs_[party];
}

// --------------------------------------------------------------------------

OtpBox::OtpBox(const Field& F, int k) : field_(&F), k_(k) {
    if (k < 2) throw std::invalid_argument("OtpBox: stage index must be >= 2");
}

fe OtpBox::inner_product(const std::vector<fe>& s, const std::vector<fe>& t) const {
    fe acc = 0;
    for (std::size_t i = 0; i < s.size(); ++i) acc = field_->add(acc, field_->mul(s[i], t[i]));
    return acc;
}

std::vector<std::vector<fe>> OtpBox::outputs_from_latent(
    const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const {
    const fe u = latent[0];
    const fe v = field_->sub(inner_product(inputs[0], inputs[1]), u);
    return {{u}, {v}};
}

std::vector<fe> OtpBox::conditional_output(RefereeSession& s, int party) const {
    const int other = 1 - party;
    if (!s.submitted(other)) return {field_->uniform(s.rng())};
    const fe rel = inner_product(s.input_of(0), s.input_of(1));
    return {field_->sub(rel, s.output_of(other)[0])};
}

std::vector<std::vector<fe>> FadingDirtBox::outputs_from_latent(
    const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const {
    const fe u = latent[0];
    const fe v = field_->add(u, field_->mul(inputs[0][0], inputs[1][0]));
    return {{u}, {v}};
}

std::vector<fe> FadingDirtBox::conditional_output(RefereeSession& s, int party) const {
    const int other = 1 - party;
    if (!s.submitted(other)) return {field_->uniform(s.rng())};
    const fe st = field_->mul(s.input_of(0)[0], s.input_of(1)[0]);
    if (party == 1) return {field_->add(s.output_of(0)[0], st)}; // V = U + ST
    return {field_->sub(s.output_of(1)[0], st)};                 // U = V - ST
}

TriangularBox::TriangularBox(const Field& F, int K) : field_(&F), K_(K) {
    if (K < 1) throw std::invalid_argument("TriangularBox: need at least one user");
}

std::vector<fe> TriangularBox::latent_row(int k, const std::vector<fe>& t) const {
    std::vector<fe> row(static_cast<std::size_t>(K_), 0);
    for (int j = 0; j < k - 1; ++j) row[j] = t[j];
    row[k - 1] = 1;
    return row;
}

std::vector<std::vector<fe>> TriangularBox::outputs_from_latent(
    const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const {
    std::vector<std::vector<fe>> outs(static_cast<std::size_t>(K_) + 1);
    outs[0] = latent;
    for (int k = 1; k <= K_; ++k) {
        const auto row = latent_row(k, inputs[k]);
        fe v = inputs[0][k - 1];
        for (int j = 0; j < K_; ++j) v = field_->add(v, field_->mul(row[j], latent[j]));
        outs[k] = {v};
    }
    return outs;
}

std::vector<fe> TriangularBox::conditional_output(RefereeSession& s, int party) const {
    if (party == 0) {
        // u uniform on the solution set of the constraints fixed by receivers
        // that have already been served: L(t_k) . u = v_k - s_k
        std::vector<std::vector<fe>> A;
        std::vector<fe> rhs;
        for (int k = 1; k <= K_; ++k) {
            if (!s.submitted(k)) continue;
            A.push_back(latent_row(k, s.input_of(k)));
            rhs.push_back(field_->sub(s.output_of(k)[0], s.input_of(0)[k - 1]));
        }
        return sample_affine_solution(std::move(A), std::move(rhs), K_, *field_, s.rng());
    }
    if (!s.submitted(0)) return {field_->uniform(s.rng())};
    const auto& u = s.output_of(0);
    const auto row = latent_row(party, s.input_of(party));
    fe v = s.input_of(0)[party - 1];
    for (int j = 0; j < K_; ++j) v = field_->add(v, field_->mul(row[j], u[j]));
    return {v};
}

MacBox::MacBox(const Field& F, int K, InterferenceFn f)
    : field_(&F), K_(K), f_(std::move(f)) {
    if (K < 1) throw std::invalid_argument("MacBox: need at least one transmitter");
    if (!f_) throw std::invalid_argument("MacBox: missing interference function");
}

fe MacBox::interference(fe t, const std::vector<fe>& s) const {
    const fe v = f_(t, s);
    if (!field_->contains(v))
        throw std::domain_error("MacBox: interference function left the field (codomain "
                                "must be " + field_->name() + ")");
    return v;
}

std::vector<std::vector<fe>> MacBox::outputs_from_latent(
    const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const {
    std::vector<std::vector<fe>> outs(static_cast<std::size_t>(K_) + 1);
    fe sum = 0;
    std::vector<fe> svals(static_cast<std::size_t>(K_));
    for (int k = 0; k < K_; ++k) {
        outs[k] = {latent[k]};
        sum = field_->add(sum, latent[k]);
        svals[k] = inputs[k][0];
    }
    outs[K_] = {field_->add(sum, interference(inputs[K_][0], svals))};
    return outs;
}

std::vector<fe> MacBox::conditional_output(RefereeSession& s, int party) const {
    auto all_tx_submitted_except = [&](int skip) {
        for (int k = 0; k < K_; ++k)
            if (k != skip && !s.submitted(k)) return false;
        return true;
    };
    if (party < K_) {
        if (s.submitted(K_) && all_tx_submitted_except(-1)) {
            // last unknown: u_party = v - f - sum of other u's
            std::vector<fe> svals(static_cast<std::size_t>(K_));
            for (int k = 0; k < K_; ++k) svals[k] = s.input_of(k)[0];
            fe val = field_->sub(s.output_of(K_)[0], interference(s.input_of(K_)[0], svals));
            for (int k = 0; k < K_; ++k)
                if (k != party) val = field_->sub(val, s.output_of(k)[0]);
            return {val};
        }
        return {field_->uniform(s.rng())};
    }
    if (!all_tx_submitted_except(-1)) return {field_->uniform(s.rng())};
    std::vector<fe> svals(static_cast<std::size_t>(K_));
    fe sum = 0;
    for (int k = 0; k < K_; ++k) {
        svals[k] = s.input_of(k)[0];
        sum = field_->add(sum, s.output_of(k)[0]);
    }
    return {field_->add(sum, interference(s.input_of(K_)[0], svals))};
}

OtpBox make_otp_box(const Field& F, int k) { return OtpBox(F, k); }
TriangularBox make_triangular_box(const Field& F, int K) { return TriangularBox(F, K); }
FadingDirtBox make_fading_dirt_box(const Field& F) { return FadingDirtBox(F); }
MacBox make_mac_box(const Field& F, int K, MacBox::InterferenceFn f) {
    return MacBox(F, K, std::move(f));
}
GaussianModBox make_gaussian_mod_box(double P, int k) { return GaussianModBox(P, k); }

// --------------------------------------------------------------------------

GaussianModBox::GaussianModBox(double P, int k) : k_(k) {
    if (P < 1.0) throw std::invalid_argument("GaussianModBox: power must be >= 1");
    if (k < 2) throw std::invalid_argument("GaussianModBox: stage index must be >= 2");
    Q_ = static_cast<int>(std::ceil(std::sqrt(P)));
}

int GaussianModBox::Session::relation_value() const {
    double dot = 0.0;
    for (std::size_t i = 0; i < s_.size(); ++i) dot += s_[i] * t_[i];
    const long long fl = static_cast<long long>(std::floor(dot));
    const long long Q = box_->Q_;
    return static_cast<int>(((fl % Q) + Q) % Q);
}

int GaussianModBox::Session::submit_tx(const std::vector<double>& s) {
    if (tx_done_) throw std::logic_error("GaussianModBox: tx already submitted");
    if (static_cast<int>(s.size()) != box_->k_ - 1)
        throw std::invalid_argument("GaussianModBox: tx input length mismatch");
    s_ = s;
    tx_done_ = true;
    if (rx_done_)
        u_ = static_cast<int>((relation_value() - v_ + box_->Q_) % box_->Q_);
    else
        u_ = static_cast<int>(rng_.uniform_below(static_cast<std::uint64_t>(box_->Q_)));
    return u_;
}

int GaussianModBox::Session::submit_rx(const std::vector<double>& t) {
    if (rx_done_) throw std::logic_error("GaussianModBox: rx already submitted");
    if (static_cast<int>(t.size()) != box_->k_ - 1)
        throw std::invalid_argument("GaussianModBox: rx input length mismatch");
    t_ = t;
    rx_done_ = true;
    if (tx_done_)
        v_ = static_cast<int>((relation_value() - u_ + box_->Q_) % box_->Q_);
    else
        v_ = static_cast<int>(rng_.uniform_below(static_cast<std::uint64_t>(box_->Q_)));
    return v_;
}

// --------------------------------------------------------------------------

TabularSession::TabularSession(const TabularBox& box, std::uint64_t seed)
    : box_(&box),
      rng_(seed),
      submitted_(static_cast<std::size_t>(box.parties()), false),
      inputs_(static_cast<std::size_t>(box.parties()), 0),
      outputs_(static_cast<std::size_t>(box.parties()), -1) {
    const auto check = verify_nonsignaling(box);
    if (!check.ok)
        throw std::invalid_argument("TabularSession: box is not non-signaling (" +
                                    check.describe() + ")");
}

int TabularSession::submit(int party, int input) {
    const int kappa = box_->parties();
    if (party < 0 || party >= kappa)
        throw std::invalid_argument("TabularSession: unknown party");
    if (submitted_[party]) throw std::logic_error("TabularSession: party already submitted");
    if (input < 0 || input >= box_->input_sizes()[party])
        throw std::invalid_argument("TabularSession: input outside alphabet");
    inputs_[party] = input;
    submitted_[party] = true;

    // conditional law of this party's output given outputs delivered so far;
    // unset parties keep default input 0 (NS makes the choice irrelevant)
    const std::size_t in_idx = box_->input_index(inputs_);
    const int my_size = box_->output_sizes()[party];
    std::vector<Rat> weight(static_cast<std::size_t>(my_size), Rat(0));
    const std::size_t out_count = box_->output_count();
    for (std::size_t b = 0; b < out_count; ++b) {
        const Rat& p = box_->prob(in_idx, b);
        if (p == Rat(0)) continue;
        const auto tuple = box_->unpack_output(b);
        bool match = true;
        for (int i = 0; i < kappa; ++i)
            if (outputs_[i] >= 0 && tuple[i] != outputs_[i]) {
                match = false;
                break;
            }
        if (match) weight[static_cast<std::size_t>(tuple[party])] += p;
    }

    long long lcm = 1;
    for (const auto& w : weight)
        if (w != Rat(0)) lcm = std::lcm(lcm, w.denominator());
    std::vector<std::uint64_t> ticket(weight.size(), 0);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
        if (weight[i] != Rat(0))
            ticket[i] = static_cast<std::uint64_t>(weight[i].numerator() *
                                                   (lcm / weight[i].denominator()));
        total += ticket[i];
    }
    if (total == 0) throw std::logic_error("TabularSession: inconsistent delivered outputs");
    std::uint64_t draw = rng_.uniform_below(total);
    int chosen = 0;
    for (std::size_t i = 0; i < ticket.size(); ++i) {
        if (draw < ticket[i]) {
            chosen = static_cast<int>(i);
            break;
        }
        draw -= ticket[i];
    }
    outputs_[party] = chosen;
    return chosen;
}

std::vector<fe> sample_affine_solution(std::vector<std::vector<fe>> A, std::vector<fe> rhs,
                                       int dim, const Field& F, SeededRng& rng) {
    const int rows = static_cast<int>(A.size());
    // forward elimination with column pivots
    std::vector<int> pivot_col(static_cast<std::size_t>(rows), -1);
    int rank = 0;
    for (int col = 0; col < dim && rank < rows; ++col) {
        int sel = -1;
        for (int i = rank; i < rows; ++i)
            if (A[i][col] != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(A[rank], A[sel]);
        std::swap(rhs[rank], rhs[sel]);
        for (int i = 0; i < rows; ++i) {
            if (i == rank || A[i][col] == 0) continue;
            const fe factor = F.div(A[i][col], A[rank][col]);
            for (int j = col; j < dim; ++j) A[i][j] = F.sub(A[i][j], F.mul(factor, A[rank][j]));
            rhs[i] = F.sub(rhs[i], F.mul(factor, rhs[rank]));
        }
        pivot_col[rank] = col;
        ++rank;
    }
    for (int i = rank; i < rows; ++i)
        if (rhs[i] != 0) throw std::logic_error("sample_affine_solution: inconsistent system");

    std::vector<fe> x(static_cast<std::size_t>(dim));
    std::vector<bool> is_pivot(static_cast<std::size_t>(dim), false);
    for (int i = 0; i < rank; ++i) is_pivot[pivot_col[i]] = true;
    for (int j = 0; j < dim; ++j)
        if (!is_pivot[j]) x[j] = F.uniform(rng);
    for (int i = rank - 1; i >= 0; --i) {
        const int col = pivot_col[i];
        fe acc = rhs[i];
        for (int j = 0; j < dim; ++j) {
            if (j == col) continue;
            acc = F.sub(acc, F.mul(A[i][j], x[j]));
        }
        x[col] = F.div(acc, A[i][col]);
    }
    return x;
}

} // namespace nsbc

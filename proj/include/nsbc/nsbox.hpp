#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nsbc/field.hpp"
#include "nsbc/rational.hpp"
#include "nsbc/rng.hpp"

namespace nsbc {

// Multipartite conditional pmf with exact rational entries. Entry layout is
// row-major over (input multi-index, output multi-index), both mixed-radix
// with party 0 as the most significant digit.
class TabularBox {
public:
    TabularBox(std::vector<int> input_sizes, std::vector<int> output_sizes,
               std::vector<Rat> pmf);

    int parties() const { return static_cast<int>(input_sizes_.size()); }
    const std::vector<int>& input_sizes() const { return input_sizes_; }
    const std::vector<int>& output_sizes() const { return output_sizes_; }
    std::size_t input_count() const { return in_count_; }
    std::size_t output_count() const { return out_count_; }

    std::size_t input_index(const std::vector<int>& a) const { return pack(a, input_sizes_); }
    std::size_t output_index(const std::vector<int>& b) const { return pack(b, output_sizes_); }
    std::vector<int> unpack_input(std::size_t idx) const { return unpack(idx, input_sizes_); }
    std::vector<int> unpack_output(std::size_t idx) const { return unpack(idx, output_sizes_); }

    const Rat& prob(std::size_t in_idx, std::size_t out_idx) const {
        return pmf_[in_idx * out_count_ + out_idx];
    }
    const Rat& prob(const std::vector<int>& a, const std::vector<int>& b) const {
        return prob(input_index(a), output_index(b));
    }

    // nonzero entries as (in_idx, out_idx, p), built lazily
    struct Entry {
        std::size_t in, out;
        Rat p;
    };
    const std::vector<Entry>& nonzeros() const;

private:
    static std::size_t pack(const std::vector<int>& v, const std::vector<int>& sizes);
    static std::vector<int> unpack(std::size_t idx, const std::vector<int>& sizes);

    std::vector<int> input_sizes_, output_sizes_;
    std::size_t in_count_ = 1, out_count_ = 1;
    std::vector<Rat> pmf_;
    mutable std::vector<Entry> nonzeros_;
    mutable bool nonzeros_built_ = false;
};

struct NsVerifyResult {
    bool ok = false;
    // on failure: the signaling party subset (1-based) and two full input
    // assignments agreeing on the subset whose subset-output marginals differ
    std::vector<int> subset;
    std::vector<int> inputs_a, inputs_b;
    std::string describe() const;
};

// Exact check of the non-signaling condition: for every subset of parties,
// the marginal law of that subset's outputs may depend only on that subset's
// inputs. Rational arithmetic, no tolerance.
NsVerifyResult verify_nonsignaling(const TabularBox& box);

// A party that signals: party 2's output equals party 1's input.
TabularBox make_leak_box(const Field& F);

// ---------------------------------------------------------------------------
// Structured boxes: closed-form samplers over a uniform latent vector, used
// where tabularization would cost q^O(K). NS status is certified by the
// small-q tabular cross-check (tests) plus construction.

class RefereeSession;

class NsBox {
public:
    virtual ~NsBox() = default;
    virtual int parties() const = 0;
    virtual int input_len(int party) const = 0;  // field elements per input
    virtual int output_len(int party) const = 0;
    virtual const Field& field() const = 0;
    virtual std::string kind() const = 0;
    virtual int latent_dim() const = 0;
    // all party outputs given all inputs and the latent draw
    virtual std::vector<std::vector<fe>> outputs_from_latent(
        const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const = 0;

    // Simulates spatially separated use: parties submit in any order, each
    // receives its output immediately, and the joint statistics match the
    // box pmf regardless of submission order.
    std::unique_ptr<RefereeSession> open(std::uint64_t seed) const;

    // Exact pmf by enumerating inputs x latent; product of alphabet sizes
    // must stay within the tabular budget.
    TabularBox tabularize() const;

protected:
    friend class RefereeSession;
    // Output for `party`, sampled from the conditional law given everything
    // delivered so far in the session. Well-defined in any order because the
    // box is non-signaling.
    virtual std::vector<fe> conditional_output(RefereeSession& s, int party) const = 0;
};

class RefereeSession {
public:
    RefereeSession(const NsBox& box, std::uint64_t seed);

    // Submits `input` for `party` and returns that party's output. Throws on
    // double submission or a wrong-length input.
    std::vector<fe> submit(int party, const std::vector<fe>& input);

    bool submitted(int party) const { return submitted_[static_cast<std::size_t>(party)]; }
    const std::vector<fe>& input_of(int party) const {
        return inputs_[static_cast<std::size_t>(party)];
    }
    const std::vector<fe>& output_of(int party) const {
        return outputs_[static_cast<std::size_t>(party)];
    }
    SeededRng& rng() { return rng_; }

private:
    const NsBox& box_;
    SeededRng rng_;
    std::vector<bool> submitted_;
    std::vector<std::vector<fe>> inputs_;
    std::vector<std::vector<fe>> outputs_;
};

// Bipartite one-time-pad box for stage k: inputs s,t in F^(k-1), outputs
// u,v in F with u + v = s.t and u uniform. Party 0 holds (s,u), party 1 (t,v).
class OtpBox : public NsBox {
public:
    OtpBox(const Field& F, int k);
    int parties() const override { return 2; }
    int input_len(int) const override { return k_ - 1; }
    int output_len(int) const override { return 1; }
    const Field& field() const override { return *field_; }
    std::string kind() const override { return "otp"; }
    int latent_dim() const override { return 1; }
    std::vector<std::vector<fe>> outputs_from_latent(
        const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const override;

    fe inner_product(const std::vector<fe>& s, const std::vector<fe>& t) const;

protected:
    std::vector<fe> conditional_output(RefereeSession& s, int party) const override;

private:
    const Field* field_;
    int k_;
};

// Bipartite side-information box: scalar inputs S (Tx) and T (Rx), outputs
// U uniform and V = U + S*T.
class FadingDirtBox : public NsBox {
public:
    explicit FadingDirtBox(const Field& F) : field_(&F) {}
    int parties() const override { return 2; }
    int input_len(int) const override { return 1; }
    int output_len(int) const override { return 1; }
    const Field& field() const override { return *field_; }
    std::string kind() const override { return "fading-dirt"; }
    int latent_dim() const override { return 1; }
    std::vector<std::vector<fe>> outputs_from_latent(
        const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const override;

protected:
    std::vector<fe> conditional_output(RefereeSession& s, int party) const override;

private:
    const Field* field_;
};

// (K+1)-partite box: party 0 (Tx) inputs s in F^K and receives u uniform on
// F^K; party k (Rx-k) inputs t_k in F^(k-1) and receives v_k with
// v = s + L(t) u, L(t) the unit-diagonal lower-triangular matrix of the t's.
class TriangularBox : public NsBox {
public:
    TriangularBox(const Field& F, int K);
    int parties() const override { return K_ + 1; }
    int input_len(int party) const override { return party == 0 ? K_ : party - 1; }
    int output_len(int party) const override { return party == 0 ? K_ : 1; }
    const Field& field() const override { return *field_; }
    std::string kind() const override { return "triangular"; }
    int latent_dim() const override { return K_; }
    std::vector<std::vector<fe>> outputs_from_latent(
        const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const override;

    int users() const { return K_; }

protected:
    std::vector<fe> conditional_output(RefereeSession& s, int party) const override;

private:
    // row k of L(t) restricted to the latent coordinates: (t_1..t_{k-1}, 1, 0..)
    std::vector<fe> latent_row(int k, const std::vector<fe>& t) const;
    const Field* field_;
    int K_;
};

// (K+1)-partite box for the MAC with side information: tx parties 0..K-1
// input s_k and receive u_k, jointly uniform on F^K; the rx party K inputs t
// and receives v = u_1 + ... + u_K + f(t, s_1, ..., s_K).
class MacBox : public NsBox {
public:
    using InterferenceFn = std::function<fe(fe t, const std::vector<fe>& s)>;
    MacBox(const Field& F, int K, InterferenceFn f);
    int parties() const override { return K_ + 1; }
    int input_len(int) const override { return 1; }
    int output_len(int) const override { return 1; }
    const Field& field() const override { return *field_; }
    std::string kind() const override { return "mac"; }
    int latent_dim() const override { return K_; }
    std::vector<std::vector<fe>> outputs_from_latent(
        const std::vector<std::vector<fe>>& inputs, const std::vector<fe>& latent) const override;

    // applies f and validates its codomain
    fe interference(fe t, const std::vector<fe>& s) const;
    int users() const { return K_; }

protected:
    std::vector<fe> conditional_output(RefereeSession& s, int party) const override;

private:
    const Field* field_;
    int K_;
    InterferenceFn f_;
};

OtpBox make_otp_box(const Field& F, int k);
TriangularBox make_triangular_box(const Field& F, int K);
FadingDirtBox make_fading_dirt_box(const Field& F);
MacBox make_mac_box(const Field& F, int K, MacBox::InterferenceFn f);
class GaussianModBox;
GaussianModBox make_gaussian_mod_box(double P, int k);

// Bipartite box over Z_Q, Q = ceil(sqrt(P)): real-vector inputs s,t; integer
// outputs u,v uniform on {0..Q-1} with u + v = floor(s.t) mod Q.
class GaussianModBox {
public:
    GaussianModBox(double P, int k);
    int modulus() const { return Q_; }
    int stage() const { return k_; }

    class Session {
    public:
        Session(const GaussianModBox& box, std::uint64_t seed) : box_(&box), rng_(seed) {}
        int submit_tx(const std::vector<double>& s);
        int submit_rx(const std::vector<double>& t);

    private:
        int relation_value() const; // floor(s.t) mod Q
        const GaussianModBox* box_;
        SeededRng rng_;
        bool tx_done_ = false, rx_done_ = false;
        std::vector<double> s_, t_;
        int u_ = -1, v_ = -1;
    };
    Session open(std::uint64_t seed) const { return Session(*this, seed); }

private:
    int Q_;
    int k_;
};

// Chain-rule referee over an explicit table; refuses non-NS boxes at open.
class TabularSession {
public:
    TabularSession(const TabularBox& box, std::uint64_t seed);
    int submit(int party, int input);

private:
    const TabularBox* box_;
    SeededRng rng_;
    std::vector<bool> submitted_;
    std::vector<int> inputs_;  // default 0 until submitted
    std::vector<int> outputs_; // -1 until delivered
};

// Uniform sample from {x : A x = rhs} over F; the system must be consistent.
std::vector<fe> sample_affine_solution(std::vector<std::vector<fe>> A, std::vector<fe> rhs,
                                       int dim, const Field& F, SeededRng& rng);

} // namespace nsbc

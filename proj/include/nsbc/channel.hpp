#pragma once

#include <cstdint>
#include <vector>

#include "nsbc/field.hpp"
#include "nsbc/pattern.hpp"
#include "nsbc/rng.hpp"

namespace nsbc {

// One channel use of the F_q CoMP broadcast: K x B coefficient matrix with
// zeros exactly where the pattern has zeros and star cells i.i.d. uniform on
// the nonzero elements.
struct ChannelDraw {
    int K = 0;
    int B = 0;
    std::vector<fe> G; // row-major
    std::uint64_t tau = 0;

    fe at(int k, int b) const { return G[static_cast<std::size_t>(k) * B + b]; }
    fe& at(int k, int b) { return G[static_cast<std::size_t>(k) * B + b]; }
    std::vector<fe> row(int k) const {
        return {G.begin() + static_cast<std::ptrdiff_t>(k) * B,
                G.begin() + static_cast<std::ptrdiff_t>(k + 1) * B};
    }
};

// y_k together with the receiver's own coefficient row (perfect CSIR).
struct ReceiverObservation {
    fe y = 0;
    std::vector<fe> csir;
};

ChannelDraw draw_channel(const Pattern& M, const Field& F, SeededRng& rng);

std::vector<ReceiverObservation> apply_channel(const ChannelDraw& draw, const Field& F,
                                               const std::vector<fe>& x);

// Scales row k by inv(G_kk); requires nonzero diagonal (receiver k listens
// to antenna k). Off-diagonal nonzero entries stay uniform in distribution.
ChannelDraw normalize_receivers(const ChannelDraw& draw, const Field& F);

// Original draw plus its column-scaled coupling G * diag(lambda) with
// lambda_b uniform on the nonzero elements. Each receiver row has the same
// marginal distribution across the two draws.
std::pair<ChannelDraw, ChannelDraw> couple_same_marginals(const Pattern& M, const Field& F,
                                                          SeededRng& rng);

// K=2 channel with Y1 = X1 (toy1) or Y1 = (X1, X2) (toy2); Y2bar = (G X1 +
// X2, G) with G uniform nonzero. q = 2 is permitted but degenerate (G is the
// constant 1, which amounts to perfect CSIT).
struct ToyChannel {
    const Field* field;
    bool rx1_sees_both; // false: toy1, true: toy2
    bool degenerate() const { return field->q() == 2; }

    struct Output {
        fe y1_x1;          // X1 as seen by Rx-1
        fe y1_x2 = 0;      // X2, only meaningful for toy2
        fe y2 = 0;         // G X1 + X2
        fe g = 0;          // CSIR at Rx-2
    };
    Output transmit(fe x1, fe x2, SeededRng& rng) const;
    Output transmit_with_g(fe x1, fe x2, fe g) const;
};

ToyChannel make_toy1(const Field& F);
ToyChannel make_toy2(const Field& F);

// One use of the real Gaussian CoMP channel; zeros match the pattern,
// nonzero coefficients are uniform on +-[1/c, c], noise is standard normal.
struct GaussianDraw {
    int K = 0;
    std::vector<double> G; // row-major K x K
    std::vector<double> z;
    double c = 2.0;

    double at(int k, int j) const { return G[static_cast<std::size_t>(k) * K + j]; }
    double& at(int k, int j) { return G[static_cast<std::size_t>(k) * K + j]; }
};

GaussianDraw draw_gaussian(const Pattern& M, double c, SeededRng& rng);
// Unit main diagonal, as seen by receivers that normalized by their own
// direct coefficient; requires stars on the diagonal.
GaussianDraw draw_gaussian_normalized(const Pattern& M, double c, SeededRng& rng);

// Session-level transmit power accounting: the block average of |x|^2 over
// the uses of a session must stay within P.
class PowerTracker {
public:
    explicit PowerTracker(double P) : P_(P) {}
    void record(const std::vector<double>& x);
    double average() const { return uses_ == 0 ? 0.0 : total_ / static_cast<double>(uses_); }
    std::uint64_t uses() const { return uses_; }
    bool within_budget() const { return average() <= P_ * (1.0 + 1e-12); }
    // Throws std::runtime_error when the session average exceeds P.
    void check() const;

private:
    double P_;
    double total_ = 0.0;
    std::uint64_t uses_ = 0;
};

std::vector<double> gaussian_apply(const GaussianDraw& draw, const std::vector<double>& x,
                                   PowerTracker& power);

} // namespace nsbc

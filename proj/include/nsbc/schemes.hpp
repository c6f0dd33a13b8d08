#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nsbc/channel.hpp"
#include "nsbc/field.hpp"
#include "nsbc/infotools.hpp"
#include "nsbc/nsbox.hpp"
#include "nsbc/pattern.hpp"
#include "nsbc/rng.hpp"
#include "nsbc/tree.hpp"

namespace nsbc {

struct SchemeRun {
    int K = 0;
    std::vector<std::vector<fe>> messages; // per user
    std::vector<std::vector<fe>> decoded;  // same shape
    std::vector<bool> error;               // per user, any symbol mismatch
    std::vector<double> rate_bits;         // per user

    // one-shot channel transcript for CSV traces (empty when not applicable)
    std::vector<fe> trace_x;
    std::vector<fe> trace_y;
    std::vector<fe> trace_g; // row-major

    bool any_error() const {
        for (const bool e : error)
            if (e) return true;
        return false;
    }
};

// Receiver/antenna ordering under which the pattern is lower triangular with
// stars on the main diagonal: rx[i] is served by antenna tx[i] and hears no
// antenna tx[j] with j > i. Tree patterns use the DFS antenna order
// (preorder, children ascending); other square patterns fall back to the
// triangle-certificate search. Throws when the pattern cannot be put in this
// form.
struct SchemeOrder {
    std::vector<int> rx; // 0-based receiver order
    std::vector<int> tx; // 0-based antenna order
};
SchemeOrder scheme_order(const Pattern& M);

// --- successive encoding with K-1 bipartite OTP boxes (one-shot, n = 1) ---

// Encoder side: messages and box sessions only; the channel draw is never
// visible here (no CSIT beyond the pattern).
std::vector<fe> ns_successive_encode(const SchemeOrder& ord, const Field& F,
                                     const std::vector<fe>& W,
                                     const std::vector<RefereeSession*>& tx_sessions);
// Decoder for position k in the order: its own observation and box session.
fe ns_successive_decode(const SchemeOrder& ord, const Field& F, int k,
                        const ReceiverObservation& obs, RefereeSession* rx_session);

SchemeRun ns_successive(const Pattern& M, const Field& F, const std::vector<fe>& W,
                        SeededRng& rng);

// --- one (K+1)-partite triangular box ---

std::vector<fe> ns_multipartite_encode(const SchemeOrder& ord, const Field& F,
                                       const std::vector<fe>& W, RefereeSession& tx_session);
fe ns_multipartite_decode(const SchemeOrder& ord, const Field& F, int k,
                          const ReceiverObservation& obs, RefereeSession& session);

SchemeRun ns_multipartite(const Pattern& M, const Field& F, const std::vector<fe>& W,
                          SeededRng& rng);

// --- classical TDMA over a tree network ---

// W[k] must hold floor(n * d_k) symbols; each antenna sends its users'
// uncoded symbols inside its burning slot and receivers invert the single
// active coefficient they hear.
SchemeRun classical_tdma(const TreeNetwork& T, const DofTuple& d, const Field& F, int n,
                         const std::vector<std::vector<fe>>& W, SeededRng& rng);

// symbol counts per user for a given blocklength
std::vector<int> tdma_symbol_counts(const TreeNetwork& T, const DofTuple& d, int n);

// --- toy channels ---

// NS scheme on toy1/toy2: both users at rate log2 q, zero error.
SchemeRun toy_ns_run(const ToyChannel& ch, fe w1, fe w2, SeededRng& rng);

// Exact capacity-point certificate for toy1 over GF(3), from the joint pmf
// of (U, X1, X2, Y1, Y2, G) under (X1, X2, U) = (W1, W2 - W1, W2).
struct Toy1CertificateF3 {
    double r1_bits;        // H(Y1)
    double r2_bits;        // I(U; Y2, G)
    double h_y1_given_u;   // H(Y1 | U)
    double sum_bits;       // H(Y1|U) + I(U; Y2, G)
    JointPmf pmf;
};
Toy1CertificateF3 classical_toy1_f3();

// joint of (X, Theta, G, Y) with all three sources uniform over F_q and
// Y = X + G*Theta; the no-assistance baseline for the side-information channel
JointPmf fading_dirt_baseline_joint(const Field& F);

// --- fading dirty paper, one-shot NS scheme ---

// Encoder sees (w, theta), decoder sees (y, g); the box carries the rest.
struct FadingDirtRun {
    fe decoded;
    bool error;
    double rate_bits;
    fe x; // transmitted symbol
    fe y; // channel output
};
FadingDirtRun fading_dirt_ns(const Field& F, fe w, fe theta, fe g, SeededRng& rng);

// --- K-user MAC with side information ---

// One converted channel use: caller supplies xbar, gets ybar. States are
// drawn uniformly per use and a fresh box session carries the conversion.
using ConvertedMacUse = std::function<fe(const std::vector<fe>& xbar)>;

// Runs `inner` against the converted channel. The inner scheme sees only the
// interference-free MAC.
SchemeRun mac_convert(const Field& F, int K, MacBox::InterferenceFn f,
                      const std::function<SchemeRun(const Field&, int, ConvertedMacUse&)>& inner,
                      const std::vector<Rat>& noise_law, SeededRng& rng);

// slotted inner scheme: user k sends its symbol in use k, zero error when the
// noise is identically zero
std::function<SchemeRun(const Field&, int, ConvertedMacUse&)>
slotted_mac_inner(const std::vector<fe>& W);

// Exact total-variation distance between the converted channel law and the
// interference-free law, marginalized over uniform states, for every input.
Rat mac_conversion_tv(const Field& F, int K, MacBox::InterferenceFn f,
                      const std::vector<Rat>& noise_law);

// --- Gaussian channel conversion ---

struct GaussianConvertOptions {
    bool inject_zero_noise = false; // z = 0 for the residual-only check
    bool keep_converted = false;    // retain ybar samples in diagnostics
    double coeff_bound = 2.0;       // c for the nonzero coefficients
};

struct GaussianDiagnostics {
    std::vector<double> zbar_mean;  // per user
    std::vector<double> zbar_var;   // per user, empirical variance
    double average_total_power = 0.0;
    std::uint64_t uses = 0;
    std::vector<std::uint64_t> symbol_errors; // per user, nearest-integer rule
    std::vector<std::vector<double>> converted; // ybar per user when kept
};

struct GaussianRun {
    int modulus = 0;                      // ceil(sqrt(P))
    std::vector<std::vector<int>> decoded;
    GaussianDiagnostics diag;
    double per_user_rate_bits = 0.0;      // log2 ceil(sqrt(P))
    // nominal per-user rate over the DoF normalizer 0.5*log2(P)
    double dof_ratio = 0.0;
};

// Messages in {0..ceil(sqrt(P))-1}, K x n. The pattern must be square with
// stars on the diagonal and zeros above (path or any triangular form); the
// channel runs in receiver-normalized unit-diagonal form.
GaussianRun gaussian_convert(const Pattern& M, double P, int n,
                             const std::vector<std::vector<int>>& W, SeededRng& rng,
                             const GaussianConvertOptions& opts = {});

} // namespace nsbc

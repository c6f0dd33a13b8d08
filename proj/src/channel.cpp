#include "nsbc/channel.hpp"

#include <stdexcept>
#include <string>

namespace nsbc {

ChannelDraw draw_channel(const Pattern& M, const Field& F, SeededRng& rng) {
    ChannelDraw d;
    d.K = M.K();
    d.B = M.B();
    d.G.assign(static_cast<std::size_t>(d.K) * d.B, 0);
    for (int k = 0; k < d.K; ++k)
        for (int b = 0; b < d.B; ++b)
            if (M.star(k, b)) d.at(k, b) = F.uniform_nonzero(rng);
    return d;
}

std::vector<ReceiverObservation> apply_channel(const ChannelDraw& draw, const Field& F,
                                               const std::vector<fe>& x) {
    if (static_cast<int>(x.size()) != draw.B)
        throw std::invalid_argument("apply_channel: input dimension " +
                                    std::to_string(x.size()) + " does not match B = " +
                                    std::to_string(draw.B));
    std::vector<ReceiverObservation> obs(static_cast<std::size_t>(draw.K));
    for (int k = 0; k < draw.K; ++k) {
        fe y = 0;
        for (int b = 0; b < draw.B; ++b) y = F.add(y, F.mul(draw.at(k, b), x[b]));
        obs[k].y = y;
        obs[k].csir = draw.row(k);
    }
    return obs;
}

ChannelDraw normalize_receivers(const ChannelDraw& draw, const Field& F) {
    if (draw.K > draw.B)
        throw std::invalid_argument("normalize_receivers: K > B, no diagonal to normalize");
    ChannelDraw out = draw;
    for (int k = 0; k < draw.K; ++k) {
        const fe diag = draw.at(k, k);
        if (diag == 0)
            throw std::invalid_argument("normalize_receivers: zero diagonal at receiver " +
                                        std::to_string(k + 1));
        const fe s = F.inv(diag);
        for (int b = 0; b < draw.B; ++b) out.at(k, b) = F.mul(s, draw.at(k, b));
    }
    return out;
}

std::pair<ChannelDraw, ChannelDraw> couple_same_marginals(const Pattern& M, const Field& F,
                                                          SeededRng& rng) {
    ChannelDraw original = draw_channel(M, F, rng);
    ChannelDraw scaled = original;
    for (int b = 0; b < M.B(); ++b) {
        const fe lambda = F.uniform_nonzero(rng);
        for (int k = 0; k < M.K(); ++k) scaled.at(k, b) = F.mul(original.at(k, b), lambda);
    }
    return {std::move(original), std::move(scaled)};
}

ToyChannel::Output ToyChannel::transmit(fe x1, fe x2, SeededRng& rng) const {
    return transmit_with_g(x1, x2, field->uniform_nonzero(rng));
}

ToyChannel::Output ToyChannel::transmit_with_g(fe x1, fe x2, fe g) const {
    if (g == 0) throw std::invalid_argument("ToyChannel: fade coefficient must be nonzero");
    Output o;
    o.y1_x1 = x1;
    if (rx1_sees_both) o.y1_x2 = x2;
    o.g = g;
    o.y2 = field->add(field->mul(g, x1), x2);
    return o;
}

ToyChannel make_toy1(const Field& F) { return {&F, false}; }
ToyChannel make_toy2(const Field& F) { return {&F, true}; }

GaussianDraw draw_gaussian(const Pattern& M, double c, SeededRng& rng) {
    if (M.K() != M.B())
        throw std::invalid_argument("draw_gaussian: Gaussian model uses K antennas (K = B)");
    if (c < 1.0) throw std::invalid_argument("draw_gaussian: coefficient bound c must be >= 1");
    GaussianDraw d;
    d.K = M.K();
    d.c = c;
    d.G.assign(static_cast<std::size_t>(d.K) * d.K, 0.0);
    d.z.resize(static_cast<std::size_t>(d.K));
    for (int k = 0; k < d.K; ++k)
        for (int j = 0; j < d.K; ++j)
            if (M.star(k, j)) {
                const double mag = 1.0 / c + (c - 1.0 / c) * rng.uniform01();
                d.at(k, j) = rng.uniform_below(2) == 0 ? mag : -mag;
            }
    for (int k = 0; k < d.K; ++k) d.z[k] = rng.normal();
    return d;
}

GaussianDraw draw_gaussian_normalized(const Pattern& M, double c, SeededRng& rng) {
    GaussianDraw d = draw_gaussian(M, c, rng);
    for (int k = 0; k < d.K; ++k) {
        if (!M.star(k, k))
            throw std::invalid_argument(
                "draw_gaussian_normalized: zero diagonal at receiver " + std::to_string(k + 1));
        d.at(k, k) = 1.0;
    }
    return d;
}

void PowerTracker::record(const std::vector<double>& x) {
    double s = 0.0;
    for (const double v : x) s += v * v;
    total_ += s;
    ++uses_;
}

void PowerTracker::check() const {
    if (!within_budget())
        throw std::runtime_error("power constraint violated: session average " +
                                 std::to_string(average()) + " exceeds P = " +
                                 std::to_string(P_));
}

std::vector<double> gaussian_apply(const GaussianDraw& draw, const std::vector<double>& x,
                                   PowerTracker& power) {
    if (static_cast<int>(x.size()) != draw.K)
        throw std::invalid_argument("gaussian_apply: input dimension mismatch");
    power.record(x);
    std::vector<double> y(static_cast<std::size_t>(draw.K));
    for (int k = 0; k < draw.K; ++k) {
        double s = draw.z[k];
        for (int j = 0; j < draw.K; ++j) s += draw.at(k, j) * x[j];
        y[k] = s;
    }
    return y;
}

} // namespace nsbc

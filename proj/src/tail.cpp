#include "ichaos/tail.hpp"

#include <algorithm>
#include <cmath>

#include "ichaos/errors.hpp"

namespace ichaos {

namespace {

void require_sequence(const MomentSequence& seq) {
    const std::size_t n = seq.orders.size();
    if (seq.moments.size() != n || (!seq.stderrs.empty() && seq.stderrs.size() != n))
        throw ShapeMismatch("moment sequence: parallel arrays disagree");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(seq.moments[i] > 0.0))
            throw Precondition("moment sequence: moments must be positive");
        if (i && seq.orders[i] <= seq.orders[i - 1])
            throw Precondition("moment sequence: orders strictly increasing");
    }
}

}  // namespace

CstarstarFit fit_cstarstar(const MomentSequence& seq) {
    require_sequence(seq);
    const std::size_t n = seq.orders.size();
    if (n < 3) throw TooFewMoments("fit_cstarstar: >= 3 moment orders");
    const double beta2 = seq.beta * seq.beta;

    std::vector<double> x(n), y(n), w(n, 1.0);
    bool weighted = seq.stderrs.size() == n;
    for (std::size_t i = 0; i < n && weighted; ++i) weighted = seq.stderrs[i] > 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double N = seq.orders[i];
        x[i] = 1.0 / N;
        y[i] = (std::log(seq.moments[i]) - (beta2 * N / 2.0) * std::log(N)) / N;
        if (weighted) {
            const double sd = seq.stderrs[i] / seq.moments[i] / N;  // delta method
            w[i] = 1.0 / (sd * sd);
        }
    }
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    CstarstarFit fit;
    fit.b = (sw * swxy - swx * swy) / det;
    fit.c_star_star = (swxx * swy - swx * swxy) / det;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - fit.c_star_star - fit.b * x[i];
        ss += w[i] * e * e;
    }
    fit.residual = std::sqrt(ss / sw);
    return fit;
}

double cstar_from_cstarstar(double beta, double c_star_star) {
    if (!(beta > 0.0) || beta * beta >= 2.0)
        throw BetaOutOfRange("cstar_from_cstarstar: beta in (0, sqrt 2)");
    const double beta2 = beta * beta;
    return (beta2 / 2.0) * std::exp(-1.0 - 2.0 * c_star_star / beta2);
}

double cstarstar_from_cstar(double beta, double c_star) {
    if (!(beta > 0.0) || beta * beta >= 2.0)
        throw BetaOutOfRange("cstarstar_from_cstar: beta in (0, sqrt 2)");
    if (!(c_star > 0.0)) throw Precondition("cstarstar_from_cstar: c_star > 0");
    const double beta2 = beta * beta;
    return -(beta2 / 2.0) * (1.0 + std::log(2.0 * c_star / beta2));
}

TailConstants::TailConstants(double beta_, double c_star_star_)
    : beta(beta_), c_star_star(c_star_star_), c_star(cstar_from_cstarstar(beta_, c_star_star_)) {
    const double back = cstarstar_from_cstar(beta, c_star);
    if (std::abs(back - c_star_star) > 1e-12 * std::max(1.0, std::abs(c_star_star)))
        throw Precondition("TailConstants: defining relation violated");
}

EnvelopePoint markov_envelope(const MomentSequence& seq, double t) {
    require_sequence(seq);
    if (seq.orders.empty()) throw Precondition("markov_envelope: empty sequence");
    if (!(t > 0.0)) throw Precondition("markov_envelope: t > 0");
    EnvelopePoint pt;
    pt.t = t;
    const double log_t = std::log(t);
    bool first = true;
    for (std::size_t i = 0; i < seq.orders.size(); ++i) {
        const double lb = std::log(seq.moments[i]) - 2.0 * seq.orders[i] * log_t;
        if (first || lb < pt.log_envelope) {
            pt.log_envelope = lb;
            pt.n_at_min = seq.orders[i];
            first = false;
        }
    }
    return pt;
}

long k_of_t(double t, double d_star, double alpha) {
    if (!(t > 0.0 && d_star > 0.0 && alpha > 0.0))
        throw Precondition("k_of_t: t, d_star, alpha > 0");
    const double x = d_star * alpha * std::pow(t, alpha);
    return 2 * static_cast<long>(std::ceil(x / 2.0));
}

SurvivalCurve empirical_survival(const std::vector<double>& samples,
                                 const std::vector<double>& t_grid) {
    if (samples.size() < 10000) throw TooFewSamples("empirical_survival: >= 1e4 samples");
    std::vector<double> mags(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) mags[i] = std::abs(samples[i]);
    std::sort(mags.begin(), mags.end());
    const double n = static_cast<double>(mags.size());
    SurvivalCurve curve;
    for (double t : t_grid) {
        const auto it = std::upper_bound(mags.begin(), mags.end(), t);
        const double p = static_cast<double>(mags.end() - it) / n;
        curve.t.push_back(t);
        curve.fraction.push_back(p);
        curve.stderr_.push_back(std::sqrt(p * (1.0 - p) / n));
    }
    return curve;
}

}  // namespace ichaos

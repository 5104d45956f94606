#include "ichaos/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "ichaos/errors.hpp"

namespace ichaos {

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - fit.slope * xs[i] - fit.intercept;
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

}  // namespace

RadiiLadder RadiiLadder::dyadic(double gamma, int depth, double r_max) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Precondition("dyadic ladder: gamma in (0,1)");
    if (depth < 1 || !(r_max > 0.0)) throw Precondition("dyadic ladder: depth >= 1, r_max > 0");
    RadiiLadder l;
    l.radii.resize(depth);
    double r = r_max;
    for (int k = 0; k < depth; ++k, r *= gamma) l.radii[k] = r;
    return l;
}

void RadiiLadder::validate(double spacing) const {
    if (radii.size() < 4) throw LadderTooShort("radii ladder needs >= 4 entries");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (!(radii[i] > radii[i + 1]))
            throw Precondition("radii ladder must be strictly decreasing");
    if (radii.back() < 4.0 * spacing)
        throw QueryTooSmall("radii ladder: min radius >= 4 * lattice spacing");
}

LocalExponent local_exponent(const ChaosField& chaos, Point x, const RadiiLadder& ladder) {
    ladder.validate(chaos.h);
    LocalExponent out;
    std::vector<double> log_r, log_mu;
    for (double r : ladder.radii) {
        const double a = std::abs(integrate_square(chaos, {x, r}));
        out.abs_mu.push_back(a);
        log_r.push_back(std::log(r));
        log_mu.push_back(std::log(a));
    }
    const LineFit fit = least_squares(log_r, log_mu);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.residual = fit.rms;
    return out;
}

LilSeries lil_ratio_series(const ChaosField& chaos, Point x, const RadiiLadder& ladder) {
    ladder.validate(chaos.h);
    if (ladder.radii.front() >= std::exp(-1.0))
        throw RadiusTooLarge("lil_ratio_series: radii must be < 1/e");
    const double beta2 = chaos.params.beta * chaos.params.beta;
    LilSeries s;
    double running = 0.0;
    for (double r : ladder.radii) {
        const double a = std::abs(integrate_square(chaos, {x, r}));
        const double norm = std::pow(r, 2.0 - beta2 / 2.0) *
                            std::pow(std::log(-std::log(r)), beta2 / 4.0);
        const double ratio = a / norm;
        running = std::max(running, ratio);
        s.radii.push_back(r);
        s.abs_mu.push_back(a);
        s.ratio.push_back(ratio);
        s.running_max.push_back(running);
    }
    return s;
}

FastPointReport fast_point_scan(const ChaosField& chaos, double a, int n, double delta) {
    if (!(delta > 0.0 && delta < 0.5))
        throw Precondition("fast_point_scan: delta in (0, 1/2)");
    if (n < 1) throw Precondition("fast_point_scan: n >= 1");
    if (!(a >= 0.0)) throw Precondition("fast_point_scan: a >= 0");

    FastPointReport rep;
    rep.n = n;
    rep.a = a;
    rep.delta = delta;
    rep.r_n = std::pow(2.0, -n);
    rep.window_r = std::pow(rep.r_n, 1.0 - delta);
    if (rep.window_r < 8.0 * chaos.h)
        throw ResolutionExceeded("fast_point_scan: window below 8 lattice spacings");

    const double beta2 = chaos.params.beta * chaos.params.beta;
    rep.threshold = a * std::pow(rep.window_r, 2.0 - beta2 / 2.0) *
                    std::pow(std::abs(std::log(rep.window_r)), beta2 / 4.0);

    // Core: centered square inside the footprint where every window fits.
    const Rect fp = chaos.footprint();
    const double lo = std::max(fp.x0, fp.y0) + rep.window_r;
    const double hi = std::min(fp.x1, fp.y1) - rep.window_r;
    if (!(hi > lo)) throw ResolutionExceeded("fast_point_scan: no room for windows");
    const long i0 = static_cast<long>(std::ceil(lo / rep.r_n));
    const long i1 = static_cast<long>(std::floor(hi / rep.r_n));
    if (i1 < i0) throw ResolutionExceeded("fast_point_scan: empty grid");
    rep.grid_size = i1 - i0 + 1;

    for (long i = i0; i <= i1; ++i)
        for (long j = i0; j <= i1; ++j) {
            const Point x{i * rep.r_n, j * rep.r_n};
            const double m = std::abs(integrate_square(chaos, {x, rep.window_r}));
            if (m >= rep.threshold) ++rep.count;
        }
    return rep;
}

BoxcountFit boxcount_dimension(const std::vector<std::pair<int, long>>& level_counts) {
    std::vector<double> xs, ys;
    for (const auto& [n, count] : level_counts)
        if (count > 0) {
            xs.push_back(static_cast<double>(n));
            ys.push_back(std::log2(static_cast<double>(count)));
        }
    if (xs.size() < 3) throw DegenerateCounts("boxcount_dimension: < 3 nonzero levels");
    BoxcountFit fit;
    fit.dimension = least_squares(xs, ys).slope;
    fit.levels_used = static_cast<int>(xs.size());
    return fit;
}

HolderReport holder_modulus(const ChaosField& chaos, const std::vector<HolderPair>& pairs,
                            double alpha) {
    const double beta2 = chaos.params.beta * chaos.params.beta;
    if (!(alpha > 0.0 && alpha < 1.0 - beta2 / 4.0))
        throw AlphaOutOfRange("holder_modulus: need 0 < alpha < 1 - beta^2/4");
    HolderReport rep;
    for (const HolderPair& p : pairs) {
        const double sep =
            std::sqrt(dist2(p.x, p.x2) + (p.r - p.r2) * (p.r - p.r2));
        if (sep == 0.0) {
            ++rep.exclusions;
            continue;
        }
        const auto va = integrate_square(chaos, {p.x, p.r});
        const auto vb = integrate_square(chaos, {p.x2, p.r2});
        const double denom = std::pow(std::max(p.r, p.r2), alpha) * std::pow(sep, alpha);
        rep.max_ratio = std::max(rep.max_ratio, std::abs(va - vb) / denom);
        ++rep.pairs_used;
    }
    return rep;
}

}  // namespace ichaos

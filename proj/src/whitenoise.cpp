#include "ichaos/whitenoise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ichaos/errors.hpp"
#include "ichaos/moments.hpp"
#include "ichaos/parallel.hpp"
#include "ichaos/rng.hpp"

namespace ichaos {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBatches = 32;

struct BatchMeans {
    double sum[kBatches] = {0};
    long count[kBatches] = {0};

    void add(int b, double v) {
        sum[b] += v;
        count[b] += 1;
    }
    void finish(double& mean, double& se) const {
        double m = 0.0;
        for (int b = 0; b < kBatches; ++b) m += sum[b] / count[b];
        m /= kBatches;
        double var = 0.0;
        for (int b = 0; b < kBatches; ++b) {
            const double d = sum[b] / count[b] - m;
            var += d * d;
        }
        var /= kBatches - 1;
        mean = m;
        se = std::sqrt(var / kBatches);
    }
};

// Radial power-law cluster kernel (same device as the moment engine): draws
// land with density (2-beta^2) r^{-beta^2} / (2 pi diam^{2-beta^2}), keeping
// importance ratios bounded against the pairwise d^{-beta^2} poles.
struct ClusterKernel {
    double diam = 3.0;
    double beta2 = 1.0;

    Point draw(RngStream& rng, Point around) const {
        const double r =
            std::max(diam * std::pow(rng.uniform(), 1.0 / (2.0 - beta2)), 1e-300);
        const double th = 2.0 * kPi * rng.uniform();
        return {around.x + r * std::cos(th), around.y + r * std::sin(th)};
    }
    double density(Point z, Point around) const {
        const double r = dist(z, around);
        if (r >= diam || r == 0.0) return 0.0;
        return (2.0 - beta2) * std::pow(r, -beta2) /
               (2.0 * kPi * std::pow(diam, 2.0 - beta2));
    }
};

struct SquareDomain {
    Point c;  // Q(c, 1): side 2, area 4

    Point draw(RngStream& rng) const {
        return {c.x - 1.0 + 2.0 * rng.uniform(), c.y - 1.0 + 2.0 * rng.uniform()};
    }
    bool contains(Point z) const {
        return z.x >= c.x - 1.0 && z.x <= c.x + 1.0 && z.y >= c.y - 1.0 &&
               z.y <= c.y + 1.0;
    }
};

double cross_ratio(double beta2, Point x, Point y, Point u, Point v) {
    const double num = dist(x, u) * dist(y, v);
    const double den = dist(x, v) * dist(y, u);
    if (num == 0.0) return 0.0;
    if (den == 0.0) return 1e300;
    return std::pow(num / den, beta2);
}

// One importance draw of the inner (x, y, u, v) integral at offset w.
// Secondary points are uniform/cluster mixtures so every d^{-beta^2} pole
// (pair weights and, for overlapping squares, the cross-ratio poles) is
// dominated.  symmetrized: (r + 1/r)/2 - 1 in place of r - 1.
struct InnerDraw {
    double beta2;
    bool symmetrized;

    double sample(RngStream& rng, Point w) const {
        const SquareDomain q0{{0.0, 0.0}}, qw{w};
        const ClusterKernel kern{3.0, beta2};
        const Point x = q0.draw(rng);
        const Point u = qw.draw(rng);

        Point y;
        double qy;
        if (symmetrized) {
            y = rng.uniform() < 0.5 ? q0.draw(rng) : kern.draw(rng, x);
            qy = 0.5 / 4.0 + 0.5 * kern.density(y, x);
        } else {
            const double pick = rng.uniform();
            y = pick < 0.4 ? q0.draw(rng)
                           : kern.draw(rng, pick < 0.7 ? x : u);
            qy = 0.4 / 4.0 + 0.3 * kern.density(y, x) + 0.3 * kern.density(y, u);
        }
        if (!q0.contains(y)) return 0.0;

        Point v;
        double qv;
        if (symmetrized) {
            v = rng.uniform() < 0.5 ? qw.draw(rng) : kern.draw(rng, u);
            qv = 0.5 / 4.0 + 0.5 * kern.density(v, u);
        } else {
            const double pick = rng.uniform();
            v = pick < 0.4 ? qw.draw(rng)
                           : kern.draw(rng, pick < 0.7 ? u : x);
            qv = 0.4 / 4.0 + 0.3 * kern.density(v, u) + 0.3 * kern.density(v, x);
        }
        if (!qw.contains(v)) return 0.0;

        const double dxy = dist(x, y), duv = dist(u, v);
        if (dxy == 0.0 || duv == 0.0) return 0.0;
        const double r = cross_ratio(beta2, x, y, u, v);
        const double core = symmetrized ? 0.5 * (r + 1.0 / r) - 1.0 : r - 1.0;
        // 1/(q_x q_u) = 16 for the two uniform square draws.
        return 16.0 * core / (std::pow(dxy, beta2) * std::pow(duv, beta2) * qy * qv);
    }
};

double sup_norm(Point w) { return std::max(std::abs(w.x), std::abs(w.y)); }

}  // namespace

WField build_wfield(const ChaosField& chaos, double r) {
    if (chaos.source_kind != ModelKind::ExactScaling)
        throw Precondition("build_wfield: stationary exact-scaling chaos required");
    if (chaos.params.norm != Normalization::Wick)
        throw Precondition("build_wfield: Wick normalization required");
    const double h = chaos.h;
    if (!(r >= 4.0 * h)) throw QueryTooSmall("build_wfield: r >= 4 spacings");
    const Rect fp = chaos.footprint();
    if (!(fp.x0 <= -2.0 * r && fp.x1 >= 1.0 + 2.0 * r && fp.y0 <= -2.0 * r &&
          fp.y1 >= 1.0 + 2.0 * r))
        throw FootprintTooSmall("build_wfield: need [0,1]^2 plus a 2r margin");

    const int nw = static_cast<int>(std::lround(1.0 / h));
    if (std::abs(nw * h - 1.0) > 1e-9 * nw)
        throw Precondition("build_wfield: spacing must divide the unit square");
    const int w = static_cast<int>(std::lround(2.0 * r / h));
    const double r_eff = 0.5 * w * h;  // window realized on whole nodes

    const WindowSumGrid grid = window_sums(chaos, w);
    // Window whose center is the first midpoint-lattice node (h/2, h/2).
    const long i0x = std::lround((0.5 * h - grid.first_center.x) / h);
    const long i0y = std::lround((0.5 * h - grid.first_center.y) / h);
    if (i0x < 0 || i0y < 0 || i0x + nw > grid.nx || i0y + nw > grid.ny)
        throw FootprintTooSmall("build_wfield: window scan leaves the lattice");

    const double beta2 = chaos.params.beta * chaos.params.beta;
    const MomentEstimate m2 = moment2_lattice_exact(chaos, w);
    const double weight = std::pow(chaos.model_R, -beta2);
    const double pref = std::pow(r_eff, beta2 - 5.0) * weight;

    WField wf;
    wf.n = nw;
    wf.h = h;
    wf.r = r_eff;
    wf.m2 = m2.value;
    wf.weight = weight;
    wf.values.assign(static_cast<std::size_t>(nw) * nw, 0.0);
    for (int ix = 0; ix < nw; ++ix) {
        const std::complex<double>* src =
            &grid.sums[static_cast<std::size_t>(i0x + ix) * grid.ny + i0y];
        double* dst = &wf.values[static_cast<std::size_t>(ix) * nw];
        for (int iy = 0; iy < nw; ++iy)
            dst[iy] = pref * (std::norm(src[iy]) - m2.value);
    }
    return wf;
}

AEstimate estimate_A(double beta, long n_pts, double w_cutoff, std::uint64_t seed,
                     double split_radius) {
    if (!(beta > 0.0) || beta * beta >= 2.0)
        throw BetaOutOfRange("estimate_A: beta^2 must lie in (0, 2)");
    if (!(w_cutoff >= 8.0)) throw Precondition("estimate_A: w_cutoff >= 8");
    if (!(split_radius >= 2.0 && split_radius <= 0.5 * w_cutoff))
        throw Precondition("estimate_A: split_radius in [2, w_cutoff/2]");
    if (n_pts < 10000) throw Precondition("estimate_A: n_pts >= 1e4");
    const double beta2 = beta * beta;

    // Region split in the square norm: the two unit-half-side squares overlap
    // exactly when |w|_inf < 2, where the raw integrand and its cross-ratio
    // poles need the full importance mixture.  Beyond, the symmetrized
    // integrand (r + 1/r - 2)/2 >= 0 decays like |w|^{-4}.
    const double split = split_radius;
    const InnerDraw raw{beta2, false};
    const InnerDraw sym{beta2, true};
    const double z_rho =
        0.5 * (1.0 / (split * split) - 1.0 / (w_cutoff * w_cutoff));

    struct Slot {
        double near_sum = 0.0, mid_sum = 0.0, tail_sum = 0.0;
        long near_n = 0, mid_n = 0, tail_n = 0;
    };
    std::vector<Slot> slots(kBatches);
    const long per_batch = std::max<long>(1, n_pts / (2 * kBatches));

    parallel_for(kBatches, 0, [&](std::size_t b) {
        RngStream rng(mix64(seed, campaign_tag::kLibrary, b));
        Slot& s = slots[b];
        for (long k = 0; k < per_batch; ++k) {
            // near: w uniform over the box |w|_inf <= split.
            const Point w{split * (2.0 * rng.uniform() - 1.0),
                          split * (2.0 * rng.uniform() - 1.0)};
            s.near_sum += 4.0 * split * split * raw.sample(rng, w);
            s.near_n += 1;
        }
        for (long k = 0; k < per_batch; ++k) {
            // mid: radial density ~ rho^{-3} on (split, w_cutoff], angle
            // uniform; the |w|_inf <= split sliver belongs to the near region.
            const double uu = rng.uniform();
            const double rho = 1.0 / std::sqrt(1.0 / (split * split) - 2.0 * z_rho * uu);
            const double th = 2.0 * kPi * rng.uniform();
            const Point w{rho * std::cos(th), rho * std::sin(th)};
            const double qw = std::pow(rho, -4.0) / (2.0 * kPi * z_rho);
            double fw = 0.0;
            if (sup_norm(w) > split) fw = sym.sample(rng, w);
            s.mid_sum += fw / qw;
            s.mid_n += 1;
            if (rho >= 0.5 * w_cutoff) {
                // local |w|^4-flatness window feeding the tail extrapolation
                s.tail_sum += fw * rho * rho * rho * rho;
                s.tail_n += 1;
            }
        }
    });

    BatchMeans near, mid, tail;
    for (int b = 0; b < kBatches; ++b) {
        near.sum[b] = slots[b].near_sum;
        near.count[b] = slots[b].near_n;
        mid.sum[b] = slots[b].mid_sum;
        mid.count[b] = slots[b].mid_n;
        tail.sum[b] = slots[b].tail_sum;
        tail.count[b] = std::max<long>(1, slots[b].tail_n);
    }
    double near_mean, near_se, mid_mean, mid_se, a_mean, a_se;
    near.finish(near_mean, near_se);
    mid.finish(mid_mean, mid_se);
    tail.finish(a_mean, a_se);

    AEstimate est;
    est.split_radius = split;
    est.w_cutoff = w_cutoff;
    est.seed = seed;
    est.n_evals = 2 * per_batch * kBatches;
    est.near_part = near_mean;
    est.mid_part = mid_mean;
    est.tail_coefficient = a_mean;
    est.tail_part = a_mean * kPi / (w_cutoff * w_cutoff);
    est.inv_A = est.near_part + est.mid_part + est.tail_part;
    const double tail_se = a_se * kPi / (w_cutoff * w_cutoff);
    const double inv_se =
        std::sqrt(near_se * near_se + mid_se * mid_se + tail_se * tail_se);
    if (!(est.inv_A > 0.0))
        throw NegativeIntegral("estimate_A: nonpositive integral estimate");
    est.A = 1.0 / est.inv_A;
    est.stderr_ = inv_se / (est.inv_A * est.inv_A);
    return est;
}

double wfield_cov_kernel(double beta, Point w, long n_pts, std::uint64_t seed) {
    if (!(beta > 0.0) || beta * beta >= 2.0)
        throw BetaOutOfRange("wfield_cov_kernel: beta^2 must lie in (0, 2)");
    if (n_pts < 1000) throw Precondition("wfield_cov_kernel: n_pts >= 1e3");
    const InnerDraw sym{beta * beta, true};
    RngStream rng(seed);
    double s = 0.0;
    for (long k = 0; k < n_pts; ++k) s += sym.sample(rng, w);
    return s / static_cast<double>(n_pts);
}

double Sheet::at(double s, double t) const {
    const double xs = std::clamp(s / h, 0.0, static_cast<double>(n));
    const double ts = std::clamp(t / h, 0.0, static_cast<double>(n));
    const int i = std::min(static_cast<int>(xs), n - 1);
    const int j = std::min(static_cast<int>(ts), n - 1);
    const double fx = xs - i, fy = ts - j;
    const std::size_t row = static_cast<std::size_t>(n) + 1;
    const double p00 = prefix[i * row + j], p10 = prefix[(i + 1) * row + j];
    const double p01 = prefix[i * row + j + 1], p11 = prefix[(i + 1) * row + j + 1];
    const double interp = (1.0 - fx) * ((1.0 - fy) * p00 + fy * p01) +
                          fx * ((1.0 - fy) * p10 + fy * p11);
    return sqrtA * interp;
}

double Sheet::increment(double s0, double s1, double t0, double t1) const {
    return at(s1, t1) - at(s0, t1) - at(s1, t0) + at(s0, t0);
}

Sheet build_sheet(const WField& wf, double A) {
    if (!(A > 0.0)) throw Precondition("build_sheet: A > 0");
    Sheet sh;
    sh.n = wf.n;
    sh.h = wf.h;
    sh.r = wf.r;
    sh.sqrtA = std::sqrt(A);
    const std::size_t row = static_cast<std::size_t>(wf.n) + 1;
    sh.prefix.assign(row * row, 0.0);
    const double h2 = wf.h * wf.h;
    for (int i = 1; i <= wf.n; ++i)
        for (int j = 1; j <= wf.n; ++j)
            sh.prefix[i * row + j] = h2 * wf.values[static_cast<std::size_t>(i - 1) * wf.n + j - 1] +
                                     sh.prefix[(i - 1) * row + j] +
                                     sh.prefix[i * row + j - 1] -
                                     sh.prefix[(i - 1) * row + j - 1];
    return sh;
}

std::vector<VarianceProbe> variance_test(
    const std::vector<Sheet>& sheets,
    const std::vector<std::pair<double, double>>& probes) {
    if (sheets.size() < 200)
        throw TooFewReplicas("variance_test: >= 200 sheets required");
    std::vector<VarianceProbe> out;
    out.reserve(probes.size());
    const double nn = static_cast<double>(sheets.size());
    const double extent = sheets[0].n * sheets[0].h;
    for (const auto& [s, t] : probes) {
        // W is stationary, so the squared increments over the disjoint
        // congruent rectangles tiling the sheet are identically distributed
        // with mean E B(s,t)^2; averaging them sharpens the per-sheet probe.
        const int ks = std::max(1, static_cast<int>(std::floor(extent / s + 1e-9)));
        const int kt = std::max(1, static_cast<int>(std::floor(extent / t + 1e-9)));
        double m = 0.0, m2 = 0.0;
        for (const Sheet& sh : sheets) {
            double b2 = 0.0;
            for (int a = 0; a < ks; ++a)
                for (int b = 0; b < kt; ++b) {
                    const double inc =
                        sh.increment(a * s, (a + 1) * s, b * t, (b + 1) * t);
                    b2 += inc * inc;
                }
            b2 /= static_cast<double>(ks) * kt;
            m += b2;
            m2 += b2 * b2;
        }
        m /= nn;
        m2 /= nn;
        VarianceProbe p;
        p.s = s;
        p.t = t;
        p.mean_b2 = m;
        p.stderr_ = std::sqrt(std::max(0.0, m2 - m * m) / nn);
        p.ratio = s * t > 0.0 ? m / (s * t) : 0.0;
        out.push_back(p);
    }
    return out;
}

IndependenceReport independence_test(const std::vector<Sheet>& sheets,
                                     std::pair<double, double> inner,
                                     std::pair<double, double> outer) {
    if (inner.first > outer.first || inner.second > outer.second)
        throw BadNesting("independence_test: inner probe must nest in outer");
    if (inner == outer)
        throw Degenerate("independence_test: increment is identically zero");
    if (sheets.size() < 8)
        throw TooFewReplicas("independence_test: >= 8 sheets required");

    const std::size_t nn = sheets.size();
    std::vector<double> x(nn), y(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        y[i] = sheets[i].at(inner.first, inner.second);
        x[i] = sheets[i].at(outer.first, outer.second) - y[i];
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < nn; ++i) mx += x[i], my += y[i];
    mx /= nn;
    my /= nn;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw Degenerate("independence_test: a probe has zero variance");

    IndependenceReport rep;
    rep.n = static_cast<long>(nn);
    rep.correlation = sxy / std::sqrt(sxx * syy);
    rep.corr_stderr = 1.0 / std::sqrt(static_cast<double>(nn));  // null se

    // Distance correlation with double-centered distance matrices.
    std::vector<double> ax(nn * nn), ay(nn * nn);
    auto center = [&](std::vector<double>& a, const std::vector<double>& z) {
        std::vector<double> rowm(nn, 0.0);
        double grand = 0.0;
        for (std::size_t i = 0; i < nn; ++i)
            for (std::size_t j = 0; j < nn; ++j) {
                const double d = std::abs(z[i] - z[j]);
                a[i * nn + j] = d;
                rowm[i] += d / nn;
                grand += d / (static_cast<double>(nn) * nn);
            }
        for (std::size_t i = 0; i < nn; ++i)
            for (std::size_t j = 0; j < nn; ++j)
                a[i * nn + j] += grand - rowm[i] - rowm[j];
    };
    center(ax, x);
    center(ay, y);
    double dxy = 0.0, dxx = 0.0, dyy = 0.0;
    for (std::size_t k = 0; k < nn * nn; ++k) {
        dxy += ax[k] * ay[k];
        dxx += ax[k] * ax[k];
        dyy += ay[k] * ay[k];
    }
    rep.distance_correlation =
        dxx > 0.0 && dyy > 0.0 ? std::sqrt(std::max(0.0, dxy) / std::sqrt(dxx * dyy))
                               : 0.0;
    return rep;
}

CrossScaleReport cross_scale_test(const std::vector<Sheet>& sheets_r,
                                  const std::vector<Sheet>& sheets_s) {
    if (sheets_r.empty() || sheets_r.size() != sheets_s.size())
        throw ShapeMismatch("cross_scale_test: matched nonempty sheet lists");
    for (std::size_t i = 0; i < sheets_r.size(); ++i)
        if (sheets_r[i].r > sheets_s[i].r)
            throw BadScales("cross_scale_test: needs r <= s per pair");

    const double nn = static_cast<double>(sheets_r.size());
    CrossScaleReport rep;
    double c2 = 0.0;
    for (std::size_t i = 0; i < sheets_r.size(); ++i) {
        const double br = sheets_r[i].at(1.0, 1.0);
        const double bs = sheets_s[i].at(1.0, 1.0);
        rep.cross += br * bs / nn;
        c2 += br * bs * br * bs / nn;
        rep.diff2 += (br - bs) * (br - bs) / nn;
        rep.var_r += br * br / nn;
        rep.var_s += bs * bs / nn;
    }
    rep.cross_stderr = std::sqrt(std::max(0.0, c2 - rep.cross * rep.cross) / nn);
    return rep;
}

}  // namespace ichaos

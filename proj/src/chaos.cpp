#include "ichaos/chaos.hpp"

#include <cmath>

#include <gsl/gsl_sf_bessel.h>

#include "ichaos/errors.hpp"

namespace ichaos {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_beta(double beta) {
    if (!(beta >= 0.0) || beta * beta >= 2.0)
        throw BetaOutOfRange("chaos: beta^2 must lie in [0, 2)");
}

// Var Gamma_eps on the tensor grid xs x ys:
//   sum_{mn} w_mn sin^2(m pi x) sin^2(n pi y),  w_mn = 8 pi J0(eps
//   sqrt(lambda))^2 / lambda,
// expanded through sin^2 = (1 - cos 2t)/2 so the double sum splits into a
// constant, two marginals and one eval_grid-shaped tensor contraction.
std::vector<double> wick_variance_grid(const SpectralField& f,
                                       const std::vector<double>& xs,
                                       const std::vector<double>& ys, double eps) {
    const int M = f.modes;
    const std::size_t gx = xs.size(), gy = ys.size();

    double total = 0.0;
    std::vector<double> margx(M + 1, 0.0), margy(M + 1, 0.0);
    std::vector<double> cy(static_cast<std::size_t>(M) * gy);
    for (std::size_t iy = 0; iy < gy; ++iy)
        for (int n = 1; n <= M; ++n)
            cy[static_cast<std::size_t>(n - 1) * gy + iy] = std::cos(2.0 * n * kPi * ys[iy]);

    // T[m-1][iy] = sum_n w_mn cos(2 n pi y)
    std::vector<double> T(static_cast<std::size_t>(M) * gy, 0.0);
    for (int m = 1; m <= M; ++m) {
        double* tm = &T[static_cast<std::size_t>(m - 1) * gy];
        for (int n = 1; n <= M; ++n) {
            const double lambda =
                kPi * kPi * (static_cast<double>(m) * m + static_cast<double>(n) * n);
            double w = 8.0 * kPi / lambda;
            if (eps > 0.0) {
                const double j0 = gsl_sf_bessel_J0(eps * std::sqrt(lambda));
                w *= j0 * j0;
            }
            total += w;
            margx[m] += w;
            margy[n] += w;
            const double* cyn = &cy[static_cast<std::size_t>(n - 1) * gy];
            for (std::size_t iy = 0; iy < gy; ++iy) tm[iy] += w * cyn[iy];
        }
    }

    std::vector<double> out(gx * gy, 0.0);
    for (std::size_t ix = 0; ix < gx; ++ix) {
        double* dst = &out[ix * gy];
        double base = total;
        for (int m = 1; m <= M; ++m) base -= margx[m] * std::cos(2.0 * m * kPi * xs[ix]);
        for (std::size_t iy = 0; iy < gy; ++iy) dst[iy] = base;
        for (int n = 1; n <= M; ++n) {
            const double* cyn = &cy[static_cast<std::size_t>(n - 1) * gy];
            for (std::size_t iy = 0; iy < gy; ++iy) dst[iy] -= margy[n] * cyn[iy];
        }
        for (int m = 1; m <= M; ++m) {
            const double cm = std::cos(2.0 * m * kPi * xs[ix]);
            const double* tm = &T[static_cast<std::size_t>(m - 1) * gy];
            for (std::size_t iy = 0; iy < gy; ++iy) dst[iy] += cm * tm[iy];
        }
        for (std::size_t iy = 0; iy < gy; ++iy) dst[iy] *= 0.25;
    }
    return out;
}

}  // namespace

ChaosField build_chaos(const SpectralField& f, ChaosParams params, int grid) {
    require_beta(params.beta);
    if (grid < 2) throw Precondition("build_chaos: grid >= 2");
    if (params.eps >= 0.5)
        throw DiscOutsideDomain("build_chaos: eps-discs must fit inside the square");
    const double h = (1.0 - 2.0 * params.eps) / grid;
    if (params.eps < 2.0 * h)
        throw EpsTooSmall("build_chaos: eps < 2h underresolves the regularization");

    ChaosField c;
    c.n = grid;
    c.h = h;
    c.origin = {params.eps, params.eps};
    c.params = params;
    c.source_seed = f.seed;
    c.source_kind = ModelKind::DirichletSquare;
    c.model_R = 0.0;

    std::vector<double> xs(grid), ys(grid);
    for (int i = 0; i < grid; ++i) {
        xs[i] = c.origin.x + (i + 0.5) * h;
        ys[i] = c.origin.y + (i + 0.5) * h;
    }
    const std::vector<double> gamma = eval_grid(f, xs, ys, params.eps);

    c.values.resize(gamma.size());
    const double beta = params.beta;
    if (params.norm == Normalization::PowerLaw) {
        const double amp = std::pow(params.eps, -beta * beta / 2.0);
        for (std::size_t k = 0; k < gamma.size(); ++k)
            c.values[k] = std::polar(amp, beta * gamma[k]);
    } else {
        const std::vector<double> var = wick_variance_grid(f, xs, ys, params.eps);
        for (std::size_t k = 0; k < gamma.size(); ++k)
            c.values[k] = std::polar(std::exp(beta * beta * var[k] / 2.0), beta * gamma[k]);
    }
    return c;
}

ChaosField build_chaos(const LatticeField& f, ChaosParams params) {
    require_beta(params.beta);
    if (f.n < 2 || f.values.empty()) throw Precondition("build_chaos: empty lattice field");

    params.eps = f.cutoff;  // the field's intrinsic small-scale cutoff
    ChaosField c;
    c.n = f.n;
    c.h = f.h;
    c.origin = f.origin;
    c.params = params;
    c.source_seed = f.seed;
    c.source_kind = ModelKind::ExactScaling;
    c.model_R = f.R;

    const double beta = params.beta;
    const double amp = params.norm == Normalization::PowerLaw
                           ? std::pow(f.cutoff, -beta * beta / 2.0)
                           : std::exp(beta * beta * (std::log(f.R / f.cutoff) + 2.0) / 2.0);
    c.values.resize(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k)
        c.values[k] = std::polar(amp, beta * f.values[k]);
    return c;
}

namespace {

// First and last node indices whose centers fall in [lo, hi) along one axis.
// Index arithmetic is done in exact node coordinates with a fix-up pass so
// that the half-open convention partitions aligned queries without double
// counting.
struct AxisRange {
    int lo = 0, hi = -1;  // inclusive
};

AxisRange axis_range(double origin, double h, int n, double lo, double hi) {
    const auto node = [&](int i) { return origin + (i + 0.5) * h; };
    int a = static_cast<int>(std::ceil((lo - origin) / h - 0.5));
    a = std::max(a, 0);
    while (a < n && node(a) < lo) ++a;
    while (a > 0 && node(a - 1) >= lo) --a;
    int b = static_cast<int>(std::floor((hi - origin) / h - 0.5));
    b = std::min(b, n - 1);
    while (b >= 0 && node(b) >= hi) --b;
    while (b + 1 < n && node(b + 1) < hi) ++b;
    return {a, b};
}

}  // namespace

std::complex<double> integrate_square(const ChaosField& c, SquareQuery q) {
    if (q.r <= 0.0) throw QueryTooSmall("integrate_square: r > 0");
    if (2.0 * q.r < 4.0 * c.h)
        throw QueryTooSmall("integrate_square: window must span at least 4 lattice cells");
    const Rect fp = c.footprint();
    const Rect box = rect_of(q);
    if (!(box.x0 >= fp.x0 && box.x1 <= fp.x1 && box.y0 >= fp.y0 && box.y1 <= fp.y1))
        throw QueryOutsideFootprint("integrate_square: query leaves the lattice footprint");

    const AxisRange ix = axis_range(c.origin.x, c.h, c.n, box.x0, box.x1);
    const AxisRange iy = axis_range(c.origin.y, c.h, c.n, box.y0, box.y1);
    std::complex<double> sum = 0.0;
    for (int i = ix.lo; i <= ix.hi; ++i) {
        std::complex<double> row = 0.0;
        const std::complex<double>* base = &c.values[static_cast<std::size_t>(i) * c.n];
        for (int j = iy.lo; j <= iy.hi; ++j) row += base[j];
        sum += row;
    }
    return c.h * c.h * sum;
}

std::complex<double> integrate_test_function(const ChaosField& c,
                                             const std::vector<double>& f) {
    if (f.size() != c.values.size())
        throw ShapeMismatch("integrate_test_function: sample count mismatch");
    std::complex<double> sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) sum += c.values[k] * f[k];
    return c.h * c.h * sum;
}

WindowSumGrid window_sums(const ChaosField& c, int w) {
    if (w < 1 || w > c.n) throw Precondition("window_sums: 1 <= w <= n");
    WindowSumGrid g;
    g.nx = c.n - w + 1;
    g.ny = c.n - w + 1;
    g.w = w;
    g.h = c.h;
    g.first_center = {c.origin.x + 0.5 * w * c.h, c.origin.y + 0.5 * w * c.h};
    g.sums.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);

    // Fresh sums per band and per window (no sliding-window cancellation
    // drift; identical windows always produce identical values).
    std::vector<std::complex<double>> colsum(c.n);
    const double h2 = c.h * c.h;
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int j = 0; j < c.n; ++j) {
            std::complex<double> s = 0.0;
            for (int i = ix; i < ix + w; ++i)
                s += c.values[static_cast<std::size_t>(i) * c.n + j];
            colsum[j] = s;
        }
        std::complex<double>* dst = &g.sums[static_cast<std::size_t>(ix) * g.ny];
        for (int iy = 0; iy < g.ny; ++iy) {
            std::complex<double> acc = 0.0;
            for (int j = iy; j < iy + w; ++j) acc += colsum[j];
            dst[iy] = h2 * acc;
        }
    }
    return g;
}

}  // namespace ichaos

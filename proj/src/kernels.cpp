#include "ichaos/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_ellint.h>
#include <gsl/gsl_sf_elljac.h>
#include <gsl/gsl_sf_expint.h>

#include "ichaos/errors.hpp"

namespace ichaos {

namespace {

constexpr double kPi = 3.14159265358979323846;

// GSL must not abort the process; statuses are handled at call sites.
struct GslQuiet {
    GslQuiet() { gsl_set_error_handler_off(); }
};
const GslQuiet gsl_quiet_;

double expint_e1(double x) {
    if (x > 700.0) return 0.0;  // below double underflow, exactly 0 to us
    gsl_sf_result r;
    const int status = gsl_sf_expint_E1_e(x, &r);
    if (status == GSL_EUNDRFLW) return 0.0;
    return r.val;
}

void require_interior(Point p) {
    if (!inside_open_unit_square(p)) throw OutOfDomain("point outside the open unit square");
}

// Canonical argument order makes every kernel symmetric bit-for-bit.
void canonicalize(Point& x, Point& y) {
    if (y.x < x.x || (y.x == x.x && y.y < x.y)) std::swap(x, y);
}

// ------------------ conformal map of the square onto the half plane -------

// Modulus with K'(m)/K(m) = 2, so that sn(2Kz - K, m) maps the open unit
// square {0 < Re z < 1, 0 < Im z < 1} onto the upper half plane.
constexpr double kMapModulus = 0.02943725152285941437973531;

double map_quarter_period() {
    static const double K =
        gsl_sf_ellint_Kcomp(std::sqrt(kMapModulus), GSL_PREC_DOUBLE);
    return K;
}

struct JacobiTriple {
    std::complex<double> sn, cn, dn;
};

// Jacobi functions of complex argument u + iv via the real-argument values
// at parameters m and 1-m.
JacobiTriple complex_jacobi(double u, double v, double m) {
    double su, cu, du, sv, cv, dv;
    gsl_sf_elljac_e(u, m, &su, &cu, &du);
    gsl_sf_elljac_e(v, 1.0 - m, &sv, &cv, &dv);
    const double denom = cv * cv + m * su * su * sv * sv;
    JacobiTriple t;
    t.sn = std::complex<double>(su * dv, cu * du * sv * cv) / denom;
    t.cn = std::complex<double>(cu * cv, -su * du * sv * dv) / denom;
    t.dn = std::complex<double>(du * cv * dv, -m * su * cu * sv) / denom;
    return t;
}

// zeta(z) and zeta'(z) for z = p.x + i p.y in the open unit square.
void map_to_half_plane(Point p, std::complex<double>& zeta,
                       std::complex<double>& dzeta) {
    const double K = map_quarter_period();
    const JacobiTriple t = complex_jacobi(2.0 * K * p.x - K, 2.0 * K * p.y, kMapModulus);
    zeta = t.sn;
    dzeta = 2.0 * K * t.cn * t.dn;
}

// ------------------------- damped eigenfunction series --------------------

// G = (8/pi) sum e^{-pi^2(m^2+n^2) t0} sin sin sin sin / (m^2+n^2)
//   + (1/2) [E1(d^2/4t0) - sum_edges E1 + sum_corners E1],
// the E1 block being the exact short-time heat integral with the first
// image ring.  t0 = 36/(pi M)^2 keeps both truncation tails below 1e-14.
double green_series(Point x, Point y, int modes) {
    const double t0 = 36.0 / (kPi * kPi * static_cast<double>(modes) * modes);

    std::vector<double> ax(modes + 1), ay(modes + 1);
    for (int m = 1; m <= modes; ++m) {
        const double damp = std::exp(-kPi * kPi * m * m * t0);
        ax[m] = damp * std::sin(m * kPi * x.x) * std::sin(m * kPi * y.x);
        ay[m] = damp * std::sin(m * kPi * x.y) * std::sin(m * kPi * y.y);
    }
    double series = 0.0;
    for (int m = modes; m >= 1; --m) {
        if (std::abs(ax[m]) < 1e-300) continue;
        double row = 0.0;
        const double m2 = static_cast<double>(m) * m;
        for (int n = modes; n >= 1; --n)
            row += ay[n] / (m2 + static_cast<double>(n) * n);
        series += ax[m] * row;
    }
    series *= 8.0 / kPi;

    const auto e1_at = [&](double px, double py) {
        const double dx = x.x - px, dy = x.y - py;
        return expint_e1((dx * dx + dy * dy) / (4.0 * t0));
    };
    double shorttime = e1_at(y.x, y.y);
    shorttime -= e1_at(-y.x, y.y) + e1_at(2.0 - y.x, y.y) + e1_at(y.x, -y.y) +
                 e1_at(y.x, 2.0 - y.y);
    shorttime += e1_at(-y.x, -y.y) + e1_at(2.0 - y.x, -y.y) +
                 e1_at(-y.x, 2.0 - y.y) + e1_at(2.0 - y.x, 2.0 - y.y);
    return series + 0.5 * shorttime;
}

}  // namespace

double green_dirichlet_square(Point x, Point y, int modes) {
    if (modes < 64) throw Precondition("green_dirichlet_square: modes >= 64");
    require_interior(x);
    require_interior(y);
    if (x.x == y.x && x.y == y.y) throw CoincidentPoints("green_dirichlet_square");
    canonicalize(x, y);
    return green_series(x, y, modes);
}

double green_dirichlet_square_fast(Point x, Point y) {
    require_interior(x);
    require_interior(y);
    if (x.x == y.x && x.y == y.y) throw CoincidentPoints("green_dirichlet_square_fast");
    canonicalize(x, y);
    std::complex<double> zx, dzx, zy, dzy;
    map_to_half_plane(x, zx, dzx);
    map_to_half_plane(y, zy, dzy);
    return std::log(std::abs(zx - std::conj(zy))) - std::log(std::abs(zx - zy));
}

double log_conformal_radius_square(Point x, int modes) {
    require_interior(x);
    const double d = 2e-4;
    const auto probe = [&](double off) {
        double sum = 0.0;
        int used = 0;
        const Point dirs[2] = {{off, 0.0}, {0.0, off}};
        for (const Point& e : dirs) {
            const Point plus{x.x + e.x, x.y + e.y};
            const Point minus{x.x - e.x, x.y - e.y};
            if (!inside_open_unit_square(plus) || !inside_open_unit_square(minus))
                continue;
            sum += 0.5 * (green_series(x, plus, modes) + green_series(x, minus, modes));
            ++used;
        }
        if (used == 0) throw OutOfDomain("log_conformal_radius_square: point too close to the boundary");
        return sum / used + std::log(off);
    };
    const double f1 = probe(d);
    const double f2 = probe(d / 2.0);
    return (4.0 * f2 - f1) / 3.0;
}

double log_conformal_radius_square_fast(Point x) {
    require_interior(x);
    std::complex<double> zeta, dzeta;
    map_to_half_plane(x, zeta, dzeta);
    return std::log(2.0 * zeta.imag()) - std::log(std::abs(dzeta));
}

double cov_exact_scaling(Point x, Point y, double R) {
    if (R <= 0.0) throw Precondition("cov_exact_scaling: R > 0");
    const double d = dist(x, y);
    if (d == 0.0) return kCovInfinity;
    return std::max(0.0, std::log(R / d));
}

double cov_star_scale_cutoff(Point x, Point y, double s, double t, double R) {
    if (!(s > 0.0 && s <= R && t > 0.0 && t <= R))
        throw BadCutoff("cov_star_scale_cutoff: need s, t in (0, R]");
    const double d = dist(x, y);
    const double u = std::max({s, t, d});
    return std::max(0.0, std::log(R / u)) + 2.0 - 2.0 * std::sqrt(d / u);
}

double star_scale_seed_kernel(double d) {
    if (d >= 1.0) return 0.0;
    if (d <= 0.0) return 1.0;
    return (2.0 / kPi) * (std::acos(d) - d * std::sqrt(1.0 - d * d));
}

namespace {

struct ScaleIntegrand {
    double d, R, delta;
};

double scale_integrand(double s, void* params) {
    const auto* p = static_cast<const ScaleIntegrand*>(params);
    return star_scale_seed_kernel(s) * (1.0 - std::pow(p->d / (p->R * s), p->delta)) / s;
}

}  // namespace

double star_scale_model_cov(double d, double R, double delta) {
    if (R <= 0.0 || delta <= 0.0) throw Precondition("star_scale_model_cov: R, delta > 0");
    if (d >= R) return 0.0;
    if (d == 0.0) return kCovInfinity;

    static thread_local gsl_integration_workspace* ws =
        gsl_integration_workspace_alloc(2048);
    ScaleIntegrand p{d, R, delta};
    gsl_function f;
    f.function = &scale_integrand;
    f.params = &p;
    double result = 0.0, abserr = 0.0;
    const int status = gsl_integration_qag(&f, d / R, 1.0, 1e-12, 1e-10, 2048,
                                           GSL_INTEG_GAUSS31, ws, &result, &abserr);
    if (status != 0 && std::abs(abserr) > 1e-8 * std::max(1.0, std::abs(result)))
        throw SolverDiverged(abserr, "star_scale_model_cov quadrature");
    return result;
}

double CovarianceModel::cov(Point x, Point y) const {
    switch (kind) {
        case ModelKind::DirichletSquare:
            return green_dirichlet_square_fast(x, y);
        case ModelKind::ExactScaling:
            return cov_exact_scaling(x, y, R);
        case ModelKind::StarScale:
            return star_scale_model_cov(dist(x, y), R, delta);
    }
    return 0.0;
}

double CovarianceModel::cov_primed(Point x, Point y) const {
    if (kind != ModelKind::DirichletSquare) return cov(x, y);
    return green_dirichlet_square_fast(x, y) -
           0.5 * (log_conformal_radius_square_fast(x) +
                  log_conformal_radius_square_fast(y));
}

double CovarianceModel::smooth_diagonal(Point x) const {
    if (kind == ModelKind::DirichletSquare) return log_conformal_radius_square_fast(x);
    return std::log(R);
}

namespace {

std::vector<Point> pooled_points(const Configuration& cfg) {
    std::vector<Point> z;
    z.reserve(cfg.xs.size() + cfg.ys.size());
    z.insert(z.end(), cfg.xs.begin(), cfg.xs.end());
    z.insert(z.end(), cfg.ys.begin(), cfg.ys.end());
    return z;
}

void require_distinct(const std::vector<Point>& z) {
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (z[i].x == z[j].x && z[i].y == z[j].y)
                throw CoincidentPoints("interaction energy: duplicate pooled point");
}

}  // namespace

double interaction_energy(const CovarianceModel& model, const Configuration& cfg,
                          bool primed) {
    const std::vector<Point> z = pooled_points(cfg);
    require_distinct(z);
    for (const Point& p : z)
        if (!model.point_ok(p)) throw OutOfDomain("interaction energy: point outside model domain");

    const auto c = [&](Point a, Point b) {
        return primed ? model.cov_primed(a, b) : model.cov(a, b);
    };
    double e = 0.0;
    for (std::size_t i = 0; i < cfg.xs.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.xs.size(); ++j)
            e -= c(cfg.xs[i], cfg.xs[j]);
    for (std::size_t i = 0; i < cfg.ys.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.ys.size(); ++j)
            e -= c(cfg.ys[i], cfg.ys[j]);
    for (const Point& a : cfg.xs)
        for (const Point& b : cfg.ys) e += c(a, b);
    return e;
}

namespace {

double nearest_neighbor_log_sum(const std::vector<Point>& z) {
    double sum = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        double best = kCovInfinity;
        for (std::size_t i = 0; i < z.size(); ++i)
            if (i != j) best = std::min(best, dist(z[i], z[j]));
        sum += std::log(best);
    }
    return sum;
}

}  // namespace

double onsager_margin(const CovarianceModel& model, const Configuration& cfg,
                      double C) {
    const std::vector<Point> z = pooled_points(cfg);
    require_distinct(z);
    if (z.size() < 2) throw Precondition("onsager_margin: need at least two points");
    const double e = interaction_energy(model, cfg, false);
    const double rhs = -0.5 * nearest_neighbor_log_sum(z) + C * 0.5 * static_cast<double>(z.size());
    return rhs - e;
}

double fit_onsager_constant(const CovarianceModel& model,
                            const std::vector<Configuration>& cfgs) {
    if (cfgs.empty()) throw Precondition("fit_onsager_constant: empty configuration set");
    double c = -kCovInfinity;
    for (const Configuration& cfg : cfgs) {
        const std::vector<Point> z = pooled_points(cfg);
        require_distinct(z);
        const double e = interaction_energy(model, cfg, false);
        const double needed =
            (e + 0.5 * nearest_neighbor_log_sum(z)) * 2.0 / static_cast<double>(z.size());
        c = std::max(c, needed);
    }
    return c;
}

}  // namespace ichaos

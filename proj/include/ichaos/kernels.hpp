// Covariance kernels, conformal radius and point-configuration energies.
//
// Conventions (fixed throughout the library):
//  * The Dirichlet Green function of the unit square carries a 2*pi factor
//    relative to the -Delta Green function, so G(x,y) ~ -log|x-y| near the
//    diagonal.  Fields built on it are standard log-correlated fields.
//  * log CR(x) is the diagonal limit of G(x,y) + log|x-y| (log of the
//    conformal radius of the square seen from x).
//  * The exactly scaling kernel is log+(R/|x-y|); its cutoff version at
//    scales s,t is log+(R/(s v t v d)) + 2 - 2*sqrt(d/(s v t v d)).
#pragma once

#include <limits>
#include <vector>

#include "ichaos/geometry.hpp"

namespace ichaos {

// ------------------------- Dirichlet unit square -------------------------

// Eigenfunction-series evaluation.  The sine series is damped at scale
// t0 = 36/(pi*modes)^2 and completed by the exact short-time heat-kernel
// integral (E1 terms, first image ring), which makes the result accurate to
// ~1e-12 uniformly in the separation while `modes` controls cost.
// pre: both points strictly inside the open square; x != y; modes >= 64.
double green_dirichlet_square(Point x, Point y, int modes = 1024);

// Closed-form evaluation through the conformal map onto the half plane
// (Jacobi sn with aspect-ratio-2 modulus).  Independent route used on hot
// paths; agrees with the series to ~1e-12.
double green_dirichlet_square_fast(Point x, Point y);

// Diagonal limit of G + log d, Richardson-extrapolated from offsets
// {2e-4, 1e-4} (offset directions averaged over the axes that stay inside).
double log_conformal_radius_square(Point x, int modes = 1024);

// Closed-form log CR via the conformal map (2 Im zeta / |zeta'|).
double log_conformal_radius_square_fast(Point x);

// ----------------------------- scaling kernels ---------------------------

// log+(R/|x-y|).  Coincident points return +inf (documented NotApplicable
// sentinel: the kernel has no finite diagonal value).
double cov_exact_scaling(Point x, Point y, double R);

// Cutoff covariance at scales s and t.  throws BadCutoff unless s,t in (0,R].
double cov_star_scale_cutoff(Point x, Point y, double s, double t, double R);

// Scale-decomposed stationary kernel: integral over u > 0 of
// k(e^u d / R) (1 - e^{-delta u}) with k the radial seed covariance
// (autocorrelation of the unit-diameter disc; k(0)=1, support [0,1],
// PSD by construction and re-checked numerically in tests).
double star_scale_model_cov(double d, double R, double delta);

// Seed covariance itself (exposed for tests and PSD checks).
double star_scale_seed_kernel(double d);

// ----------------------------- model variant -----------------------------

enum class ModelKind { DirichletSquare, ExactScaling, StarScale };

struct CovarianceModel {
    ModelKind kind = ModelKind::ExactScaling;
    int modes = 1024;    // DirichletSquare
    double R = 1.0;      // ExactScaling / StarScale
    double delta = 1.0;  // StarScale

    static CovarianceModel dirichlet_square(int modes = 1024) {
        CovarianceModel m;
        m.kind = ModelKind::DirichletSquare;
        m.modes = modes;
        return m;
    }
    static CovarianceModel exact_scaling(double R) {
        CovarianceModel m;
        m.kind = ModelKind::ExactScaling;
        m.R = R;
        return m;
    }
    static CovarianceModel star_scale(double R, double delta) {
        CovarianceModel m;
        m.kind = ModelKind::StarScale;
        m.R = R;
        m.delta = delta;
        return m;
    }

    // Two-point covariance.  For DirichletSquare this is the fast closed
    // form (the series op remains available separately).
    double cov(Point x, Point y) const;

    // Covariance with the smooth diagonal part split off symmetrically:
    // for DirichletSquare, G - (log CR(x) + log CR(y))/2; identical to cov
    // for the translation-invariant kernels.
    double cov_primed(Point x, Point y) const;

    // Smooth diagonal part g(x,x) = lim (cov + log d) at resolved distances
    // (log CR for the square, log R for the scaling kernels).  Used by the
    // white-noise normalization weight.
    double smooth_diagonal(Point x) const;

    // Natural domain of the model as used by quadrature routines.
    bool point_ok(Point p) const {
        return kind == ModelKind::DirichletSquare ? inside_open_unit_square(p) : true;
    }
};

// --------------------------- configuration energy ------------------------

struct Configuration {
    std::vector<Point> xs;
    std::vector<Point> ys;
};

// E = -sum_{i<j} c(x_i,x_j) - sum_{i<j} c(y_i,y_j) + sum_{i,j} c(x_i,y_j),
// with c the plain or primed kernel.  throws CoincidentPoints if any two of
// the pooled points coincide.
double interaction_energy(const CovarianceModel& model, const Configuration& cfg,
                          bool primed);

// Margin of the pooled-point bound
//   E <= -(1/2) sum_j log min_{i != j} |z_i - z_j| + C * n_tot/2,
// i.e.  margin = RHS - E  (n_tot/2 matches C*N for N+N configurations).
// C is the caller-supplied fitted constant.
double onsager_margin(const CovarianceModel& model, const Configuration& cfg,
                      double C);

// Smallest C for which every margin in `cfgs` is >= 0 (so the fitted
// minimum margin is 0 by construction).
double fit_onsager_constant(const CovarianceModel& model,
                            const std::vector<Configuration>& cfgs);

inline constexpr double kCovInfinity = std::numeric_limits<double>::infinity();

}  // namespace ichaos

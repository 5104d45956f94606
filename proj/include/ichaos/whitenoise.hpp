// White-noise limit of the squared chaos: renormalized fluctuation fields
//   W_r(z) = r^{beta^2-5} * weight * (|mu(Q(z,r))|^2 - E|mu(Q(z,r))|^2),
// their integrated Brownian sheets B = sqrt(A) * prefix sums, the universal
// normalization constant A, and the statistical test battery.
//
// `weight` is the model's smooth-part factor e^{-beta^2 g} (g = log R for
// the scaling kernels, 0 for a pure -log d kernel); it removes the kernel's
// smooth diagonal from |mu|^2 so that A estimated in the pure-log convention
// normalizes the sheet to E B(s,t)^2 = st.
#pragma once

#include <cstdint>
#include <vector>

#include "ichaos/chaos.hpp"
#include "ichaos/geometry.hpp"

namespace ichaos {

struct WField {
    int n = 0;          // W-lattice nodes per axis (covers [0,1]^2)
    double h = 0.0;
    double r = 0.0;
    double m2 = 0.0;    // centering E|mu(Q(.,r))|^2 actually used
    double weight = 1.0;
    std::vector<double> values;  // row-major over z-nodes in [0,1]^2
};

// Builds W on the midpoint lattice of [0,1]^2 from window sums of the chaos.
// Centering: exact lattice second moment of the chaos's cutoff model
// (midpoint-rule quadrature value, stderr 0).  pre: chaos lattice-built on a
// translation-invariant model; footprint contains [0,1]^2 padded by 2r on
// every side (FootprintTooSmall); r >= 4 * spacing.
WField build_wfield(const ChaosField& chaos, double r);

// A^{-1} = integral over w in R^2 and over x,y in Q(0,1)^2, u,v in Q(w,1)^2
// of (ratio - 1) / (|x-y|^{beta^2} |u-v|^{beta^2}),
// ratio = (|x-u||y-v| / (|x-v||y-u|))^{beta^2}.
// Split: raw importance-sampled integrand for |w| <= 2; symmetrized
// (ratio + 1/ratio - 2)/2 for 2 < |w| <= w_cutoff; fitted a*|w|^{-4} tail
// beyond (fit window [w_cutoff/2, w_cutoff]).  throws NegativeIntegral if
// the estimate comes out non-positive.
struct AEstimate {
    double A = 0.0;
    double stderr_ = 0.0;
    double inv_A = 0.0;
    double near_part = 0.0;   // |w| <= 2
    double mid_part = 0.0;    // 2 < |w| <= w_cutoff
    double tail_part = 0.0;   // fitted continuation
    double tail_coefficient = 0.0;
    double split_radius = 2.0;
    double w_cutoff = 8.0;
    long n_evals = 0;
    std::uint64_t seed = 0;
};

// split_radius moves the raw/symmetrized boundary (sup-norm half-side of the
// near box); estimates at split 2 and 3 agree within twice the combined
// stderr (the split is a bookkeeping line, not a model parameter).
AEstimate estimate_A(double beta, long n_pts, double w_cutoff, std::uint64_t seed,
                     double split_radius = 2.0);

// Evaluates the w-marginal density f(w) (the inner 8-dim integral of the
// symmetrized integrand) at a fixed offset; used by the |w|^4-flatness
// diagnostics.
double wfield_cov_kernel(double beta, Point w, long n_pts, std::uint64_t seed);

// B(s,t) = sqrt(A) * integral of W over [0,s] x [0,t] via 2D prefix sums;
// B vanishes on the axes exactly.
struct Sheet {
    int n = 0;
    double h = 0.0;
    double r = 0.0;      // block scale of the generating W field
    double sqrtA = 0.0;
    std::vector<double> prefix;  // (n+1)^2, prefix[(i)*(n+1)+j] row-major

    // B at lattice-aligned (s,t) = (i*h, j*h); general (s,t) bilinear.
    double at(double s, double t) const;

    // Increment over (s0,s1] x (t0,t1].
    double increment(double s0, double s1, double t0, double t1) const;
};

Sheet build_sheet(const WField& wf, double A);

// Per-probe second-moment check: ratio of mean B(s,t)^2 across sheets to st.
struct VarianceProbe {
    double s = 0.0, t = 0.0;
    double mean_b2 = 0.0;
    double stderr_ = 0.0;
    double ratio = 0.0;  // mean_b2 / (s*t)
};

// Per sheet the probe value averages the squared increments over the
// disjoint congruent rectangles tiling the sheet (identically distributed
// by stationarity of W).  pre: >= 200 sheets (TooFewReplicas).
std::vector<VarianceProbe> variance_test(const std::vector<Sheet>& sheets,
                                         const std::vector<std::pair<double, double>>& probes);

// Correlation of B(s,t) - B(s',t') with B(s',t') for nested probes
// (s' <= s, t' <= t; BadNesting otherwise), plus a distance-correlation
// diagnostic.  throws Degenerate if the two probes coincide.
struct IndependenceReport {
    double correlation = 0.0;
    double corr_stderr = 0.0;
    double distance_correlation = 0.0;
    long n = 0;
};

IndependenceReport independence_test(const std::vector<Sheet>& sheets,
                                     std::pair<double, double> inner,
                                     std::pair<double, double> outer);

// Cross-scale coupling E[B_r(1,1) B_s(1,1)] and E|B_r - B_s|^2 from paired
// sheets built on the same replicas.  pre: matched nonempty lists with
// sheet scale r <= s pairwise (BadScales).
struct CrossScaleReport {
    double cross = 0.0;        // mean of B_r * B_s at (1,1)
    double cross_stderr = 0.0;
    double diff2 = 0.0;        // mean of (B_r - B_s)^2 at (1,1)
    double var_r = 0.0;
    double var_s = 0.0;
};

CrossScaleReport cross_scale_test(const std::vector<Sheet>& sheets_r,
                                  const std::vector<Sheet>& sheets_s);

}  // namespace ichaos

// Pathwise scaling analyses: local exponents, iterated-logarithm ratio
// series, fast-point counting, box-counting dimension and Hoelder moduli.
#pragma once

#include <cstdint>
#include <vector>

#include "ichaos/chaos.hpp"
#include "ichaos/geometry.hpp"

namespace ichaos {

struct RadiiLadder {
    std::vector<double> radii;  // strictly decreasing

    // Geometric ladder r_k = r_max * gamma^k, k = 0..depth-1.
    static RadiiLadder dyadic(double gamma, int depth, double r_max);

    // pre for use against a chaos lattice: >= 4 entries, min radius >= 4h.
    void validate(double spacing) const;
};

struct LocalExponent {
    double slope = 0.0;      // LS slope of log|mu(Q(x,r))| against log r
    double intercept = 0.0;
    double residual = 0.0;   // RMS residual of the fit
    std::vector<double> abs_mu;
};

LocalExponent local_exponent(const ChaosField& chaos, Point x, const RadiiLadder& ladder);

// ratio(r) = |mu(Q(x,r))| / (r^{2-beta^2/2} (log |log r|)^{beta^2/4});
// requires every radius < 1/e so the normalizer is real.
struct LilSeries {
    std::vector<double> radii;
    std::vector<double> abs_mu;
    std::vector<double> ratio;
    std::vector<double> running_max;
};

LilSeries lil_ratio_series(const ChaosField& chaos, Point x, const RadiiLadder& ladder);

// Counts grid points x in (r_n Z^2 intersect core) whose window
// |mu(Q(x, r_n^{1-delta}))| reaches the threshold
//   a * r_n^{(1-delta)(2-beta^2/2)} * |log r_n^{1-delta}|^{beta^2/4}
// (ties count).  core is the centered square where all windows fit.
// pre: r_n^{1-delta} >= 8 * spacing; 0 < delta < 1/2.
struct FastPointReport {
    int n = 0;
    double a = 0.0;
    double delta = 0.0;
    double r_n = 0.0;
    double window_r = 0.0;
    double threshold = 0.0;
    long count = 0;
    long grid_size = 0;  // per-axis grid dimension; count <= grid_size^2
};

FastPointReport fast_point_scan(const ChaosField& chaos, double a, int n, double delta);

// LS slope of log2(count) against level for reports with count > 0;
// throws DegenerateCounts when fewer than 3 levels are nonzero.
struct BoxcountFit {
    double dimension = 0.0;
    int levels_used = 0;
};

BoxcountFit boxcount_dimension(const std::vector<std::pair<int, long>>& level_counts);

// max over pairs of |mu(Q(x,r)) - mu(Q(x',r'))| /
// ((r v r')^alpha ||(x,r)-(x',r')||^alpha); identical pairs are excluded and
// counted.  pre: 0 < alpha < 1 - beta^2/4 (AlphaOutOfRange).
struct HolderPair {
    Point x;
    double r = 0.0;
    Point x2;
    double r2 = 0.0;
};

struct HolderReport {
    double max_ratio = 0.0;
    long pairs_used = 0;
    long exclusions = 0;
};

HolderReport holder_modulus(const ChaosField& chaos, const std::vector<HolderPair>& pairs,
                            double alpha);

}  // namespace ichaos

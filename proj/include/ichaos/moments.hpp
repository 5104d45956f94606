// Absolute-moment estimators for the chaos: direct quadrature of the
// two-point function, importance-sampled 2N-point quadrature, field Monte
// Carlo, rectangle-family constant fits and the min-distance reference
// integral.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ichaos/chaos.hpp"
#include "ichaos/geometry.hpp"
#include "ichaos/kernels.hpp"

namespace ichaos {

struct MomentEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    long n_evals = 0;
    std::string method;  // "quadrature" | "importance" | "field-mc" | "analytic"
    std::uint64_t seed = 0;
};

// E|mu(rect)|^2 = integral over rect^2 of e^{beta^2 cov'(x,y)}.
// Stratified sampling in x with a near-diagonal |x-y|^{-beta^2} importance
// mixture in y; stderr from 32 batch means.  beta = 0 short-circuits to the
// analytic area^2 with stderr 0.  throws BetaOutOfRange if beta^2 >= 2.
MomentEstimate moment2_quadrature(Rect rect, double beta, const CovarianceModel& model,
                                  long n_pts, std::uint64_t seed);

inline MomentEstimate moment2_quadrature(SquareQuery q, double beta,
                                         const CovarianceModel& model, long n_pts,
                                         std::uint64_t seed) {
    return moment2_quadrature(rect_of(q), beta, model, n_pts, seed);
}

// E|mu(rect)|^{2N} for N in {1,2,3} by importance sampling of the 2N-point
// integrand e^{beta^2 E'}; the proposal chains uniform draws with power-law
// clustering kernels so the pair-coincidence singularities of the majorant
// prod_j (min-dist)^{-beta^2/2} have bounded weights.  throws OrderTooHigh
// for N > 3.  N = 1 falls back to moment2_quadrature's integrand (shared
// convention, independent sampler).
MomentEstimate moment2N_importance(Rect rect, double beta, int N,
                                   const CovarianceModel& model, long n_pts,
                                   std::uint64_t seed);

inline MomentEstimate moment2N_importance(SquareQuery q, double beta, int N,
                                          const CovarianceModel& model, long n_pts,
                                          std::uint64_t seed) {
    return moment2N_importance(rect_of(q), beta, N, model, n_pts, seed);
}

// Exact E|mu(Q)|^2 of a lattice-built chaos: the translation-invariant node
// kernel makes the double sum a separable autocorrelation,
//   h^4 sum_dx sum_dy (w-|dx|)(w-|dy|) e^{beta^2 C_h(h*(dx,dy))},
// evaluated exactly (stderr 0).  This is the midpoint-rule value of the
// cutoff-model quadrature and the correct centering for white-noise fields.
MomentEstimate moment2_lattice_exact(const ChaosField& chaos, int w);

// Field Monte Carlo: replicas of |mu(q)|^{2N} from freshly sampled chaos.
// Pipeline describes how each replica's field and chaos are built.
struct McPipeline {
    CovarianceModel model;      // DirichletSquare or ExactScaling
    int lattice_n = 512;        // chaos lattice nodes per axis
    double span = 1.0;          // footprint side (ExactScaling; centered at 1/2)
    int modes = 1024;           // spectral modes (DirichletSquare)
    double eps = 0.0;           // spectral chaos regularization radius
    double beta = 1.0;
    Normalization norm = Normalization::PowerLaw;
};

MomentEstimate mc_moment(const McPipeline& pipe, SquareQuery q, int N, int replicas,
                         std::uint64_t seed, int threads = 0);

// Same statistic over prebuilt replicas.  pre: >= 100 (TooFewReplicas).
MomentEstimate mc_moment(const std::vector<ChaosField>& replicas, SquareQuery q, int N);

// Fit of the rectangle-family bound
//   m_{2N}(a x b) <= C^N (ab)^{(2-beta^2/2) N} N^{beta^2 N / 2}:
// returns the smallest C for which the bound holds across the family along
// with each rectangle's slack (log of bound minus log of moment at the
// fitted C).
struct RectangleFit {
    double C = 0.0;
    std::vector<double> moments;
    std::vector<double> stderrs;
    std::vector<double> slack;  // >= 0, and 0 for the binding rectangle
};

RectangleFit rectangle_moment_fit(const std::vector<std::pair<double, double>>& sides,
                                  double beta, int N, const CovarianceModel& model,
                                  long n_pts, std::uint64_t seed);

// Integral over (unit disc)^p of prod_j min_{i != j} |z_i - z_j|^{-beta^2/2}
// by mixture importance sampling (uniform + pairwise power-law clustering).
// beta = 0 returns pi^p exactly.  pre: p in {2,4,6,8}.
MomentEstimate min_distance_integral(int p, double beta, long n_pts,
                                     std::uint64_t seed);

}  // namespace ichaos

// Gaussian field samplers: spectral Dirichlet field on the unit square,
// exactly scaling lattice fields via circulant embedding, circle averages
// and the Markov (harmonic) decomposition.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ichaos/geometry.hpp"

namespace ichaos {

// --------------------------- spectral GFF ---------------------------
//
// Gamma(x) = sum_{m,n=1..M} amp_{mn} phi_{mn}(x),
// phi_{mn}(x) = 2 sin(m pi x1) sin(n pi x2),
// amp_{mn} = sqrt(2 pi) g_{mn} / sqrt(lambda_{mn}),  lambda = pi^2(m^2+n^2),
// g iid standard normals drawn in row-major (m-major) order from the seed.
// The sqrt(2 pi) factor normalizes the short-distance law to -log|x-y|.
struct SpectralField {
    int modes = 0;
    std::uint64_t seed = 0;
    std::vector<double> amp;  // modes*modes, amp[(m-1)*modes + (n-1)]
};

// pre: 64 <= modes <= 4096 (BadModes).
SpectralField sample_gff_square(int modes, std::uint64_t seed);

// Pointwise evaluation (O(modes^2); exact partial sum).
double eval_point(const SpectralField& f, Point x);

// Circle average at radius eps.  Exact for the truncated series: the mean
// value of phi_{mn} over a circle is J0(eps sqrt(lambda)) phi_{mn}(center).
// throws DiscOutsideDomain unless the closed eps-disc fits in the open square.
double circle_average(const SpectralField& f, Point x, double eps);

// Separable evaluation on a tensor grid xs x ys (O(g M^2 + g^2 M), the fast
// path for whole-lattice evaluation).  Output row-major with y fastest.
// eps > 0 applies the circle-average factor mode-wise (no domain check here;
// callers own the disc-fit policy).
std::vector<double> eval_grid(const SpectralField& f, const std::vector<double>& xs,
                              const std::vector<double>& ys, double eps = 0.0);

// --------------------------- lattice fields ---------------------------

struct LatticeField {
    int n = 0;          // nodes per axis
    double h = 0.0;     // spacing
    Point origin;       // node (i,j) sits at origin + ((i+1/2)h, (j+1/2)h)
    double R = 0.0;     // kernel range of the generating model
    double cutoff = 0.0;  // small-scale cutoff (= h for exact-scaling samples)
    std::uint64_t seed = 0;
    std::vector<double> values;  // row-major, j fastest
};

// Stationary exactly scaling field with cutoff h on an n x n lattice:
// covariance between nodes is cov_star_scale_cutoff(., ., h, h, R) of the
// torus-minimal separation; sampled by circulant embedding on a 2n x 2n
// torus (restriction to the n-window has the exact kernel covariance).
// Negative embedding eigenvalues are clipped when they are smaller than
// 1e-8 * max; otherwise EmbeddingNotPSD(worst) is thrown.
// pre: n a power of two; n*h <= R/2 (window inside the pure-log regime).
LatticeField sample_exact_scaling_lattice(int n, double h, double R,
                                          std::uint64_t seed);

// Two independent fields per embedding draw (real and imaginary parts).
// replica k uses draw k/2 and part k%2; exposed so campaigns can halve the
// FFT cost while keeping the seed ledger exact.
LatticeField sample_exact_scaling_lattice_part(int n, double h, double R,
                                               std::uint64_t draw_seed, int part);

// --------------------------- Markov decomposition ---------------------------

struct HarmonicDecomposition {
    int grid = 0;    // interior resolution; (grid+1)^2 nodes including boundary
    double h = 0.0;  // node spacing
    Point origin;    // lower-left node
    double tolerance = 1e-10;
    long iterations = 0;
    std::vector<double> total;     // field restricted to the window nodes
    std::vector<double> harmonic;  // discrete-harmonic extension of the boundary
    std::vector<double> inner;     // total - harmonic (zero boundary)
};

// Splits the field on the window Q(center, R) into a discrete-harmonic part
// (5-point Laplacian, boundary data from the field) and a zero-boundary
// inner part.  Conjugate gradients; throws SolverDiverged if the relative
// residual is still above 1e-10 after 10*grid^2 iterations.
// pre: grid >= 32; closed window inside the open unit square.
HarmonicDecomposition markov_decompose(const SpectralField& f, Point center,
                                       double R, int grid);

}  // namespace ichaos

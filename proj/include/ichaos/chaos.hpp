// Imaginary chaos lattices e^{i beta Gamma_eps} with power-law or Wick
// normalization, and Riemann integration against square queries and test
// functions.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ichaos/field.hpp"
#include "ichaos/geometry.hpp"
#include "ichaos/kernels.hpp"

namespace ichaos {

enum class Normalization { PowerLaw, Wick };

struct ChaosParams {
    double beta = 1.0;  // in (0, sqrt(2)); beta = 0 allowed as the trivial probe
    double eps = 0.0;   // regularization scale (disc radius / lattice cutoff)
    Normalization norm = Normalization::PowerLaw;
};

struct ChaosField {
    int n = 0;
    double h = 0.0;
    Point origin;  // node (i,j) at origin + ((i+1/2)h, (j+1/2)h)
    ChaosParams params;
    std::uint64_t source_seed = 0;
    ModelKind source_kind = ModelKind::DirichletSquare;
    double model_R = 0.0;  // kernel range for lattice-built chaos (0 if n/a)
    std::vector<std::complex<double>> values;

    Point node(int i, int j) const {
        return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h};
    }
    Rect footprint() const {
        return {origin.x, origin.y, origin.x + n * h, origin.y + n * h};
    }
};

// Spectral route: values = norm(x) * e^{i beta Gamma_eps(x)} on a grid x grid
// midpoint lattice covering the largest centered square on which every
// eps-disc fits, [eps, 1-eps]^2.  PowerLaw: norm = eps^{-beta^2/2}; Wick:
// norm = exp(beta^2 Var Gamma_eps(x) / 2) with the variance of the truncated
// series.  throws EpsTooSmall if eps < 2h; DiscOutsideDomain if eps >= 1/2.
ChaosField build_chaos(const SpectralField& f, ChaosParams params, int grid);

// Lattice route: the node value is already the cutoff-h field, so eps is
// pinned to h (the field's intrinsic cutoff) and recorded as such.
// PowerLaw: norm = h^{-beta^2/2}; Wick: norm = exp(beta^2 (log(R/h)+2)/2),
// the exact marginal variance of the cutoff kernel.
ChaosField build_chaos(const LatticeField& f, ChaosParams params);

// Midpoint Riemann sum h^2 * sum over nodes with center in the half-open
// square [c-r, c+r) x [c-r, c+r); the half-open convention makes aligned
// sub-squares partition their union exactly.
// pre: 2r >= 4h (QueryTooSmall); query inside the footprint
// (QueryOutsideFootprint).
std::complex<double> integrate_square(const ChaosField& c, SquareQuery q);

// h^2 * sum of values * f over the whole lattice; f is sampled on the same
// lattice (row-major, j fastest).  throws ShapeMismatch on size mismatch.
std::complex<double> integrate_test_function(const ChaosField& c,
                                             const std::vector<double>& f);

// Sliding square windows of w x w nodes via a summed-area table, one sum per
// valid window position.  Shared fast path for the scan-type analyses (local
// exponents, fast points, white noise); equals integrate_square on aligned
// queries up to summation-order rounding.
struct WindowSumGrid {
    int nx = 0, ny = 0;     // number of valid window positions per axis
    int w = 0;              // window width in nodes
    double h = 0.0;         // lattice spacing
    Point first_center;     // center of window (0,0)
    std::vector<std::complex<double>> sums;  // h^2-weighted, row-major
};

WindowSumGrid window_sums(const ChaosField& c, int w);

}  // namespace ichaos

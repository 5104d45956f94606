// Windowed wavelet analysis of the chaos and the Besov-type level statistic
//   A_j = 2^{j(1 - 2/p - beta^2/2)} (sum_{lambda in Lambda_j} |alpha|^p)^{1/p}
// with the p = infinity branch max|alpha|, plus replica-based regularity
// verdicts.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ichaos/chaos.hpp"

namespace ichaos {

// Orthonormal conjugate-mirror filter; validated at construction:
// sum h = sqrt(2), sum h^2 = 1, shift orthogonality (all to 1e-12),
// length within [8,12], regularity >= 2.
struct WaveletBasis {
    std::string name;
    std::vector<double> h;  // scaling filter
    int regularity = 0;

    static WaveletBasis db6();
    void validate() const;
};

// Coefficients of the windowed chaos against L2-normalized wavelets
// psi_lambda = 2^j psi^(tau)(2^j x - k): alpha(lambda) = h^2 sum u*chaos*psi
// computed by the fast cascade.  Level j holds 3 orientation planes of
// 2^j x 2^j coefficients each; father holds the coarse remainder.
struct WaveletPyramid {
    int J = 0;           // finest analyzed level (levels 1..J)
    int n = 0;           // lattice nodes per axis (power of two)
    double h = 0.0;      // lattice spacing
    // levels[j-1][tau] for tau in {0,1,2}, each 2^? plane row-major.
    std::vector<std::vector<std::vector<std::complex<double>>>> levels;
    std::vector<std::complex<double>> father;
    int father_n = 0;
};

// pre: chaos lattice is square with n a power of two; window sampled on the
// same lattice (ShapeMismatch otherwise); the finest analyzed scale must
// span at least 4 lattice cells (n / 2^J >= 4, DepthExceedsResolution).
WaveletPyramid analyze(const ChaosField& chaos, const std::vector<double>& window,
                       const WaveletBasis& basis, int J);

// Inverse cascade; analyze followed by synthesize reproduces the windowed
// input to filter-orthogonality precision.
std::vector<std::complex<double>> synthesize(const WaveletPyramid& pyr,
                                             const WaveletBasis& basis);

// A_j for j = 1..J.  p = infinity is requested with p <= 0.
// throws EmptyPyramid when the pyramid has no levels.
std::vector<double> besov_statistic(const WaveletPyramid& pyr, double p, double beta);

enum class Verdict { BoundedConsistent, DivergentConsistent, Inconclusive };

// Replica decision over partial l^q norms S(J') of the A_j series:
// bounded if the replica-median growth S(J)/S(J-2) < 1.10, divergent if the
// growth is monotone and > 1.25, inconclusive otherwise.
struct VerdictReport {
    Verdict verdict = Verdict::Inconclusive;
    double median_growth = 0.0;
    double grow_threshold = 1.25;
    double bound_threshold = 1.10;
    bool monotone = false;
};

// a_series[replica][j-1] = A_j.  pre: >= 10 replicas (TooFewReplicas),
// J >= 6 (TooShallow).
VerdictReport regularity_verdict(const std::vector<std::vector<double>>& a_series,
                                 double p, double q);

// C2 window equal to 1 on the centered half-side square of the footprint
// (the central quarter by area) and falling smoothly to 0 before the edge;
// sampled on the chaos lattice.
std::vector<double> smooth_bump_window(int n);

// Smooth bump of radius-scale delta at the footprint center, 1 on the inner
// half, 0 outside; duality diagnostic for the p < 2 divergence route:
//   stat(delta) = delta^{-2 + beta^2/2} |mu(f_delta)|.
std::vector<double> bump_f_delta(const ChaosField& chaos, double delta);

}  // namespace ichaos

// Tail algebra: growth constants of the even-moment sequence, the Markov
// envelope over moments, the moment-order selector and empirical survival
// curves.
//
// The moment sequence m_{2N} = E|mu|^{2N} grows like N^{beta^2 N/2} e^{c** N};
// the stretched-exponential tail rate is then
//   c* = (beta^2/2) exp(-1 - 2 c** / beta^2),
// and -log P(|mu| > t) ~ c* t^{4/beta^2}.
#pragma once

#include <cstdint>
#include <vector>

namespace ichaos {

struct MomentSequence {
    double beta = 0.0;
    std::vector<int> orders;       // N values (2N-th absolute moments)
    std::vector<double> moments;   // m_{2N} > 0
    std::vector<double> stderrs;   // 0 for exact entries
};

// Weighted LS fit of y_N = (log m_{2N} - (beta^2 N / 2) log N) / N against
// the model y = c** + b/N.  Weights 1/Var(y_N) when stderrs are provided,
// equal otherwise.  pre: >= 3 entries.
struct CstarstarFit {
    double c_star_star = 0.0;
    double b = 0.0;
    double residual = 0.0;  // RMS of weighted residuals
};

CstarstarFit fit_cstarstar(const MomentSequence& seq);

double cstar_from_cstarstar(double beta, double c_star_star);
double cstarstar_from_cstar(double beta, double c_star);

// Both constants, with the defining relation re-checked to 1e-12 at
// construction (and after any round trip).
struct TailConstants {
    double beta;
    double c_star_star;
    double c_star;

    TailConstants(double beta, double c_star_star);
};

// min over available N of m_{2N} / t^{2N} together with the minimizing N.
struct EnvelopePoint {
    double t = 0.0;
    double log_envelope = 0.0;  // log of the min
    int n_at_min = 0;
};

EnvelopePoint markov_envelope(const MomentSequence& seq, double t);

// Unique even integer in [d_star * alpha * t^alpha, d_star * alpha * t^alpha + 2).
long k_of_t(double t, double d_star, double alpha);

// Survival fraction of |samples| over the threshold grid, with binomial
// standard errors.  pre: >= 1e4 samples.
struct SurvivalCurve {
    std::vector<double> t;
    std::vector<double> fraction;
    std::vector<double> stderr_;
};

SurvivalCurve empirical_survival(const std::vector<double>& samples,
                                 const std::vector<double>& t_grid);

}  // namespace ichaos

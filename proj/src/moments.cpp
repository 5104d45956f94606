#include "ichaos/moments.hpp"

#include <algorithm>
#include <cmath>

#include "ichaos/errors.hpp"
#include "ichaos/parallel.hpp"
#include "ichaos/rng.hpp"

namespace ichaos {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBatches = 32;

void require_beta(double beta) {
    if (!(beta >= 0.0) || beta * beta >= 2.0)
        throw BetaOutOfRange("moment estimation: beta^2 must lie in [0, 2)");
}

void require_rect_in_model(const Rect& r, const CovarianceModel& model) {
    if (model.kind == ModelKind::DirichletSquare &&
        !(r.x0 >= 0.0 && r.x1 <= 1.0 && r.y0 >= 0.0 && r.y1 <= 1.0))
        throw OutOfDomain("moment estimation: rectangle leaves the unit square");
}

struct BatchMeans {
    double sum[kBatches] = {0};
    long count[kBatches] = {0};

    void add(int b, double v) {
        sum[b] += v;
        count[b] += 1;
    }
    // Mean of batch means and its standard error.
    void finish(double& mean, double& se) const {
        double m = 0.0;
        for (int b = 0; b < kBatches; ++b) m += sum[b] / count[b];
        m /= kBatches;
        double var = 0.0;
        for (int b = 0; b < kBatches; ++b) {
            const double d = sum[b] / count[b] - m;
            var += d * d;
        }
        var /= kBatches - 1;
        mean = m;
        se = std::sqrt(var / kBatches);
    }
};

// Radial power-law cluster kernel: r ~ diam * u^{1/(2-beta^2)}, i.e. density
// (2-beta^2) r^{-beta^2} / (2 pi diam^{2-beta^2}) on the disc of radius diam.
// Bounded importance ratios against pairwise d^{-beta^2} singularities.
struct ClusterKernel {
    double diam = 1.0;
    double beta2 = 1.0;

    Point draw(RngStream& rng, Point around) const {
        const double r =
            std::max(diam * std::pow(rng.uniform(), 1.0 / (2.0 - beta2)), 1e-300);
        const double th = 2.0 * kPi * rng.uniform();
        return {around.x + r * std::cos(th), around.y + r * std::sin(th)};
    }
    double density(Point z, Point around) const {
        const double r = dist(z, around);
        if (r >= diam || r == 0.0) return 0.0;
        return (2.0 - beta2) * std::pow(r, -beta2) /
               (2.0 * kPi * std::pow(diam, 2.0 - beta2));
    }
};

}  // namespace

MomentEstimate moment2_quadrature(Rect rect, double beta, const CovarianceModel& model,
                                  long n_pts, std::uint64_t seed) {
    require_beta(beta);
    require_rect_in_model(rect, model);
    if (rect.width() <= 0.0 || rect.height() <= 0.0)
        throw Precondition("moment2_quadrature: empty rectangle");
    if (beta == 0.0)
        return {rect.area() * rect.area(), 0.0, 0, "analytic", seed};
    if (n_pts < 10000) throw Precondition("moment2_quadrature: n_pts >= 1e4");

    const double beta2 = beta * beta;
    const double area = rect.area();
    const ClusterKernel kern{std::hypot(rect.width(), rect.height()), beta2};
    RngStream rng(seed);
    BatchMeans acc;

    // x stratified over a 16x16 cell rotation; y from the uniform/cluster
    // mixture around x.
    constexpr int S = 16;
    const double cw = rect.width() / S, ch = rect.height() / S;
    for (long k = 0; k < n_pts; ++k) {
        const int cell = static_cast<int>(k % (S * S));
        const Point x{rect.x0 + (cell / S + rng.uniform()) * cw,
                      rect.y0 + (cell % S + rng.uniform()) * ch};
        Point y;
        if (rng.uniform() < 0.5)
            y = {rect.x0 + rng.uniform() * rect.width(),
                 rect.y0 + rng.uniform() * rect.height()};
        else
            y = kern.draw(rng, x);
        const int b = static_cast<int>(k % kBatches);
        if (!rect.contains(y)) {
            acc.add(b, 0.0);
            continue;
        }
        const double q = 0.5 / area + 0.5 * kern.density(y, x);
        acc.add(b, std::exp(beta2 * model.cov_primed(x, y)) * area / q);
    }
    MomentEstimate est;
    acc.finish(est.value, est.stderr_);
    est.n_evals = n_pts;
    est.method = "quadrature";
    est.seed = seed;
    return est;
}

MomentEstimate moment2N_importance(Rect rect, double beta, int N,
                                   const CovarianceModel& model, long n_pts,
                                   std::uint64_t seed) {
    require_beta(beta);
    if (N < 1) throw Precondition("moment2N_importance: N >= 1");
    if (N > 3) throw OrderTooHigh("moment2N_importance: N <= 3");
    require_rect_in_model(rect, model);
    const double area = rect.area();
    if (beta == 0.0)
        return {std::pow(area, 2.0 * N), 0.0, 0, "analytic", seed};

    const double beta2 = beta * beta;
    const int P = 2 * N;
    const ClusterKernel kern{std::hypot(rect.width(), rect.height()), beta2};
    RngStream rng(seed);
    BatchMeans acc;
    std::vector<Point> z(P);

    for (long k = 0; k < n_pts; ++k) {
        const int b = static_cast<int>(k % kBatches);
        double log_w = std::log(area);  // 1/q_1 for the uniform first point
        bool inside = true;
        z[0] = {rect.x0 + rng.uniform() * rect.width(),
                rect.y0 + rng.uniform() * rect.height()};
        for (int j = 1; j < P && inside; ++j) {
            if (rng.uniform() < 0.5) {
                z[j] = {rect.x0 + rng.uniform() * rect.width(),
                        rect.y0 + rng.uniform() * rect.height()};
            } else {
                const int pick = static_cast<int>(rng.next_u64() % j);
                z[j] = kern.draw(rng, z[pick]);
            }
            if (!rect.contains(z[j])) {
                inside = false;
                break;
            }
            double cluster = 0.0;
            for (int i = 0; i < j; ++i) cluster += kern.density(z[j], z[i]);
            const double q = 0.5 / area + 0.5 * cluster / j;
            log_w -= std::log(q);
        }
        if (!inside) {
            acc.add(b, 0.0);
            continue;
        }
        // E' = -sum within blocks + sum across blocks (x's are z[0..N)).
        double energy = 0.0;
        for (int i = 0; i < P; ++i)
            for (int j = i + 1; j < P; ++j) {
                const double c = model.cov_primed(z[i], z[j]);
                energy += (i < N) == (j < N) ? -c : c;
            }
        acc.add(b, std::exp(beta2 * energy + log_w));
    }
    MomentEstimate est;
    acc.finish(est.value, est.stderr_);
    est.n_evals = n_pts;
    est.method = "importance";
    est.seed = seed;
    return est;
}

MomentEstimate moment2_lattice_exact(const ChaosField& chaos, int w) {
    if (chaos.source_kind != ModelKind::ExactScaling || chaos.model_R <= 0.0)
        throw NotApplicable("moment2_lattice_exact: needs a lattice-built chaos");
    if (w < 1 || w > chaos.n) throw Precondition("moment2_lattice_exact: 1 <= w <= n");

    const double beta2 = chaos.params.beta * chaos.params.beta;
    const double h = chaos.h, R = chaos.model_R;
    // Node-kernel prefactor: e^{beta^2 C_h} for Wick values; PowerLaw values
    // carry h^{-beta^2} e^{-beta^2 (log(R/h)+2)} = R^{-beta^2} e^{-2 beta^2}.
    const double pref = chaos.params.norm == Normalization::Wick
                            ? 1.0
                            : std::pow(R, -beta2) * std::exp(-2.0 * beta2);
    double sum = 0.0;
    for (int dx = -(w - 1); dx <= w - 1; ++dx)
        for (int dy = -(w - 1); dy <= w - 1; ++dy) {
            const double d = h * std::hypot(static_cast<double>(dx), static_cast<double>(dy));
            const double u = std::max(h, d);
            const double c = std::max(0.0, std::log(R / u)) + 2.0 - 2.0 * std::sqrt(d / u);
            sum += static_cast<double>(w - std::abs(dx)) * (w - std::abs(dy)) *
                   std::exp(beta2 * c);
        }
    MomentEstimate est;
    est.value = pref * h * h * h * h * sum;
    est.stderr_ = 0.0;
    est.n_evals = static_cast<long>(2 * w - 1) * (2 * w - 1);
    est.method = "analytic";
    est.seed = 0;
    return est;
}

MomentEstimate mc_moment(const McPipeline& pipe, SquareQuery q, int N, int replicas,
                         std::uint64_t seed, int threads) {
    if (replicas < 2) throw TooFewReplicas("mc_moment: replicas >= 2");
    if (N < 0) throw Precondition("mc_moment: N >= 0");
    std::vector<double> vals(replicas);
    parallel_for(static_cast<std::size_t>(replicas), threads, [&](std::size_t k) {
        ChaosParams params{pipe.beta, pipe.eps, pipe.norm};
        ChaosField chaos;
        if (pipe.model.kind == ModelKind::DirichletSquare) {
            const SpectralField f =
                sample_gff_square(pipe.modes, mix64(seed, campaign_tag::kLibrary, k));
            chaos = build_chaos(f, params, pipe.lattice_n);
        } else {
            const double h = pipe.span / pipe.lattice_n;
            const LatticeField f = sample_exact_scaling_lattice_part(
                pipe.lattice_n, h, pipe.model.R,
                mix64(seed, campaign_tag::kLibrary, k / 2), static_cast<int>(k % 2));
            chaos = build_chaos(f, params);
        }
        vals[k] = std::pow(std::abs(integrate_square(chaos, q)), 2.0 * N);
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= replicas;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= replicas > 1 ? replicas - 1 : 1;
    MomentEstimate est;
    est.value = mean;
    est.stderr_ = std::sqrt(var / replicas);
    est.n_evals = replicas;
    est.method = "field-mc";
    est.seed = seed;
    return est;
}

MomentEstimate mc_moment(const std::vector<ChaosField>& replicas, SquareQuery q, int N) {
    if (replicas.size() < 100) throw TooFewReplicas("mc_moment: >= 100 replicas");
    if (N < 0) throw Precondition("mc_moment: N >= 0");
    if (N == 0) return {1.0, 0.0, static_cast<long>(replicas.size()), "field-mc", 0};
    std::vector<double> vals(replicas.size());
    for (std::size_t k = 0; k < replicas.size(); ++k)
        vals[k] = std::pow(std::abs(integrate_square(replicas[k], q)), 2.0 * N);
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= vals.size() - 1;
    MomentEstimate est;
    est.value = mean;
    est.stderr_ = std::sqrt(var / vals.size());
    est.n_evals = static_cast<long>(vals.size());
    est.method = "field-mc";
    est.seed = replicas.front().source_seed;
    return est;
}

RectangleFit rectangle_moment_fit(const std::vector<std::pair<double, double>>& sides,
                                  double beta, int N, const CovarianceModel& model,
                                  long n_pts, std::uint64_t seed) {
    require_beta(beta);
    if (N < 1) throw Precondition("rectangle_moment_fit: N >= 1");
    if (N > 3) throw OrderTooHigh("rectangle_moment_fit: N <= 3");
    if (sides.empty()) throw Precondition("rectangle_moment_fit: empty family");

    RectangleFit fit;
    const double beta2 = beta * beta;
    std::vector<double> log_needed(sides.size());
    for (std::size_t i = 0; i < sides.size(); ++i) {
        const auto [a, b] = sides[i];
        if (!(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 1.0))
            throw Precondition("rectangle_moment_fit: sides must lie in (0, 1]");
        const Rect rect{0.5 - a / 2.0, 0.5 - b / 2.0, 0.5 + a / 2.0, 0.5 + b / 2.0};
        const MomentEstimate m =
            N == 1 ? moment2_quadrature(rect, beta, model, n_pts,
                                        mix64(seed, campaign_tag::kLibrary, i))
                   : moment2N_importance(rect, beta, N, model, n_pts,
                                         mix64(seed, campaign_tag::kLibrary, i));
        fit.moments.push_back(m.value);
        fit.stderrs.push_back(m.stderr_);
        // bound: m <= C^N (ab)^{(2-beta^2/2)N} N^{beta^2 N/2}
        log_needed[i] = (std::log(m.value) - (2.0 - beta2 / 2.0) * N * std::log(a * b) -
                         (beta2 * N / 2.0) * std::log(static_cast<double>(N))) /
                        N;
    }
    const double log_c = *std::max_element(log_needed.begin(), log_needed.end());
    fit.C = std::exp(log_c);
    for (double ln : log_needed) fit.slack.push_back(N * (log_c - ln));
    return fit;
}

MomentEstimate min_distance_integral(int p, double beta, long n_pts,
                                     std::uint64_t seed) {
    if (p != 2 && p != 4 && p != 6 && p != 8)
        throw BadOrder("min_distance_integral: p in {2,4,6,8}");
    require_beta(beta);
    if (beta == 0.0)
        return {std::pow(kPi, static_cast<double>(p)), 0.0, 0, "analytic", seed};

    const double beta2 = beta * beta;
    const ClusterKernel kern{2.0, beta2};
    RngStream rng(seed);
    BatchMeans acc;
    std::vector<Point> z(p);

    const auto in_disc = [](Point a) { return a.x * a.x + a.y * a.y <= 1.0; };
    const auto uniform_disc = [&]() {
        const double r = std::sqrt(rng.uniform());
        const double th = 2.0 * kPi * rng.uniform();
        return Point{r * std::cos(th), r * std::sin(th)};
    };

    for (long k = 0; k < n_pts; ++k) {
        const int b = static_cast<int>(k % kBatches);
        double log_w = std::log(kPi);
        bool inside = true;
        z[0] = uniform_disc();
        for (int j = 1; j < p && inside; ++j) {
            if (rng.uniform() < 0.5) {
                z[j] = uniform_disc();
            } else {
                const int pick = static_cast<int>(rng.next_u64() % j);
                z[j] = kern.draw(rng, z[pick]);
            }
            if (!in_disc(z[j])) {
                inside = false;
                break;
            }
            double cluster = 0.0;
            for (int i = 0; i < j; ++i) cluster += kern.density(z[j], z[i]);
            const double q = 0.5 / kPi + 0.5 * cluster / j;
            log_w -= std::log(q);
        }
        if (!inside) {
            acc.add(b, 0.0);
            continue;
        }
        double log_f = 0.0;
        for (int j = 0; j < p; ++j) {
            double best = kCovInfinity;
            for (int i = 0; i < p; ++i)
                if (i != j) best = std::min(best, dist(z[i], z[j]));
            log_f -= (beta2 / 2.0) * std::log(best);
        }
        acc.add(b, std::exp(log_f + log_w));
    }
    MomentEstimate est;
    acc.finish(est.value, est.stderr_);
    est.n_evals = n_pts;
    est.method = "importance";
    est.seed = seed;
    return est;
}

}  // namespace ichaos

#include "ichaos/besov.hpp"

#include <algorithm>
#include <cmath>

#include "ichaos/errors.hpp"

namespace ichaos {

namespace {

using cd = std::complex<double>;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2i(int n) {
    int j = 0;
    while ((1 << j) < n) ++j;
    return j;
}

// Periodic analysis step along one axis of the leading m x m block of buf
// (full row stride = n).  axis 0 transforms x (slow index), axis 1 transforms
// y.  Low-pass lands in the first m/2 slots, high-pass in the second.
void analysis_axis(std::vector<cd>& buf, int n, int m, int axis,
                   const std::vector<double>& h) {
    const int F = static_cast<int>(h.size());
    const int half = m / 2;
    std::vector<cd> line(m), out(m);
    for (int s = 0; s < m; ++s) {
        for (int t = 0; t < m; ++t)
            line[t] = axis == 0 ? buf[t * n + s] : buf[s * n + t];
        for (int i = 0; i < half; ++i) {
            cd a = 0.0, d = 0.0;
            for (int k = 0; k < F; ++k) {
                const cd v = line[(2 * i + k) % m];
                a += h[k] * v;
                d += (k % 2 ? -h[F - 1 - k] : h[F - 1 - k]) * v;
            }
            out[i] = a;
            out[half + i] = d;
        }
        for (int t = 0; t < m; ++t)
            (axis == 0 ? buf[t * n + s] : buf[s * n + t]) = out[t];
    }
}

// Transpose of analysis_axis.
void synthesis_axis(std::vector<cd>& buf, int n, int m, int axis,
                    const std::vector<double>& h) {
    const int F = static_cast<int>(h.size());
    const int half = m / 2;
    std::vector<cd> line(m), out(m);
    for (int s = 0; s < m; ++s) {
        for (int t = 0; t < m; ++t)
            line[t] = axis == 0 ? buf[t * n + s] : buf[s * n + t];
        std::fill(out.begin(), out.end(), cd(0.0));
        for (int i = 0; i < half; ++i)
            for (int k = 0; k < F; ++k) {
                const double g = k % 2 ? -h[F - 1 - k] : h[F - 1 - k];
                out[(2 * i + k) % m] += h[k] * line[i] + g * line[half + i];
            }
        for (int t = 0; t < m; ++t)
            (axis == 0 ? buf[t * n + s] : buf[s * n + t]) = out[t];
    }
}

}  // namespace

WaveletBasis WaveletBasis::db6() {
    WaveletBasis b;
    b.name = "db6";
    b.h = {0.1115407433501094636213,    0.4946238903984530856772,
           0.7511339080210953506789,    0.3152503517091976290860,
           -0.2262646939654398200763,   -0.1297668675672619355623,
           0.0975016055873230491023,    0.0275228655303057286255,
           -0.0315820393174860295651,   0.0005538422011614961392519,
           0.004777257510945510639636,  -0.001077301085308479564853};
    b.regularity = 2;
    b.validate();
    return b;
}

void WaveletBasis::validate() const {
    const int F = static_cast<int>(h.size());
    if (F < 8 || F > 12 || F % 2 != 0)
        throw Precondition("wavelet basis: even filter length in [8, 12]");
    if (regularity < 2) throw Precondition("wavelet basis: regularity >= 2");
    double s1 = 0.0, s2 = 0.0;
    for (double v : h) {
        s1 += v;
        s2 += v * v;
    }
    if (std::abs(s1 - std::sqrt(2.0)) > 1e-12 || std::abs(s2 - 1.0) > 1e-12)
        throw Precondition("wavelet basis: normalization sums violated");
    for (int m = 1; 2 * m < F; ++m) {
        double s = 0.0;
        for (int k = 0; k + 2 * m < F; ++k) s += h[k] * h[k + 2 * m];
        if (std::abs(s) > 1e-12)
            throw Precondition("wavelet basis: shift orthogonality violated");
    }
}

WaveletPyramid analyze(const ChaosField& chaos, const std::vector<double>& window,
                       const WaveletBasis& basis, int J) {
    basis.validate();
    const int n = chaos.n;
    if (!power_of_two(n)) throw Precondition("analyze: lattice nodes must be 2^k");
    if (window.size() != chaos.values.size())
        throw ShapeMismatch("analyze: window/lattice size mismatch");
    if (J < 1) throw Precondition("analyze: J >= 1");
    if (n >> J < 4) throw DepthExceedsResolution("analyze: need n / 2^J >= 4");

    std::vector<cd> buf(chaos.values.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = chaos.values[i] * window[i];

    WaveletPyramid pyr;
    pyr.J = J;
    pyr.n = n;
    pyr.h = chaos.h;
    pyr.levels.resize(J);

    int m = n;
    for (int step = 1; step <= J; ++step) {
        analysis_axis(buf, n, m, 0, basis.h);
        analysis_axis(buf, n, m, 1, basis.h);
        const int half = m / 2;
        // Detail planes at dyadic level j = log2(half), stored in increasing
        // j: levels[J - step].  tau 0/1/2 = (hi,lo), (lo,hi), (hi,hi).
        auto& planes = pyr.levels[J - step];
        planes.assign(3, std::vector<cd>(static_cast<std::size_t>(half) * half));
        for (int ix = 0; ix < half; ++ix)
            for (int iy = 0; iy < half; ++iy) {
                const std::size_t out = static_cast<std::size_t>(ix) * half + iy;
                planes[0][out] = chaos.h * buf[(half + ix) * n + iy];
                planes[1][out] = chaos.h * buf[ix * n + (half + iy)];
                planes[2][out] = chaos.h * buf[(half + ix) * n + (half + iy)];
            }
        m = half;
    }
    pyr.father_n = m;
    pyr.father.resize(static_cast<std::size_t>(m) * m);
    for (int ix = 0; ix < m; ++ix)
        for (int iy = 0; iy < m; ++iy)
            pyr.father[static_cast<std::size_t>(ix) * m + iy] = chaos.h * buf[ix * n + iy];
    return pyr;
}

std::vector<std::complex<double>> synthesize(const WaveletPyramid& pyr,
                                             const WaveletBasis& basis) {
    basis.validate();
    if (pyr.levels.empty()) throw EmptyPyramid("synthesize: pyramid has no levels");
    const int n = pyr.n;
    std::vector<cd> buf(static_cast<std::size_t>(n) * n, cd(0.0));
    for (int ix = 0; ix < pyr.father_n; ++ix)
        for (int iy = 0; iy < pyr.father_n; ++iy)
            buf[ix * n + iy] = pyr.father[static_cast<std::size_t>(ix) * pyr.father_n + iy] / pyr.h;
    int m = pyr.father_n;
    for (int step = pyr.J; step >= 1; --step) {
        const int half = m;
        const auto& planes = pyr.levels[pyr.J - step];
        for (int ix = 0; ix < half; ++ix)
            for (int iy = 0; iy < half; ++iy) {
                const std::size_t in = static_cast<std::size_t>(ix) * half + iy;
                buf[(half + ix) * n + iy] = planes[0][in] / pyr.h;
                buf[ix * n + (half + iy)] = planes[1][in] / pyr.h;
                buf[(half + ix) * n + (half + iy)] = planes[2][in] / pyr.h;
            }
        m = 2 * half;
        synthesis_axis(buf, n, m, 1, basis.h);
        synthesis_axis(buf, n, m, 0, basis.h);
    }
    return buf;
}

std::vector<double> besov_statistic(const WaveletPyramid& pyr, double p, double beta) {
    if (pyr.levels.empty()) throw EmptyPyramid("besov_statistic: pyramid has no levels");
    const double beta2 = beta * beta;
    std::vector<double> out;
    for (const auto& planes : pyr.levels) {
        const int m = static_cast<int>(std::lround(std::sqrt(
            static_cast<double>(planes[0].size()))));
        const int j = log2i(m);
        double s;
        if (p <= 0.0) {
            s = 0.0;
            for (const auto& plane : planes)
                for (const cd& a : plane) s = std::max(s, std::abs(a));
        } else {
            s = 0.0;
            for (const auto& plane : planes)
                for (const cd& a : plane) s += std::pow(std::abs(a), p);
            s = std::pow(s, 1.0 / p);
        }
        const double inv_p = p <= 0.0 ? 0.0 : 1.0 / p;
        out.push_back(std::pow(2.0, j * (1.0 - 2.0 * inv_p - beta2 / 2.0)) * s);
    }
    return out;
}

VerdictReport regularity_verdict(const std::vector<std::vector<double>>& a_series,
                                 double p, double q) {
    (void)p;
    if (a_series.size() < 10) throw TooFewReplicas("regularity_verdict: >= 10 replicas");
    const std::size_t J = a_series.front().size();
    if (J < 6) throw TooShallow("regularity_verdict: J >= 6");
    for (const auto& row : a_series)
        if (row.size() != J) throw ShapeMismatch("regularity_verdict: ragged replicas");

    // Partial l^q norms S(J') per replica; q <= 0 selects the sup norm.
    const auto partial = [&](const std::vector<double>& row, std::size_t upto) {
        double s = 0.0;
        for (std::size_t j = 0; j < upto; ++j)
            s = q <= 0.0 ? std::max(s, row[j]) : s + std::pow(row[j], q);
        return q <= 0.0 ? s : std::pow(s, 1.0 / q);
    };
    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };

    std::vector<double> growth;
    for (const auto& row : a_series) growth.push_back(partial(row, J) / partial(row, J - 2));

    VerdictReport rep;
    rep.median_growth = median(growth);
    rep.monotone = true;
    double prev = 0.0;
    for (std::size_t upto = 2; upto <= J; ++upto) {
        std::vector<double> s;
        for (const auto& row : a_series) s.push_back(partial(row, upto));
        const double med = median(s);
        if (med < prev - 1e-12 * std::abs(prev)) rep.monotone = false;
        prev = med;
    }
    if (rep.median_growth < rep.bound_threshold)
        rep.verdict = Verdict::BoundedConsistent;
    else if (rep.monotone && rep.median_growth > rep.grow_threshold)
        rep.verdict = Verdict::DivergentConsistent;
    else
        rep.verdict = Verdict::Inconclusive;
    return rep;
}

namespace {

// C2 quintic step on [0,1].
double smoothstep2(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double bump_profile(double t) {
    // 1 on [0.15, 0.85] of the footprint axis, 0 outside [0.03, 0.97].  The
    // plateau covers the central quarter with margin so that only the coarsest
    // wavelets feel the ramps.
    if (t < 0.15) return smoothstep2((t - 0.03) / 0.12);
    if (t > 0.85) return smoothstep2((0.97 - t) / 0.12);
    return 1.0;
}

}  // namespace

std::vector<double> smooth_bump_window(int n) {
    if (n < 8) throw Precondition("smooth_bump_window: n >= 8");
    std::vector<double> axis(n);
    for (int i = 0; i < n; ++i) axis[i] = bump_profile((i + 0.5) / n);
    std::vector<double> w(static_cast<std::size_t>(n) * n);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            w[static_cast<std::size_t>(ix) * n + iy] = axis[ix] * axis[iy];
    return w;
}

std::vector<double> bump_f_delta(const ChaosField& chaos, double delta) {
    const Rect fp = chaos.footprint();
    const Point c{(fp.x0 + fp.x1) / 2.0, (fp.y0 + fp.y1) / 2.0};
    if (!(delta > 0.0) || delta > std::min(fp.x1 - fp.x0, fp.y1 - fp.y0) / 2.0)
        throw QueryOutsideFootprint("bump_f_delta: delta exceeds the footprint");
    if (delta < 4.0 * chaos.h) throw QueryTooSmall("bump_f_delta: delta >= 4 spacings");
    std::vector<double> f(chaos.values.size(), 0.0);
    for (int ix = 0; ix < chaos.n; ++ix)
        for (int iy = 0; iy < chaos.n; ++iy) {
            const double rho = dist(chaos.node(ix, iy), c) / delta;
            if (rho >= 1.0) continue;
            f[static_cast<std::size_t>(ix) * chaos.n + iy] =
                rho <= 0.5 ? 1.0 : smoothstep2((1.0 - rho) / 0.5);
        }
    return f;
}

}  // namespace ichaos

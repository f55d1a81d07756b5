#include "pointspec/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace pointspec {

namespace {

// 15-point Gauss-Legendre panel on [-1, 1]
constexpr std::array<double, 15> kGlNodes = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr std::array<double, 15> kGlWeights = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

/// Integral of (c - F(s))^2 over [a, b], panelized so F is sampled densely.
double integrate_sq_diff(double c, const std::function<double(double)>& F, double a, double b) {
    if (!(b > a)) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.05)));
    const double w = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * w;
        double acc = 0.0;
        for (int i = 0; i < 15; ++i) {
            const double s = mid + 0.5 * w * kGlNodes[i];
            const double d = c - F(s);
            acc += kGlWeights[i] * d * d;
        }
        total += 0.5 * w * acc;
    }
    return total;
}

} // namespace

std::vector<double> unfold(const Spectrum& spectrum, int drop) {
    if (drop < 0) throw std::invalid_argument("unfold: drop must be >= 0");
    std::vector<double> levels;
    if (static_cast<std::size_t>(drop) >= spectrum.roots.size()) return levels;
    levels.reserve(spectrum.roots.size() - drop);
    for (std::size_t i = drop; i < spectrum.roots.size(); ++i)
        levels.push_back(2.0 * spectrum.roots[i]);
    return levels;
}

std::vector<double> SpacingSeries::odd() const {
    std::vector<double> out;
    out.reserve((spacings.size() + 1) / 2);
    for (std::size_t i = 0; i < spacings.size(); i += 2) out.push_back(spacings[i]);
    return out;
}

std::vector<double> SpacingSeries::even() const {
    std::vector<double> out;
    out.reserve(spacings.size() / 2);
    for (std::size_t i = 1; i < spacings.size(); i += 2) out.push_back(spacings[i]);
    return out;
}

SpacingSeries parity_split(std::vector<double> levels) {
    if (levels.size() < 3)
        throw std::invalid_argument("parity_split: need at least 3 levels");
    SpacingSeries series;
    series.spacings.reserve(levels.size() - 1);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        series.spacings.push_back(levels[i + 1] - levels[i]);
    series.levels = std::move(levels);
    return series;
}

NormalizedSample normalize_to_unit_mean(std::span<const double> sample) {
    NormalizedSample out;
    if (sample.empty()) {
        out.degenerate = true;
        return out;
    }
    out.mean = std::accumulate(sample.begin(), sample.end(), 0.0) / sample.size();
    if (!(out.mean > 1e-12)) {
        out.degenerate = true;
        out.values.assign(sample.begin(), sample.end());
        return out;
    }
    out.values.reserve(sample.size());
    for (double v : sample) out.values.push_back(v / out.mean);
    return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample) : sorted_(std::move(sample)) {
    if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double s) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), s);
    return static_cast<double>(it - sorted_.begin()) / sorted_.size();
}

double delta_F(const EmpiricalCdf& empirical, const std::function<double(double)>& ref_cdf,
               double tail_cut) {
    const auto& x = empirical.sorted();
    const std::size_t N = x.size();
    const double upper = std::max(tail_cut, x.back());
    double total = integrate_sq_diff(0.0, ref_cdf, 0.0, std::max(0.0, x.front()));
    for (std::size_t i = 0; i + 1 < N; ++i) {
        if (x[i + 1] <= x[i]) continue;
        total += integrate_sq_diff(static_cast<double>(i + 1) / N, ref_cdf, x[i], x[i + 1]);
    }
    total += integrate_sq_diff(1.0, ref_cdf, x.back(), upper);
    return total;
}

double delta_F_between(const std::function<double(double)>& cdf_a,
                       const std::function<double(double)>& cdf_b, double upper) {
    const int panels = std::max(1, static_cast<int>(std::ceil(upper / 0.02)));
    const double w = upper / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * w;
        double acc = 0.0;
        for (int i = 0; i < 15; ++i) {
            const double s = mid + 0.5 * w * kGlNodes[i];
            const double d = cdf_a(s) - cdf_b(s);
            acc += kGlWeights[i] * d * d;
        }
        total += 0.5 * w * acc;
    }
    return total;
}

double ks_distance(const EmpiricalCdf& empirical, const std::function<double(double)>& ref_cdf) {
    const auto& x = empirical.sorted();
    const std::size_t N = x.size();
    double d = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double F = ref_cdf(x[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / N - F));
        d = std::max(d, std::abs(static_cast<double>(i) / N - F));
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < sa.size() && ib < sb.size()) {
        const double v = std::min(sa[ia], sb[ib]);
        while (ia < sa.size() && sa[ia] <= v) ++ia;
        while (ib < sb.size() && sb[ib] <= v) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / sa.size() -
                                 static_cast<double>(ib) / sb.size()));
    }
    return d;
}

Histogram histogram_density(std::span<const double> sample, double bin_width) {
    if (sample.empty()) throw std::invalid_argument("histogram_density: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();
    if (bin_width <= 0.0) {
        // Freedman-Diaconis, with a fallback for degenerate IQR
        const double q1 = sorted[sorted.size() / 4];
        const double q3 = sorted[(3 * sorted.size()) / 4];
        const double iqr = q3 - q1;
        bin_width = iqr > 0.0 ? 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()))
                              : std::max(1e-12, (hi - lo) / 64.0);
    }
    if (!(hi > lo)) {
        Histogram h;
        h.edges = {lo - 0.5 * bin_width, lo + 0.5 * bin_width};
        h.counts = {sorted.size()};
        h.density = {1.0 / bin_width};
        return h;
    }
    const int bins = std::max(1, static_cast<int>(std::ceil((hi - lo) / bin_width)));
    Histogram h;
    h.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + i * (hi - lo) / bins;
    h.counts.assign(bins, 0);
    for (double v : sorted) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[b];
    }
    h.density.resize(bins);
    const double w = (hi - lo) / bins;
    for (int i = 0; i < bins; ++i)
        h.density[i] = static_cast<double>(h.counts[i]) / (sample.size() * w);
    return h;
}

double small_s_exponent(std::span<const double> sample) {
    std::vector<double> s;
    s.reserve(sample.size());
    for (double v : sample)
        if (v > 0.0) s.push_back(v);
    if (s.size() < 10000)
        throw std::runtime_error("small_s_exponent: need at least 1e4 positive samples");
    std::sort(s.begin(), s.end());

    const double lo = s[static_cast<std::size_t>(5e-4 * s.size())];
    const double hi = s[static_cast<std::size_t>(0.9 * s.size())];
    if (!(lo > 0.0) || !(hi > lo))
        throw std::runtime_error("small_s_exponent: degenerate sample range");

    constexpr int kBinsPerDecade = 24;
    constexpr int kMinCount = 64;
    const int nbins =
        std::max(8, static_cast<int>(std::ceil(std::log10(hi / lo) * kBinsPerDecade)));
    const double lf = std::log(lo), hf = std::log(hi);
    std::vector<std::size_t> cnt(nbins, 0);
    for (double v : s) {
        if (v < lo || v >= hi) continue;
        int b = static_cast<int>((std::log(v) - lf) / (hf - lf) * nbins);
        b = std::clamp(b, 0, nbins - 1);
        ++cnt[b];
    }
    const auto edge = [&](int i) { return std::exp(lf + (hf - lf) * i / nbins); };
    const auto center = [&](int i) { return std::sqrt(edge(i) * edge(i + 1)); };

    const int mode_bin =
        static_cast<int>(std::max_element(cnt.begin(), cnt.end()) - cnt.begin());
    const double cap = 0.6 * center(mode_bin);

    // lowest decade of qualifying bins below the distribution peak
    std::vector<int> chosen;
    double anchor = 0.0;
    for (int i = 0; i < nbins; ++i) {
        if (cnt[i] < kMinCount || center(i) > cap) continue;
        if (anchor == 0.0) anchor = center(i);
        if (center(i) <= 10.0 * anchor) chosen.push_back(i);
    }
    if (chosen.size() < 4)
        throw std::runtime_error("small_s_exponent: insufficient low-s data");

    // weighted least squares in log-log; the quadratic term absorbs curvature
    // and the slope is evaluated near the low edge of the fit window
    const std::size_t N = s.size();
    std::vector<double> xs, ys, ws;
    for (int i : chosen) {
        xs.push_back(std::log(center(i)));
        ys.push_back(std::log(static_cast<double>(cnt[i]) / (N * (edge(i + 1) - edge(i)))));
        ws.push_back(static_cast<double>(cnt[i]));
    }
    const double x0 = xs.front() + 0.15 * (xs.back() - xs.front());
    const int terms = chosen.size() >= 6 ? 3 : 2;
    // normal equations for basis {1, (x-x0), (x-x0)^2}
    std::array<std::array<double, 3>, 3> A{};
    std::array<double, 3> rhs{};
    for (std::size_t p = 0; p < xs.size(); ++p) {
        const double dx = xs[p] - x0;
        const std::array<double, 3> phi = {1.0, dx, dx * dx};
        for (int r = 0; r < terms; ++r) {
            rhs[r] += ws[p] * phi[r] * ys[p];
            for (int c = 0; c < terms; ++c) A[r][c] += ws[p] * phi[r] * phi[c];
        }
    }
    // tiny Gaussian elimination
    for (int col = 0; col < terms; ++col) {
        int piv = col;
        for (int r = col + 1; r < terms; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = col + 1; r < terms; ++r) {
            const double m = A[r][col] / A[col][col];
            for (int c = col; c < terms; ++c) A[r][c] -= m * A[col][c];
            rhs[r] -= m * rhs[col];
        }
    }
    std::array<double, 3> coef{};
    for (int r = terms - 1; r >= 0; --r) {
        double v = rhs[r];
        for (int c = r + 1; c < terms; ++c) v -= A[r][c] * coef[c];
        coef[r] = v / A[r][r];
    }
    return coef[1];
}

NumberVarianceCurve number_variance(std::span<const double> levels,
                                    std::span<const double> L_grid) {
    if (levels.size() < 1000)
        throw std::invalid_argument("number_variance: need at least 1e3 levels");
    std::vector<double> e(levels.begin(), levels.end());
    std::sort(e.begin(), e.end());
    const double span = e.back() - e.front();
    NumberVarianceCurve curve;
    for (double L : L_grid) {
        if (!(L > 0.0) || L >= span)
            throw std::invalid_argument("number_variance: L outside spectrum span");
        const double stride = L / 4.0;
        double sum = 0.0, sumsq = 0.0;
        std::size_t nwin = 0;
        for (double t = e.front(); t + L <= e.back(); t += stride) {
            const auto lo = std::lower_bound(e.begin(), e.end(), t);
            const auto hi = std::lower_bound(e.begin(), e.end(), t + L);
            const double c = static_cast<double>(hi - lo);
            sum += c;
            sumsq += c * c;
            ++nwin;
        }
        const double mean = sum / nwin;
        curve.L.push_back(L);
        curve.sigma2.push_back(std::max(0.0, sumsq / nwin - mean * mean));
        curve.windows.push_back(nwin);
    }
    return curve;
}

} // namespace pointspec

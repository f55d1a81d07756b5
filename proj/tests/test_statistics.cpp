#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pointspec/rmt.hpp"
#include "pointspec/rootfind.hpp"
#include "pointspec/statistics.hpp"

using namespace pointspec;

namespace {

Spectrum make_spectrum(std::vector<double> roots) {
    Spectrum s;
    s.roots = std::move(roots);
    s.multiplicities.assign(s.roots.size(), 1);
    s.residuals.assign(s.roots.size(), 0.0);
    return s;
}

std::vector<double> wigner_sample(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) {
        double q = u(rng);
        while (q <= 0.0) q = u(rng);
        v = std::sqrt(-4.0 * std::log(q) / std::numbers::pi);
    }
    return out;
}

} // namespace

TEST_CASE("unfold doubles roots and honors the drop count") {
    const auto spec = make_spectrum({1.0, 1.0, 2.0, 2.0});
    const auto levels = unfold(spec);
    REQUIRE(levels.size() == 4);
    CHECK(levels[0] == doctest::Approx(2.0));
    CHECK(levels[3] == doctest::Approx(4.0));
    CHECK(unfold(spec, 1).size() == 3);
    CHECK(unfold(spec, 1)[0] == doctest::Approx(2.0));
}

TEST_CASE("free-circle spacings alternate 0 and 2") {
    std::vector<double> roots;
    for (int l = 1; l <= 50; ++l) {
        roots.push_back(l);
        roots.push_back(l);
    }
    const auto series = parity_split(unfold(make_spectrum(roots)));
    const auto odd = series.odd();
    const auto even = series.even();
    for (double s : odd) CHECK(s == doctest::Approx(0.0));
    for (double s : even) CHECK(s == doctest::Approx(2.0));
    // interleaving reconstructs the original sequence
    REQUIRE(odd.size() + even.size() == series.spacings.size());
    for (std::size_t i = 0; i < series.spacings.size(); ++i)
        CHECK(series.spacings[i] == (i % 2 == 0 ? odd[i / 2] : even[i / 2]));
}

TEST_CASE("free-segment spacings are all 1") {
    std::vector<double> roots;
    for (int j = 1; j <= 30; ++j) roots.push_back(0.5 * j);
    const auto series = parity_split(unfold(make_spectrum(roots)));
    for (double s : series.spacings) CHECK(s == doctest::Approx(1.0));
    CHECK_THROWS_AS(parity_split({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("normalize_to_unit_mean flags degenerate classes") {
    const auto ok = normalize_to_unit_mean(std::vector<double>{1.0, 2.0, 3.0});
    CHECK_FALSE(ok.degenerate);
    CHECK(ok.mean == doctest::Approx(2.0));
    const auto zero = normalize_to_unit_mean(std::vector<double>{0.0, 0.0, 0.0});
    CHECK(zero.degenerate);
}

TEST_CASE("delta_F: ECDF variance identity and degenerate sample") {
    const WignerDistribution wigner;
    const auto cdf = [&](double s) { return wigner.cdf(s); };

    // sample at exact reference quantiles: Delta ~ (1/12N^2-ish), tiny
    const std::size_t N = 4000;
    std::vector<double> quantiles(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double p = (i + 0.5) / N;
        quantiles[i] = std::sqrt(-4.0 * std::log(1.0 - p) / std::numbers::pi);
    }
    const double d_exact = delta_F(EmpiricalCdf(quantiles), cdf, wigner.tail_cut());
    CHECK(d_exact < 1.0 / (6.0 * static_cast<double>(N)));

    // iid Wigner sample: E[Delta] = (1/N) int F(1-F) ds = 0.29289.../N
    std::mt19937_64 rng(2024);
    const std::size_t M = 200000;
    const double d_iid = delta_F(EmpiricalCdf(wigner_sample(M, rng)), cdf, wigner.tail_cut());
    const double expect = (1.0 - 1.0 / std::numbers::sqrt2) / M;
    CHECK(d_iid == doctest::Approx(expect).epsilon(0.25));

    // permutation invariance
    auto sample = wigner_sample(2000, rng);
    auto shuffled = sample;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(delta_F(EmpiricalCdf(sample), cdf, 5.0) ==
          doctest::Approx(delta_F(EmpiricalCdf(shuffled), cdf, 5.0)).epsilon(1e-14));
}

TEST_CASE("ks_distance examples") {
    const WignerDistribution wigner;
    const auto cdf = [&](double s) { return wigner.cdf(s); };
    const std::size_t N = 1000;
    std::vector<double> quantiles(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double p = (i + 0.5) / N;
        quantiles[i] = std::sqrt(-4.0 * std::log(1.0 - p) / std::numbers::pi);
    }
    CHECK(ks_distance(EmpiricalCdf(quantiles), cdf) <= 0.5 / N + 1e-9);

    // point mass at 1: the sup sits on the lower side, F_W(1) = 0.544062
    // (the one-sided upper deviation would be exp(-pi/4) = 0.45594)
    const std::vector<double> constant{1.0, 1.0, 1.0};
    CHECK(ks_distance(EmpiricalCdf(constant), cdf) ==
          doctest::Approx(1.0 - std::exp(-std::numbers::pi / 4.0)).epsilon(1e-10));
    CHECK(1.0 - std::exp(-std::numbers::pi / 4.0) == doctest::Approx(0.544062).epsilon(1e-5));

    CHECK_THROWS_AS(EmpiricalCdf(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("histogram density normalizes to unit area") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> sample(100000);
    for (auto& v : sample) v = u(rng);
    const auto h = histogram_density(sample, 0.1);
    double area = 0.0;
    for (std::size_t i = 0; i < h.density.size(); ++i) {
        area += h.density[i] * (h.edges[i + 1] - h.edges[i]);
        CHECK(h.density[i] == doctest::Approx(1.0).epsilon(0.08));
    }
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));

    // Wigner mode near sqrt(2/pi)
    auto ws = wigner_sample(200000, rng);
    const auto hw = histogram_density(ws, 0.05);
    const auto it = std::max_element(hw.density.begin(), hw.density.end());
    const double mode = 0.5 * (hw.edges[it - hw.density.begin()] +
                               hw.edges[it - hw.density.begin() + 1]);
    CHECK(mode == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(0.12));
}

TEST_CASE("small_s_exponent recovers 1 / 3 / 0") {
    std::mt19937_64 rng(12345);
    const std::size_t N = 100000;

    auto w = wigner_sample(N, rng);
    CHECK(small_s_exponent(w) == doctest::Approx(1.0).epsilon(0.3));

    auto a = wigner_sample(N, rng);
    const auto b = wigner_sample(N, rng);
    for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
    const auto two = normalize_to_unit_mean(a);
    CHECK(small_s_exponent(two.values) == doctest::Approx(3.0).epsilon(0.1));

    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> flat(N);
    for (auto& v : flat) v = u(rng);
    CHECK(std::abs(small_s_exponent(flat)) < 0.3);

    CHECK_THROWS_AS(small_s_exponent(std::vector<double>(100, 1.0)), std::runtime_error);
}

TEST_CASE("number variance: rigid, doubled-lattice and Poisson sequences") {
    // perfectly rigid e_l = l: zero variance at integer L
    std::vector<double> rigid(5000);
    for (std::size_t i = 0; i < rigid.size(); ++i) rigid[i] = static_cast<double>(i + 1);
    const std::vector<double> Ls{1.0, 2.0, 5.0};
    const auto rv = number_variance(rigid, Ls);
    for (double v : rv.sigma2) CHECK(v < 1e-20);

    // free-circle doubled lattice {2,2,4,4,...}: window of length 2 always
    // holds exactly one doublet, so the count never fluctuates
    std::vector<double> doubled;
    for (int l = 1; l <= 3000; ++l) {
        doubled.push_back(2.0 * l);
        doubled.push_back(2.0 * l);
    }
    const auto dv = number_variance(doubled, std::vector<double>{2.0});
    CHECK(dv.sigma2[0] < 1e-20);

    // Poisson sequence: Sigma^2(L) ~ L
    std::mt19937_64 rng(99);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> pois(200000);
    double t = 0.0;
    for (auto& v : pois) {
        t += expo(rng);
        v = t;
    }
    const auto pv = number_variance(pois, Ls);
    for (std::size_t i = 0; i < Ls.size(); ++i)
        CHECK(pv.sigma2[i] == doctest::Approx(Ls[i]).epsilon(0.1));

    CHECK_THROWS_AS(number_variance(rigid, std::vector<double>{1e6}), std::invalid_argument);
}

TEST_CASE("mean spacing of unfolded spectra is 1") {
    for (double alpha : {1.2, 1.9}) {
        const auto cfg = SystemConfig::circle_primes(alpha, 9);
        const auto spec = find_spectrum_range(cfg, 200.0);
        const auto series = parity_split(unfold(spec, 1));
        double mean = 0.0;
        for (double s : series.spacings) mean += s;
        mean /= series.spacings.size();
        CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(static_cast<double>(series.spacings.size())));
    }
}

TEST_CASE("delta_F quadrature refinement stability") {
    const WignerDistribution wigner;
    const auto cdf = [&](double s) { return wigner.cdf(s); };
    std::mt19937_64 rng(7);
    const auto sample = wigner_sample(5000, rng);
    const EmpiricalCdf ecdf(sample);
    const double d1 = delta_F(ecdf, cdf, wigner.tail_cut());
    const double d2 = delta_F(ecdf, cdf, wigner.tail_cut() + 1.7);
    CHECK(std::abs(d1 - d2) < 1e-10);
}

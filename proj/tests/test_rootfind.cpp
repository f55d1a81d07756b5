#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pointspec/perturbation.hpp"
#include "pointspec/rootfind.hpp"

using namespace pointspec;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// All positive solutions of cos(2 pi k) = c in (0, k_max]: m +- acos(c)/2pi.
std::vector<double> cos_level_roots(double c, double k_max) {
    const double d = std::acos(c) / kTwoPi;
    std::vector<double> roots;
    for (int m = 0;; ++m) {
        const double lo = m - d, hi = m + d;
        if (lo > 0.0 && lo <= k_max) roots.push_back(lo);
        if (hi > 0.0 && hi <= k_max) roots.push_back(hi);
        if (m - d > k_max) break;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}
} // namespace

TEST_CASE("bracket_scan on cos(2 pi k) - 1: tangency suspects, no sign changes") {
    const auto f = [](double k) { return std::cos(kTwoPi * k) - 1.0; };
    // grid offset so the tangencies fall between samples
    const auto res = bracket_scan(f, 0.505, 2.495, 0.01, 1e-3);
    CHECK(res.brackets.empty());
    REQUIRE(res.suspects.size() == 2);
    CHECK(res.suspects[0].k == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(res.suspects[1].k == doctest::Approx(2.0).epsilon(1e-2));

    // a grid landing exactly on the tangency reports it as a grid zero
    const auto exact = bracket_scan(f, 0.5, 2.5, 0.01, 1e-3);
    CHECK(exact.brackets.empty());
    REQUIRE(exact.grid_roots.size() == 2);
    CHECK(exact.grid_roots[0] == doctest::Approx(1.0));
}

TEST_CASE("bracket_scan on cos(2 pi k) - 0.8: two brackets") {
    const auto f = [](double k) { return std::cos(kTwoPi * k) - 0.8; };
    const auto res = bracket_scan(f, 0.5, 1.5, 0.01, 1e-6);
    CHECK(res.suspects.empty());
    REQUIRE(res.brackets.size() == 2);
    CHECK(res.brackets[0].lo < 0.897584);
    CHECK(res.brackets[0].hi > 0.897584);
    CHECK(res.brackets[1].lo < 1.102416);
    CHECK(res.brackets[1].hi > 1.102416);
}

TEST_CASE("bracket_scan on an empty interval") {
    const auto f = [](double k) { return std::cos(kTwoPi * k); };
    const auto res = bracket_scan(f, 1.0, 1.0, 0.01, 1e-6);
    CHECK(res.brackets.empty());
    CHECK(res.suspects.empty());
}

TEST_CASE("refine_root against the arccos closed form") {
    const auto f = [](double k) { return std::cos(kTwoPi * k) - 0.8; };
    const double r1 = std::acos(0.8) / kTwoPi; // 0.1024163823...
    const double root = refine_root(f, {0.89, 0.91, f(0.89), f(0.91)});
    CHECK(std::abs(root - (1.0 - r1)) < 1e-11);
    const double root2 = refine_root(f, {1.09, 1.11, f(1.09), f(1.11)});
    CHECK(std::abs(root2 - (1.0 + r1)) < 1e-11);
    // tangency bracket is rejected
    const auto g = [](double k) { return std::cos(kTwoPi * k) - 1.0; };
    CHECK_THROWS_AS(refine_root(g, {0.99, 1.01, g(0.99), g(1.01)}), std::invalid_argument);
}

TEST_CASE("resolve_tangency classifies touch, split pair and clear dip") {
    // exact tangency: double root at k = 1
    const auto f = [](double k) { return std::cos(kTwoPi * k) - 1.0; };
    auto res = resolve_tangency(f, {1.0 + 2e-3, f(1.0 + 2e-3), 0.01});
    CHECK(res.double_root);
    REQUIRE(res.roots.size() == 2);
    CHECK(std::abs(res.roots[0] - 1.0) < 1e-6);

    // shallow crossing pair: cos(2 pi k) - 1 + eps has roots around integers
    const double eps = 1e-5;
    const auto g = [eps](double k) { return std::cos(kTwoPi * k) - 1.0 + eps; };
    res = resolve_tangency(g, {1.0 + 2e-3, g(1.0 + 2e-3), 0.01});
    CHECK_FALSE(res.double_root);
    REQUIRE(res.roots.size() == 2);
    const double split = std::acos(1.0 - eps) / kTwoPi;
    CHECK(std::abs(res.roots[0] - (1.0 - split)) < 1e-9);
    CHECK(std::abs(res.roots[1] - (1.0 + split)) < 1e-9);

    // clearly positive dip: nothing
    const auto h = [](double k) { return std::cos(kTwoPi * k) + 0.5; };
    res = resolve_tangency(h, {1.0 + 2e-3, h(1.0 + 2e-3), 0.01});
    CHECK(res.roots.empty());
}

TEST_CASE("free circle: doubly degenerate integer roots") {
    const auto cfg = SystemConfig::circle(1.0, {});
    const auto spec = find_spectrum_range(cfg, 5.0);
    REQUIRE(spec.roots.size() == 10);
    for (int l = 1; l <= 5; ++l) {
        CHECK(std::abs(spec.roots[2 * l - 2] - l) < 1e-6);
        CHECK(std::abs(spec.roots[2 * l - 1] - l) < 1e-6);
        CHECK(spec.multiplicities[2 * l - 2] == 2);
        CHECK(spec.residuals[2 * l - 2] < 1e-10);
    }
}

TEST_CASE("free segment: half-integer single roots") {
    const auto cfg = SystemConfig::segment(1.0, {});
    const auto spec = find_spectrum_range(cfg, 4.0);
    REQUIRE(spec.roots.size() == 8);
    for (int j = 1; j <= 8; ++j) {
        CHECK(std::abs(spec.roots[j - 1] - 0.5 * j) < 1e-11);
        CHECK(spec.multiplicities[j - 1] == 1);
    }
}

TEST_CASE("n=1 circle: every root matches the closed form") {
    const auto cfg = SystemConfig::circle(2.0, {1.0});
    const double k_max = 50.0;
    const auto spec = find_spectrum_range(cfg, k_max);
    const auto expect = cos_level_roots(0.8, k_max);
    REQUIRE(spec.roots.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(spec.roots[i] - expect[i]) < 1e-10);
    // count integrity: exactly 2 roots per unit interval here
    CHECK(spec.diagnostics.max_count_deviation == 0);
}

TEST_CASE("find_spectrum by count truncates deterministically") {
    const auto cfg = SystemConfig::circle(2.0, {1.0});
    const auto spec = find_spectrum(cfg, 4);
    REQUIRE(spec.roots.size() == 4);
    CHECK(spec.roots[0] == doctest::Approx(0.102416).epsilon(1e-5));
    CHECK(spec.roots[1] == doctest::Approx(0.897584).epsilon(1e-5));
    CHECK(spec.roots[2] == doctest::Approx(1.102416).epsilon(1e-5));
    CHECK(spec.roots[3] == doctest::Approx(1.897584).epsilon(1e-5));
}

TEST_CASE("near-degenerate doublets at weak coupling are resolved") {
    const auto cfg = SystemConfig::circle_primes(1.001, 47);
    const auto spec = find_spectrum_range(cfg, 30.6);
    const double beta = cfg.beta();
    // ground root near |beta| n / (2 pi), then doublets flanking each integer
    const auto pred = perturbative_doublets(cfg, 30);
    REQUIRE(spec.roots.size() == 61);
    CHECK(std::abs(spec.roots[0] - std::abs(beta) * 47.0 / kTwoPi) < 50.0 * beta * beta);
    // first-order error carries a second-order shift, measured at ~30 beta^2
    // for j = 1 with these positions (verified at 40-digit precision)
    for (int j = 1; j <= 30; ++j) {
        const double lo = spec.roots[2 * j - 1];
        const double hi = spec.roots[2 * j];
        CHECK(std::abs(lo - pred[j - 1].k_lower) < 35.0 * beta * beta);
        CHECK(std::abs(hi - pred[j - 1].k_upper) < 35.0 * beta * beta);
    }
}

TEST_CASE("determinism and parallel-serial equivalence") {
    const auto cfg = SystemConfig::circle_primes(1.4, 9);
    ScanPolicy serial;
    serial.threads = 1;
    ScanPolicy parallel;
    parallel.threads = 4;
    const auto a = find_spectrum_range(cfg, 60.0, serial);
    const auto b = find_spectrum_range(cfg, 60.0, serial);
    const auto c = find_spectrum_range(cfg, 60.0, parallel);
    REQUIRE(a.roots.size() == b.roots.size());
    REQUIRE(a.roots.size() == c.roots.size());
    for (std::size_t i = 0; i < a.roots.size(); ++i) {
        CHECK(a.roots[i] == b.roots[i]); // bit-identical
        CHECK(a.roots[i] == c.roots[i]);
    }
}

TEST_CASE("window partition equals one-shot scan") {
    const auto cfg = SystemConfig::circle_primes(1.9, 5);
    const auto whole = find_spectrum_range(cfg, 40.0);
    std::vector<double> merged;
    // windows are unit intervals internally; any split at integer boundaries
    // must reproduce the same roots
    for (double lo = 0.0; lo < 40.0; lo += 8.0) {
        const auto part = find_spectrum_range(cfg, lo + 8.0);
        for (double r : part.roots)
            if (r > lo) merged.push_back(r);
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [lo](double r) { return r > lo + 8.0; }),
                     merged.end());
    }
    REQUIRE(merged.size() == whole.roots.size());
    for (std::size_t i = 0; i < merged.size(); ++i) CHECK(merged[i] == whole.roots[i]);
}

TEST_CASE("count integrity under stress configs") {
    for (int n : {1, 9, 24}) {
        for (double alpha : {1.2, 1.4, 1.9}) {
            const auto cfg = SystemConfig::circle_primes(alpha, n);
            const auto spec = find_spectrum_range(cfg, 50.0);
            CHECK(std::abs(spec.diagnostics.max_count_deviation) <= n + 4);
        }
    }
}

TEST_CASE("residuals stay below 1e-9") {
    const auto cfg = SystemConfig::circle_primes(1.9, 9);
    const auto spec = find_spectrum_range(cfg, 50.0);
    for (double r : spec.residuals) CHECK(r < 1e-9);
}

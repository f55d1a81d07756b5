#include "pointspec/system.hpp"

#include <cmath>
#include <numbers>

namespace pointspec {

double beta_of_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("beta_of_alpha: alpha must be positive and finite");
    return (1.0 - alpha * alpha) / (1.0 + alpha * alpha);
}

namespace {

std::vector<int> first_primes(int count) {
    std::vector<int> primes;
    primes.reserve(count);
    for (int c = 2; static_cast<int>(primes.size()) < count; ++c) {
        bool is_prime = true;
        for (int p : primes) {
            if (p * p > c) break;
            if (c % p == 0) { is_prime = false; break; }
        }
        if (is_prime) primes.push_back(c);
    }
    return primes;
}

} // namespace

std::vector<double> prime_positions(int n) {
    if (n < 0) throw std::invalid_argument("prime_positions: n must be >= 0");
    if (n == 0) return {};
    const auto primes = first_primes(n + 1);
    const double denom = std::sqrt(static_cast<double>(primes[n]));
    std::vector<double> xs(n);
    for (int k = 0; k < n; ++k)
        xs[k] = 2.0 * std::numbers::pi * std::sqrt(static_cast<double>(primes[k])) / denom;
    return xs;
}

void SystemConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("SystemConfig: alpha must be positive and finite");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double prev = 0.0;
    for (double x : positions) {
        if (!(x > prev) || !(x < two_pi))
            throw std::invalid_argument(
                "SystemConfig: positions must satisfy 0 < x_1 < ... < x_n < 2*pi");
        prev = x;
    }
}

SystemConfig SystemConfig::circle(double alpha, std::vector<double> positions) {
    SystemConfig cfg{Topology::Circle, alpha, std::move(positions)};
    cfg.validate();
    return cfg;
}

SystemConfig SystemConfig::segment(double alpha, std::vector<double> positions) {
    SystemConfig cfg{Topology::Segment, alpha, std::move(positions)};
    cfg.validate();
    return cfg;
}

SystemConfig SystemConfig::circle_primes(double alpha, int n) {
    return circle(alpha, prime_positions(n));
}

SystemConfig SystemConfig::segment_primes(double alpha, int n) {
    return segment(alpha, prime_positions(n));
}

} // namespace pointspec

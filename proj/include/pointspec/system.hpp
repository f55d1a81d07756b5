#pragma once

#include <stdexcept>
#include <vector>

namespace pointspec {

enum class Topology { Circle, Segment };

/// Coupling parameter of the scale-free point interaction,
/// beta = (1 - alpha^2) / (1 + alpha^2), antisymmetric under alpha <-> 1/alpha.
double beta_of_alpha(double alpha);

/// Interaction positions x_k = 2*pi*sqrt(p_k / p_{n+1}) built from the first
/// n+1 primes. Strictly increasing, all in (0, 2*pi), and rationally
/// independent by construction. n = 0 gives the free system (empty list).
std::vector<double> prime_positions(int n);

/// A particle on a circle (periodic) or segment (Dirichlet ends) of length
/// 2*pi with n scale-free point interactions at 0 < x_1 < ... < x_n < 2*pi.
struct SystemConfig {
    Topology topology = Topology::Circle;
    double alpha = 1.0;
    std::vector<double> positions;

    int n() const { return static_cast<int>(positions.size()); }
    double beta() const { return beta_of_alpha(alpha); }

    /// Throws std::invalid_argument on non-positive alpha or unordered /
    /// out-of-range positions.
    void validate() const;

    static SystemConfig circle(double alpha, std::vector<double> positions);
    static SystemConfig segment(double alpha, std::vector<double> positions);
    static SystemConfig circle_primes(double alpha, int n);
    static SystemConfig segment_primes(double alpha, int n);
};

} // namespace pointspec

#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "pointspec/system.hpp"

namespace pointspec {

using TransferMatrix = Eigen::Matrix2cd;

/// 2x2 matrix relating plane-wave coefficients (A, B) across the interaction
/// at x_j:  diag = (1/a + a)/2,  off-diag = (1/a - a)/2 * exp(-/+ 2ikx_j).
/// Unimodular for every real k and alpha > 0.
TransferMatrix transfer_matrix(double k, double alpha, double x_j);

/// Periodic closure diag(exp(2ik*pi), exp(-2ik*pi)); unitary.
TransferMatrix boundary_matrix(double k);

/// Real secular value with the magnitude of the imaginary part that was
/// discarded when reducing the transfer-matrix product to a real number.
struct SecularValue {
    double value = 0.0;
    double residual_imag = 0.0;
};

/// Normalized circle secular function
///   zeta(k) = (1 - beta^2)^(n/2) * (tr(C_P C_n ... C_1) - 2) / 2,
/// which coincides with the trigonometric expansion of the determinant and
/// reduces to cos(2*pi*k) - 1 for alpha = 1. Roots are the eigen-wavenumbers.
SecularValue secular_circle(double k, const SystemConfig& config);

/// Finite trigonometric series for the circle secular function:
///   cos(2k*pi) - (1-beta^2)^(n/2)
///   + sum over even m >= 2 of beta^m * sum_{i1<...<im}
///       cos(2k(x_{i1} - x_{i2} + ... + x_{i_{m-1}} - x_{i_m} + pi)).
/// Independent of the matrix-product route; enumeration is 2^n-sized, so the
/// evaluation refuses n > 12.
double secular_circle_expansion(double k, const SystemConfig& config);

/// Normalized segment secular function: propagate the Dirichlet-compatible
/// coefficients (1, -1) through the interactions and close with the Dirichlet
/// condition at 2*pi. Reduces to sin(2*pi*k) for alpha = 1; for n = 1 equals
/// sin(2*pi*k) + beta*sin(2k(x_1 - pi)).
SecularValue secular_segment(double k, const SystemConfig& config);

/// Production evaluator for the secular function of a fixed system.
///
/// Carries the reduced propagation (two complex amplitudes instead of full
/// matrices) and a phase-rotation recurrence for uniform grids, where the
/// per-point exp(2ik x_j) factors advance by a fixed rotation per step.
class SecularFunction {
  public:
    explicit SecularFunction(const SystemConfig& config);

    double operator()(double k) const;

    /// Values at k0 + i*h for i = 0..count-1. Matches operator() to within a
    /// few ulp of phase drift; the recurrence is re-anchored at k0.
    void eval_grid(double k0, double h, int count, std::vector<double>& out) const;

    const SystemConfig& config() const { return config_; }
    double beta() const { return beta_; }
    int n() const { return static_cast<int>(positions_.size()); }

  private:
    SystemConfig config_;
    std::vector<double> positions_;
    double beta_ = 0.0;
    double norm_ = 1.0; // (1 - beta^2)^(n/2)
};

} // namespace pointspec

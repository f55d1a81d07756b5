#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pointspec/system.hpp"

namespace pointspec {

/// lambda_j^{+-} = +-(1/2pi) * sqrt( (sum_k cos(2 j x_k))^2 +
///                                   (sum_k sin(2 j x_k))^2 ).
/// First-order splitting amplitude of the doubly degenerate circle level j.
std::pair<double, double> lambda_pm(int j, std::span<const double> positions);

/// Weak-coupling prediction for the circle doublet around k = j.
struct DoubletPrediction {
    int j = 0;
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    double k_lower = 0.0;         // j - |beta| * lambda_plus
    double k_upper = 0.0;         // j + |beta| * lambda_plus
    double odd_spacing = 0.0;     // 4 |beta| lambda_plus  (in e = 2k units)
};

/// Predictions for j = 1..J. Valid while |beta| * lambda_j << 1; callers can
/// consult weak_coupling_ok(config) before trusting them.
std::vector<DoubletPrediction> perturbative_doublets(const SystemConfig& config, int J);

/// Even spacing s_{2j} = 2 - 2|beta| (lambda_plus_{j+1} + lambda_plus_j).
double predicted_even_spacing(const DoubletPrediction& a, const DoubletPrediction& b,
                              double beta);

/// |beta| <= 1/(2n) heuristic for the validity of first-order results.
bool weak_coupling_ok(const SystemConfig& config);

/// Weak-coupling prediction for a segment level near k = j/2.
/// gamma_j = (1/2pi) sum_k sin(j x_k); the root shifts to j/2 - beta*gamma_j
/// (the sign follows from the expansion of the segment secular function).
struct SegmentPrediction {
    int j = 0;
    double gamma = 0.0;
    double k_pred = 0.0;
};

SegmentPrediction gamma_segment(int j, std::span<const double> positions, double beta);

} // namespace pointspec

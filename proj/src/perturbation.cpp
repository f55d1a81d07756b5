#include "pointspec/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pointspec {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::pair<double, double> lambda_pm(int j, std::span<const double> positions) {
    if (j < 1) throw std::invalid_argument("lambda_pm: j must be >= 1");
    double c = 0.0, s = 0.0;
    for (double x : positions) {
        c += std::cos(2.0 * j * x);
        s += std::sin(2.0 * j * x);
    }
    const double lam = std::sqrt(c * c + s * s) / kTwoPi;
    return {-lam, lam};
}

std::vector<DoubletPrediction> perturbative_doublets(const SystemConfig& config, int J) {
    if (config.topology != Topology::Circle)
        throw std::invalid_argument("perturbative_doublets: circle topology required");
    if (J < 1) throw std::invalid_argument("perturbative_doublets: J must be >= 1");
    config.validate();
    const double abs_beta = std::abs(config.beta());
    std::vector<DoubletPrediction> out;
    out.reserve(J);
    for (int j = 1; j <= J; ++j) {
        const auto [lm, lp] = lambda_pm(j, config.positions);
        DoubletPrediction d;
        d.j = j;
        d.lambda_minus = lm;
        d.lambda_plus = lp;
        d.k_lower = j - abs_beta * lp;
        d.k_upper = j + abs_beta * lp;
        d.odd_spacing = 4.0 * abs_beta * lp;
        out.push_back(d);
    }
    return out;
}

double predicted_even_spacing(const DoubletPrediction& a, const DoubletPrediction& b,
                              double beta) {
    return 2.0 - 2.0 * std::abs(beta) * (a.lambda_plus + b.lambda_plus);
}

bool weak_coupling_ok(const SystemConfig& config) {
    const int n = config.n();
    if (n == 0) return true;
    return std::abs(config.beta()) <= 1.0 / (2.0 * n);
}

SegmentPrediction gamma_segment(int j, std::span<const double> positions, double beta) {
    if (j < 1) throw std::invalid_argument("gamma_segment: j must be >= 1");
    double g = 0.0;
    for (double x : positions) g += std::sin(j * x);
    g /= kTwoPi;
    // the first-order root shift carries the opposite sign of gamma
    return {j, g, 0.5 * j - beta * g};
}

} // namespace pointspec

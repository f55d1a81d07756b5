#include "pointspec/secular.hpp"

#include <cmath>
#include <numbers>

namespace pointspec {

namespace {

using Complex = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm_factor(double beta, int n) {
    return std::pow(1.0 - beta * beta, 0.5 * n);
}

} // namespace

TransferMatrix transfer_matrix(double k, double alpha, double x_j) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("transfer_matrix: alpha must be positive");
    const double diag = 0.5 * (1.0 / alpha + alpha);
    const double off = 0.5 * (1.0 / alpha - alpha);
    const Complex phase = std::polar(1.0, 2.0 * k * x_j);
    TransferMatrix c;
    c << Complex(diag, 0.0), off * std::conj(phase),
         off * phase,        Complex(diag, 0.0);
    return c;
}

TransferMatrix boundary_matrix(double k) {
    const Complex phase = std::polar(1.0, kTwoPi * k);
    TransferMatrix c;
    c << phase, Complex(0.0, 0.0),
         Complex(0.0, 0.0), std::conj(phase);
    return c;
}

SecularValue secular_circle(double k, const SystemConfig& config) {
    if (config.topology != Topology::Circle)
        throw std::invalid_argument("secular_circle: config topology is not Circle");
    config.validate();
    TransferMatrix prod = TransferMatrix::Identity();
    for (double x : config.positions)
        prod = transfer_matrix(k, config.alpha, x) * prod;
    prod = boundary_matrix(k) * prod;
    // det(M - I) = 2 - tr(M) for unimodular M; normalized so the value equals
    // the trigonometric expansion of the determinant.
    const Complex z = norm_factor(config.beta(), config.n()) * (prod.trace() - 2.0) * 0.5;
    return {z.real(), std::abs(z.imag())};
}

double secular_circle_expansion(double k, const SystemConfig& config) {
    if (config.topology != Topology::Circle)
        throw std::invalid_argument("secular_circle_expansion: config topology is not Circle");
    const int n = config.n();
    if (n > 12)
        throw std::invalid_argument("secular_circle_expansion: n > 12 (2^n-sized enumeration)");
    config.validate();
    const double beta = config.beta();
    const auto& xs = config.positions;

    double total = std::cos(kTwoPi * k) - norm_factor(beta, n);
    std::vector<int> idx;
    for (int m = 2; m <= n; m += 2) {
        const double beta_m = std::pow(beta, m);
        // ordered subsets i1 < ... < im with alternating-sign position sum
        idx.assign(m, 0);
        for (int i = 0; i < m; ++i) idx[i] = i;
        while (true) {
            double arg = std::numbers::pi;
            for (int i = 0; i < m; ++i) arg += (i % 2 == 0 ? xs[idx[i]] : -xs[idx[i]]);
            total += beta_m * std::cos(2.0 * k * arg);
            int pos = m - 1;
            while (pos >= 0 && idx[pos] == n - m + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
        }
    }
    return total;
}

SecularValue secular_segment(double k, const SystemConfig& config) {
    if (config.topology != Topology::Segment)
        throw std::invalid_argument("secular_segment: config topology is not Segment");
    config.validate();
    // Dirichlet launch f(0) = 0: (A, B) = (1, -1), propagated through the
    // interactions; Dirichlet closure at 2*pi gives the secular value.
    Eigen::Vector2cd ab;
    ab << Complex(1.0, 0.0), Complex(-1.0, 0.0);
    for (double x : config.positions)
        ab = transfer_matrix(k, config.alpha, x) * ab;
    const Complex phase = std::polar(1.0, kTwoPi * k);
    const Complex z = norm_factor(config.beta(), config.n()) *
                      (phase * ab(0) + std::conj(phase) * ab(1)) / Complex(0.0, 2.0);
    return {z.real(), std::abs(z.imag())};
}

SecularFunction::SecularFunction(const SystemConfig& config)
    : config_(config), positions_(config.positions), beta_(config.beta()),
      norm_(norm_factor(config.beta(), config.n())) {
    config.validate();
}

double SecularFunction::operator()(double k) const {
    if (config_.topology == Topology::Circle) {
        // Reduced form of the transfer-matrix product: the product of the
        // normalized matrices [[1, b e^{-i th}], [b e^{i th}, 1]] keeps the
        // structure [[a, conj(b)], [b, conj(a)]], so two amplitudes suffice.
        Complex a(1.0, 0.0), b(0.0, 0.0);
        for (double x : positions_) {
            const Complex ph = std::polar(1.0, 2.0 * k * x);
            const Complex a_new = a + beta_ * std::conj(ph) * b;
            b = beta_ * ph * a + b;
            a = a_new;
        }
        const Complex w = std::polar(1.0, kTwoPi * k);
        return (w * a).real() - norm_;
    }
    Complex a(1.0, 0.0), b(-1.0, 0.0);
    for (double x : positions_) {
        const Complex ph = std::polar(1.0, 2.0 * k * x);
        const Complex a_new = a + beta_ * std::conj(ph) * b;
        b = beta_ * ph * a + b;
        a = a_new;
    }
    const Complex w = std::polar(1.0, kTwoPi * k);
    return (w * a).imag();
}

void SecularFunction::eval_grid(double k0, double h, int count, std::vector<double>& out) const {
    out.resize(count);
    const std::size_t n = positions_.size();
    // e^{2ikx_j} advanced by a fixed rotation per grid step; re-anchored at k0
    // so the accumulated phase drift stays at the ulp level per unit window.
    std::vector<Complex> phase(n), rot(n);
    for (std::size_t j = 0; j < n; ++j) {
        phase[j] = std::polar(1.0, 2.0 * k0 * positions_[j]);
        rot[j] = std::polar(1.0, 2.0 * h * positions_[j]);
    }
    Complex wphase = std::polar(1.0, kTwoPi * k0);
    const Complex wrot = std::polar(1.0, kTwoPi * h);
    const bool circle = config_.topology == Topology::Circle;
    for (int i = 0; i < count; ++i) {
        Complex a(1.0, 0.0), b(circle ? 0.0 : -1.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const Complex ph = phase[j];
            const Complex a_new = a + beta_ * std::conj(ph) * b;
            b = beta_ * ph * a + b;
            a = a_new;
            phase[j] *= rot[j];
        }
        out[i] = circle ? (wphase * a).real() - norm_ : (wphase * a).imag();
        wphase *= wrot;
    }
}

} // namespace pointspec

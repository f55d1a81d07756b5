#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pointspec/rootfind.hpp"

namespace pointspec {

/// Unfolded levels e_l = 2 k_l (multiplicity already expanded in the root
/// list); `drop` removes that many low-lying levels first.
std::vector<double> unfold(const Spectrum& spectrum, int drop = 0);

/// Consecutive spacings s_l = e_{l+1} - e_l split by the parity of l
/// (l = 1 at the first retained level, so spacings[0] is s_1, an odd one).
struct SpacingSeries {
    std::vector<double> levels;
    std::vector<double> spacings;

    std::vector<double> odd() const;  // s_1, s_3, ...
    std::vector<double> even() const; // s_2, s_4, ...
};

SpacingSeries parity_split(std::vector<double> levels);

/// Sample rescaled to unit mean. `degenerate` flags a (near-)zero mean, as in
/// the free circle where every odd spacing vanishes.
struct NormalizedSample {
    std::vector<double> values;
    double mean = 0.0;
    bool degenerate = false;
};

NormalizedSample normalize_to_unit_mean(std::span<const double> sample);

class EmpiricalCdf {
  public:
    explicit EmpiricalCdf(std::vector<double> sample); // throws on empty
    double operator()(double s) const;
    const std::vector<double>& sorted() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }

  private:
    std::vector<double> sorted_;
};

/// Integral of (F_emp - F_ref)^2 ds, computed exactly piecewise: the ECDF is
/// constant between samples and F_ref is integrated there by Gauss-Legendre
/// panels. `tail_cut` truncates where 1 - F_ref drops below 1e-8.
double delta_F(const EmpiricalCdf& empirical, const std::function<double(double)>& ref_cdf,
               double tail_cut);

/// Same difference functional between two reference CDFs.
double delta_F_between(const std::function<double(double)>& cdf_a,
                       const std::function<double(double)>& cdf_b, double upper);

/// sup_s |F_emp(s) - F_ref(s)|.
double ks_distance(const EmpiricalCdf& empirical, const std::function<double(double)>& ref_cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

struct Histogram {
    std::vector<double> edges;    // size bins + 1
    std::vector<double> density;  // area-normalized
    std::vector<std::size_t> counts;
};

/// Density histogram; bin_width <= 0 picks Freedman-Diaconis.
Histogram histogram_density(std::span<const double> sample, double bin_width = 0.0);

/// Log-log slope of the empirical density near s -> 0: weighted least-squares
/// fit over the lowest decade of log-spaced bins holding at least 64 counts,
/// restricted below the distribution peak; a quadratic term absorbs curvature
/// and the slope is read off near the low edge. Throws std::runtime_error when
/// fewer than four bins qualify.
double small_s_exponent(std::span<const double> sample);

struct NumberVarianceCurve {
    std::vector<double> L;
    std::vector<double> sigma2;
    std::vector<std::size_t> windows;
};

/// Count variance in windows of length L slid at stride L/4 across the
/// unfolded sequence.
NumberVarianceCurve number_variance(std::span<const double> levels,
                                    std::span<const double> L_grid);

} // namespace pointspec

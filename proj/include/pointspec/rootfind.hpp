#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointspec/secular.hpp"
#include "pointspec/system.hpp"

namespace pointspec {

/// Scan/refine parameters. Zeros mean "derive from the system":
/// base_step   -> min(0.01, 1/(8(n+1))), oversampling the fastest oscillation
///                of the secular function (highest frequency <= 2*pi*(n+1));
/// tangency_threshold -> max(1e-6, beta^2 * n), the scale of the perturbative
///                doublet bump.
struct ScanPolicy {
    double base_step = 0.0;
    double refine_tolerance = 1e-13; // relative bracket width target (abs below k=1)
    double tangency_threshold = 0.0;
    int max_rescans = 3;
    int threads = 1; // 0 -> hardware concurrency
};

struct Bracket {
    double lo = 0.0, hi = 0.0;
    double f_lo = 0.0, f_hi = 0.0;
};

/// Grid local minimum of |f| without a sign change; candidate for a double
/// root or an unresolved close pair.
struct TangencySuspect {
    double k = 0.0;
    double f = 0.0;
    double half_width = 0.0; // probe bracket is [k - half_width, k + half_width]
};

struct ScanResult {
    std::vector<Bracket> brackets;
    std::vector<TangencySuspect> suspects;
    std::vector<double> grid_roots; // exact zeros landing on grid points
};

struct TangencyResolution {
    std::vector<double> roots; // 0, 1 (double) or 2 entries
    bool double_root = false;
    double residual = 0.0;
};

/// Root list with per-entry multiplicity (double roots appear once per
/// multiplicity in `roots`, and `multiplicities[i]` tags every copy).
struct Spectrum {
    std::vector<double> roots;
    std::vector<int> multiplicities;
    std::vector<double> residuals;

    struct Diagnostics {
        double scan_step = 0.0;
        int rescans = 0;
        int max_count_deviation = 0;  // max over integer K of |N(K) - 2K|
        double worst_k = 0.0;
        std::vector<std::pair<double, double>> unresolved; // intervals that failed
    } diagnostics;

    std::size_t size() const { return roots.size(); }
};

/// Raised when the Weyl count check cannot be satisfied after the allowed
/// rescans; carries the first suspect unit interval.
class CompletenessError : public std::runtime_error {
  public:
    CompletenessError(double lo, double hi, const std::string& what)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}
    double interval_lo() const { return lo_; }
    double interval_hi() const { return hi_; }

  private:
    double lo_, hi_;
};

/// Sign-change brackets plus tangency suspects of f on [lo, hi] sampled at
/// `step`. Suspects require |f| below `threshold` at an interior (or right
/// edge) local minimum of |f| with no sign change around it.
ScanResult bracket_scan(const std::function<double(double)>& f, double lo, double hi,
                        double step, double threshold);

/// Bisection to a bracket width of max(tol_rel * |k|, tol_rel) with the
/// midpoint returned; precondition: f changes sign across the bracket.
double refine_root(const std::function<double(double)>& f, const Bracket& bracket,
                   double tol_rel = 1e-13);

/// Classify a tangency suspect: locate the local extremum of f nearest the
/// suspect; emit two roots if f crosses zero there, one double root if it
/// touches within residual noise, nothing if it stays clear.
TangencyResolution resolve_tangency(const std::function<double(double)>& f,
                                    const TangencySuspect& suspect);

/// All positive roots of the secular function on (0, k_max], sorted, with
/// multiplicity and a Weyl-count completeness certificate
/// |N(K) - 2K| <= n + 4 at every integer K. Unit windows may be scanned in
/// parallel; the result is identical to a serial scan.
Spectrum find_spectrum_range(const SystemConfig& config, double k_max,
                             const ScanPolicy& policy = {});

/// First `count` positive roots (the scanned range is grown as needed).
Spectrum find_spectrum(const SystemConfig& config, std::size_t count,
                       const ScanPolicy& policy = {});

} // namespace pointspec

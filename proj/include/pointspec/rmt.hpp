#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace pointspec {

/// Unit-mean spacing reference on [0, inf).
class ReferenceDistribution {
  public:
    virtual ~ReferenceDistribution() = default;
    virtual double pdf(double s) const = 0;
    virtual double cdf(double s) const = 0;
    virtual std::string name() const = 0;
    /// Point beyond which 1 - cdf < 1e-8; integration cutoff.
    virtual double tail_cut() const = 0;
};

/// Wigner surmise P(s) = (pi/2) s exp(-pi s^2 / 4); F(s) = 1 - exp(-pi s^2/4).
class WignerDistribution final : public ReferenceDistribution {
  public:
    double pdf(double s) const override;
    double cdf(double s) const override;
    std::string name() const override { return "wigner"; }
    double tail_cut() const override;
};

/// Poisson spacings: F(s) = 1 - exp(-s).
class PoissonDistribution final : public ReferenceDistribution {
  public:
    double pdf(double s) const override;
    double cdf(double s) const override;
    std::string name() const override { return "poisson"; }
    double tail_cut() const override;
};

// ---------------------------------------------------------------------------
// Exact GOE machinery (sine-kernel Fredholm determinants)
// ---------------------------------------------------------------------------

/// Gap probability E_1(0; s) for the bulk GOE spectrum: the Fredholm
/// determinant of the even-sector sine kernel
///   K+(x, y) = sin(pi(x-y))/(pi(x-y)) + sin(pi(x+y))/(pi(x+y))
/// on (0, s/2), discretized by Gauss-Legendre Nystrom quadrature. Spectrally
/// convergent; `nodes` = 64 is converged to machine precision for s <= 8.
double goe_gap_probability(double s, int nodes = 64);

/// d/ds of the gap probability, via the resolvent trace identity
/// E'(s) = -E(s) tr[(I - A)^{-1} A'(s)]. The spacing CDF is 1 + E'(s).
double goe_gap_probability_derivative(double s, int nodes = 64);

/// Exact spacing CDF F(s) = 1 + E_1'(0; s). Used as the high-accuracy oracle
/// for the shipped table.
double goe_cdf_exact(double s, int nodes = 64);

// ---------------------------------------------------------------------------
// Shipped GOE table (series + asymptotic composite)
// ---------------------------------------------------------------------------

struct GoeTableParams {
    double grid_step = 0.005;
    double s_max = 6.0;
    int quad_nodes = 64;      // Nystrom size behind the Taylor coefficients
    int taylor_order = 42;    // truncation of the small-s series
    double blend_center = 2.0495; // series -> asymptotic crossover midpoint
    double blend_half_width = 0.25;
    double calibration_s = 7.0;   // where the asymptotic prefactor is matched
};

struct GoeTable {
    std::vector<double> s;
    std::vector<double> F;
    std::map<std::string, std::string> metadata;

    void save(const std::string& path) const;
    static GoeTable load(const std::string& path);
};

class GoeGenerationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Build the spacing-CDF table from the truncated Taylor series of the gap
/// probability (coefficients extracted from the Fredholm determinant by a
/// Cauchy integral) blended into the large-s asymptotic
/// E ~ C s^{-1/8} exp(-pi^2 s^2/16 - pi s/4). Runs the
/// Delta(F_GOE - F_W) = 3.9280e-5 self-check and throws GoeGenerationError
/// if it misses by more than 1e-6.
GoeTable generate_goe_table(const GoeTableParams& params = {});

/// Table-backed reference with monotone cubic (PCHIP) interpolation; pdf is
/// the spline derivative.
class GoeDistribution final : public ReferenceDistribution {
  public:
    explicit GoeDistribution(GoeTable table);
    double pdf(double s) const override;
    double cdf(double s) const override;
    std::string name() const override { return "goe"; }
    double tail_cut() const override;
    const GoeTable& table() const { return table_; }

  private:
    GoeTable table_;
    std::vector<double> slopes_; // PCHIP derivatives at the knots
    double tail_cut_ = 0.0;
};

/// Process-wide table: loads `path` when given (or POINTSPEC_GOE_TABLE in the
/// environment), otherwise regenerates with default parameters (deterministic,
/// under a second). The instance is cached.
const GoeDistribution& goe_reference(const std::string& path = "");

/// Integral of (F_GOE - F_W)^2; the paper-reported constant is 3.9280e-5.
double goe_wigner_delta(const GoeDistribution& goe);

// ---------------------------------------------------------------------------
// Monte-Carlo GOE oracle
// ---------------------------------------------------------------------------

/// Pooled unfolded nearest-neighbor spacings from `count` random real
/// symmetric matrices (Gaussian entries, doubled variance on the diagonal).
/// Only the central quarter of each spectrum is used; spacings are unfolded
/// by the local mean over a +-5% index window. Deterministic per seed and
/// independent of threading (per-matrix RNG streams).
std::vector<double> goe_mc_oracle(int dim, int count, std::uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// Number variance references
// ---------------------------------------------------------------------------

enum class Ensemble { GOE, GUE, Poisson };

/// Sine-kernel number variance Sigma^2(L) = L - 2 int_0^L (L-r) Y_2(r) dr with
/// the standard two-level cluster functions; Poisson returns L.
double number_variance_reference(Ensemble ensemble, double L);

} // namespace pointspec

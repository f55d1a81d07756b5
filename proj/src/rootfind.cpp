#include "pointspec/rootfind.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace pointspec {

namespace {

struct RootEntry {
    double k = 0.0;
    int mult = 1;
    double residual = 0.0;
};

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

double auto_step(const SystemConfig& config) {
    return std::min(0.01, 1.0 / (8.0 * (config.n() + 1)));
}

double auto_threshold(const SystemConfig& config) {
    const double beta = config.beta();
    return std::max(1e-6, beta * beta * config.n());
}

/// One unit window (lo, lo+1] sampled at 1/m; emits roots owned by the
/// window. The grid carries one phantom point past the right edge so that
/// edge tangencies are claimed by exactly one window.
std::vector<RootEntry> scan_window(const SecularFunction& fn, double lo, int m,
                                   double threshold, double tol_rel) {
    const double h = 1.0 / m;
    const double hi = lo + 1.0;
    std::vector<double> f;
    fn.eval_grid(lo, h, m + 2, f);
    // the edge points are shared with the neighboring windows: evaluate them
    // directly so both sides see bit-identical values (the rotation recurrence
    // carries ulp-level drift, which matters exactly at edge tangencies)
    f[0] = fn(lo);
    f[m] = fn(hi);
    const auto feval = [&fn](double k) { return fn(k); };

    std::vector<RootEntry> out;
    for (int i = 0; i <= m; ++i) {
        const double ki = i == m ? hi : lo + i * h;
        if (f[i] == 0.0) {
            if (ki <= lo) continue; // grid zero on the left edge belongs left
            const bool crossing = i > 0 && i < m + 1 && sign_of(f[i - 1]) * sign_of(f[i + 1]) < 0;
            out.push_back({ki, crossing ? 1 : 2, 0.0});
            continue;
        }
        if (i < m && f[i + 1] != 0.0 && sign_of(f[i]) * sign_of(f[i + 1]) < 0) {
            Bracket br{ki, ki + h, f[i], f[i + 1]};
            const double root = refine_root(feval, br, tol_rel);
            out.push_back({root, 1, std::abs(fn(root))});
            continue;
        }
        if (i == 0) continue; // left-edge minima are the previous window's
        const double ai = std::abs(f[i]);
        if (ai < threshold && ai <= std::abs(f[i - 1]) && ai < std::abs(f[i + 1]) &&
            sign_of(f[i - 1]) == sign_of(f[i]) && sign_of(f[i]) == sign_of(f[i + 1])) {
            const auto res = resolve_tangency(feval, {ki, f[i], h});
            if (res.double_root) {
                if (res.roots.front() > 0.0) out.push_back({res.roots.front(), 2, res.residual});
            } else {
                for (double r : res.roots)
                    if (r > 0.0) out.push_back({r, 1, res.residual});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const RootEntry& a, const RootEntry& b) { return a.k < b.k; });
    return out;
}

struct WindowPlan {
    int index = 0;
    int subdivisions = 0; // grid is m * 4^subdivisions
};

} // namespace

ScanResult bracket_scan(const std::function<double(double)>& f, double lo, double hi,
                        double step, double threshold) {
    ScanResult result;
    if (!(hi > lo)) return result;
    if (!(step > 0.0)) throw std::invalid_argument("bracket_scan: step must be positive");
    const int m = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
    const double h = (hi - lo) / m;
    std::vector<double> vals(m + 1);
    for (int i = 0; i <= m; ++i) vals[i] = f(lo + i * h);
    for (int i = 0; i < m; ++i) {
        if (vals[i] == 0.0) {
            result.grid_roots.push_back(lo + i * h);
            continue;
        }
        if (vals[i + 1] != 0.0 && sign_of(vals[i]) * sign_of(vals[i + 1]) < 0)
            result.brackets.push_back({lo + i * h, lo + (i + 1) * h, vals[i], vals[i + 1]});
    }
    if (vals[m] == 0.0) result.grid_roots.push_back(hi);
    for (int i = 1; i < m; ++i) {
        const double ai = std::abs(vals[i]);
        if (ai != 0.0 && ai < threshold && ai <= std::abs(vals[i - 1]) && ai < std::abs(vals[i + 1]) &&
            sign_of(vals[i - 1]) == sign_of(vals[i]) && sign_of(vals[i]) == sign_of(vals[i + 1]))
            result.suspects.push_back({lo + i * h, vals[i], h});
    }
    return result;
}

double refine_root(const std::function<double(double)>& f, const Bracket& bracket,
                   double tol_rel) {
    double a = bracket.lo, b = bracket.hi;
    double fa = bracket.f_lo, fb = bracket.f_hi;
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (sign_of(fa) * sign_of(fb) >= 0)
        throw std::invalid_argument("refine_root: bracket does not change sign");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (a + b);
        if (b - a <= tol_rel * std::max(1.0, std::abs(mid)) || mid <= a || mid >= b) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (sign_of(fa) * sign_of(fm) < 0) {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

TangencyResolution resolve_tangency(const std::function<double(double)>& f,
                                    const TangencySuspect& suspect) {
    const double sigma = suspect.f >= 0.0 ? 1.0 : -1.0;
    const auto g = [&](double x) { return sigma * f(x); };
    double a = suspect.k - suspect.half_width;
    double b = suspect.k + suspect.half_width;
    const double ga0 = g(a), gb0 = g(b);

    static const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double g1 = g(x1), g2 = g(x2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(a)); ++iter) {
        if (g1 < g2) {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - invphi * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + invphi * (b - a);
            g2 = g(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    const double gm = g(xm);

    TangencyResolution res;
    const double touch_tol = 1e-11 * std::max({1.0, ga0, gb0});
    if (gm < -touch_tol) {
        // the dip crosses: refine the two enclosing sign changes
        const double lo0 = suspect.k - suspect.half_width;
        const double hi0 = suspect.k + suspect.half_width;
        const double fl = f(lo0), fm_ = f(xm), fr = f(hi0);
        res.roots.push_back(refine_root(f, {lo0, xm, fl, fm_}));
        res.roots.push_back(refine_root(f, {xm, hi0, fm_, fr}));
        res.residual = std::max(std::abs(f(res.roots[0])), std::abs(f(res.roots[1])));
    } else if (gm <= touch_tol) {
        res.roots.assign(2, xm); // double root
        res.double_root = true;
        res.residual = std::abs(gm);
    }
    return res;
}

namespace {

Spectrum assemble(const std::vector<std::vector<RootEntry>>& per_window, double k_max,
                  double step_used, int rescans) {
    std::vector<RootEntry> entries;
    for (auto& w : per_window)
        for (const auto& e : w) entries.push_back(e);
    std::sort(entries.begin(), entries.end(),
              [](const RootEntry& a, const RootEntry& b) { return a.k < b.k; });

    Spectrum spec;
    // keep roots that resolved a hair past k_max (edge tangencies own them)
    const double k_keep = k_max + 1e-9 * std::max(1.0, k_max);
    for (const auto& e : entries) {
        if (!(e.k > 0.0) || e.k > k_keep) continue;
        for (int c = 0; c < e.mult; ++c) {
            spec.roots.push_back(e.k);
            spec.multiplicities.push_back(e.mult);
            spec.residuals.push_back(e.residual);
        }
    }
    spec.diagnostics.scan_step = step_used;
    spec.diagnostics.rescans = rescans;

    int worst = 0;
    double worst_k = 0.0;
    std::size_t idx = 0;
    for (int K = 1; K <= static_cast<int>(std::floor(k_max)); ++K) {
        while (idx < spec.roots.size() && spec.roots[idx] <= static_cast<double>(K)) ++idx;
        const int dev = static_cast<int>(idx) - 2 * K;
        if (std::abs(dev) > std::abs(worst)) {
            worst = dev;
            worst_k = K;
        }
    }
    spec.diagnostics.max_count_deviation = worst;
    spec.diagnostics.worst_k = worst_k;
    return spec;
}

/// First integer K violating |N(K) - 2K| <= n + 4, or 0 if none.
int first_violation(const Spectrum& spec, double k_max, int n_allow) {
    std::size_t idx = 0;
    for (int K = 1; K <= static_cast<int>(std::floor(k_max)); ++K) {
        while (idx < spec.roots.size() && spec.roots[idx] <= static_cast<double>(K)) ++idx;
        if (std::abs(static_cast<int>(idx) - 2 * K) > n_allow) return K;
    }
    return 0;
}

} // namespace

Spectrum find_spectrum_range(const SystemConfig& config, double k_max,
                             const ScanPolicy& policy) {
    config.validate();
    if (!(k_max > 0.0)) throw std::invalid_argument("find_spectrum_range: k_max must be > 0");

    const double step = policy.base_step > 0.0 ? policy.base_step : auto_step(config);
    const double threshold =
        policy.tangency_threshold > 0.0 ? policy.tangency_threshold : auto_threshold(config);
    const double tol_rel = policy.refine_tolerance > 0.0 ? policy.refine_tolerance : 1e-13;
    const int base_m = std::max(8, static_cast<int>(std::ceil(1.0 / step)));
    // one window past floor(k_max): a root sitting exactly on an integer k_max
    // may resolve an ulp above it and would otherwise fall between windows
    const int windows = static_cast<int>(std::floor(k_max)) + 1;

    int threads = policy.threads;
    if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<int>(threads, windows);

    const SecularFunction fn(config);
    std::vector<std::vector<RootEntry>> per_window(windows);

    const auto run_windows = [&](const std::vector<WindowPlan>& plan) {
        std::atomic<std::size_t> next{0};
        const auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < plan.size(); i = next.fetch_add(1)) {
                const auto& wp = plan[i];
                int m = base_m;
                for (int s = 0; s < wp.subdivisions; ++s) m *= 4;
                per_window[wp.index] =
                    scan_window(fn, static_cast<double>(wp.index), m, threshold, tol_rel);
            }
        };
        if (threads <= 1 || plan.size() <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            const int t_use = std::min<int>(threads, static_cast<int>(plan.size()));
            pool.reserve(t_use);
            for (int t = 0; t < t_use; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
    };

    std::vector<WindowPlan> plan(windows);
    for (int w = 0; w < windows; ++w) plan[w] = {w, 0};
    run_windows(plan);

    const int n_allow = config.n() + 4;
    int rescans = 0;
    Spectrum spec = assemble(per_window, k_max, step, rescans);
    int bad_K = first_violation(spec, k_max, n_allow);
    while (bad_K != 0 && rescans < policy.max_rescans) {
        ++rescans;
        // re-grid the trailing stretch first, then everything up to the fault
        const int from = rescans == 1 ? std::max(0, bad_K - (config.n() + 5)) : 0;
        std::vector<WindowPlan> again;
        for (int w = from; w < bad_K && w < windows; ++w) again.push_back({w, rescans});
        run_windows(again);
        spec = assemble(per_window, k_max, step, rescans);
        bad_K = first_violation(spec, k_max, n_allow);
    }
    if (bad_K != 0) {
        spec.diagnostics.unresolved.emplace_back(bad_K - 1.0, bad_K);
        throw CompletenessError(bad_K - 1.0, bad_K,
                                "root count check failed in (" + std::to_string(bad_K - 1) +
                                    ", " + std::to_string(bad_K) + "] after " +
                                    std::to_string(rescans) + " rescans");
    }
    return spec;
}

Spectrum find_spectrum(const SystemConfig& config, std::size_t count,
                       const ScanPolicy& policy) {
    if (count == 0) throw std::invalid_argument("find_spectrum: count must be >= 1");
    double k_max = std::ceil(0.5 * (static_cast<double>(count) + config.n() + 8));
    for (int attempt = 0; attempt < 8; ++attempt) {
        Spectrum spec = find_spectrum_range(config, k_max, policy);
        if (spec.roots.size() >= count) {
            spec.roots.resize(count);
            spec.multiplicities.resize(count);
            spec.residuals.resize(count);
            return spec;
        }
        k_max += std::ceil(0.5 * (count - spec.roots.size()) + 4.0);
    }
    throw CompletenessError(0.0, k_max, "find_spectrum: could not collect enough roots");
}

} // namespace pointspec

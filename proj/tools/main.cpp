#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "pointspec/io.hpp"
#include "pointspec/perturbation.hpp"
#include "pointspec/rmt.hpp"
#include "pointspec/rootfind.hpp"
#include "pointspec/secular.hpp"
#include "pointspec/statistics.hpp"

namespace ps = pointspec;
namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kCompletenessError = 3,
    kSelfCheckError = 4,
    kIoError = 5,
};

struct Options {
    std::string topology = "circle";
    double alpha = 1.001;
    int n = 47;
    std::vector<double> positions; // explicit positions override --n
    long long roots = 100000;
    double kmax = 0.0; // roots count used unless kmax > 0
    int drop = -1;     // -1: drop the ground state on the circle when alpha != 1
    double step = 0.0;
    int rescans = 3;
    int threads = 0;
    std::uint64_t seed = 1;
    std::string output = ".";
    std::string goe_table;
    double bin_width = 0.0;
    double L_max = 10.0;
    double L_step = 0.5;
};

ps::SystemConfig make_config(const Options& opt) {
    const auto topo = opt.topology == "segment" ? ps::Topology::Segment : ps::Topology::Circle;
    auto xs = opt.positions.empty() ? ps::prime_positions(opt.n) : opt.positions;
    ps::SystemConfig cfg{topo, opt.alpha, std::move(xs)};
    cfg.validate();
    return cfg;
}

ps::ScanPolicy make_policy(const Options& opt) {
    ps::ScanPolicy policy;
    policy.base_step = opt.step;
    policy.max_rescans = opt.rescans;
    policy.threads = opt.threads;
    return policy;
}

int effective_drop(const Options& opt, const ps::SystemConfig& cfg) {
    if (opt.drop >= 0) return opt.drop;
    // the circle keeps one non-degenerate low root (the perturbed ground
    // state); spacing parity anchors at the first doublet
    return (cfg.topology == ps::Topology::Circle && cfg.alpha != 1.0) ? 1 : 0;
}

void echo_config(ps::io::KeyValueDocument& doc, const Options& opt,
                 const ps::SystemConfig& cfg) {
    doc.set("topology", opt.topology);
    doc.set("alpha", opt.alpha);
    doc.set("n", static_cast<long long>(cfg.n()));
    doc.set("positions_mode", opt.positions.empty() ? "primes" : "explicit");
    doc.set("roots", opt.roots);
    if (opt.kmax > 0.0) doc.set("kmax", opt.kmax);
    doc.set("drop", static_cast<long long>(effective_drop(opt, cfg)));
    doc.set("seed", static_cast<long long>(opt.seed));
    doc.set("threads", static_cast<long long>(opt.threads));
}

ps::Spectrum solve(const Options& opt, const ps::SystemConfig& cfg) {
    const auto policy = make_policy(opt);
    if (opt.kmax > 0.0) return ps::find_spectrum_range(cfg, opt.kmax, policy);
    return ps::find_spectrum(cfg, static_cast<std::size_t>(opt.roots), policy);
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct AnalysisResult {
    ps::io::KeyValueDocument summary;
    bool degenerate = false;
};

/// Spacing statistics of a spectrum: parity split, mean-normalized distances
/// to the references, small-s exponents, number variance.
AnalysisResult analyze_spectrum(const ps::Spectrum& spectrum, const Options& opt,
                                const ps::SystemConfig& cfg, bool write_files) {
    AnalysisResult result;
    auto& doc = result.summary;

    const int drop = effective_drop(opt, cfg);
    const auto levels = ps::unfold(spectrum, drop);
    if (levels.size() < 3) throw std::invalid_argument("analyze: not enough levels");
    const auto series = ps::parity_split(levels);
    const auto odd = series.odd();
    const auto even = series.even();

    const auto odd_norm = ps::normalize_to_unit_mean(odd);
    const auto even_norm = ps::normalize_to_unit_mean(even);
    doc.set("levels", static_cast<long long>(levels.size()));
    doc.set("spacings", static_cast<long long>(series.spacings.size()));
    doc.set("odd_mean", odd_norm.mean);
    doc.set("even_mean", even_norm.mean);

    const ps::WignerDistribution wigner;
    const auto& goe = ps::goe_reference(opt.goe_table);
    const auto wcdf = [&](double s) { return wigner.cdf(s); };
    const auto gcdf = [&](double s) { return goe.cdf(s); };

    if (odd_norm.degenerate) {
        result.degenerate = true;
        doc.set("status", "degenerate_odd_spacings");
    } else {
        const ps::EmpiricalCdf odd_ecdf(odd_norm.values);
        doc.set("status", "ok");
        doc.set("delta_F_W", ps::delta_F(odd_ecdf, wcdf, wigner.tail_cut()));
        doc.set("delta_F_GOE", ps::delta_F(odd_ecdf, gcdf, goe.tail_cut()));
        doc.set("ks_W_odd", ps::ks_distance(odd_ecdf, wcdf));
        doc.set("ks_GOE_odd", ps::ks_distance(odd_ecdf, gcdf));
        try {
            doc.set("small_s_exponent_odd", ps::small_s_exponent(odd_norm.values));
        } catch (const std::runtime_error&) {
            doc.set("small_s_exponent_odd", "insufficient-data");
        }
    }
    if (!even_norm.degenerate) {
        const ps::EmpiricalCdf even_ecdf(even_norm.values);
        doc.set("ks_W_even", ps::ks_distance(even_ecdf, wcdf));
        doc.set("ks_GOE_even", ps::ks_distance(even_ecdf, gcdf));
        try {
            doc.set("small_s_exponent_even", ps::small_s_exponent(even_norm.values));
        } catch (const std::runtime_error&) {
            doc.set("small_s_exponent_even", "insufficient-data");
        }
        if (!odd_norm.degenerate)
            doc.set("ks_odd_even", ps::ks_two_sample(odd_norm.values, even_norm.values));
    }
    doc.set("count_deviation", static_cast<long long>(spectrum.diagnostics.max_count_deviation));

    if (write_files) {
        const fs::path dir(opt.output);
        fs::create_directories(dir);
        ps::io::write_series((dir / "spacings_all.txt").string(), series.spacings,
                             "spacings s_l = e_{l+1} - e_l");
        ps::io::write_series((dir / "spacings_odd.txt").string(), odd, "odd spacings s_1, s_3, ...");
        ps::io::write_series((dir / "spacings_even.txt").string(), even,
                             "even spacings s_2, s_4, ...");
        if (!odd_norm.degenerate) {
            auto sorted = odd_norm.values;
            std::sort(sorted.begin(), sorted.end());
            ps::io::write_ecdf((dir / "ecdf_odd.txt").string(), sorted,
                               "mean-normalized odd spacings");
            ps::io::write_histogram((dir / "hist_odd.txt").string(),
                                    ps::histogram_density(odd_norm.values, opt.bin_width),
                                    "mean-normalized odd spacing density");
        }
        if (!even_norm.degenerate) {
            auto sorted = even_norm.values;
            std::sort(sorted.begin(), sorted.end());
            ps::io::write_ecdf((dir / "ecdf_even.txt").string(), sorted,
                               "mean-normalized even spacings");
            ps::io::write_histogram((dir / "hist_even.txt").string(),
                                    ps::histogram_density(even_norm.values, opt.bin_width),
                                    "mean-normalized even spacing density");
        }
        // number variance with ensemble references
        std::vector<double> grid;
        for (double L = opt.L_step; L <= opt.L_max; L += opt.L_step) grid.push_back(L);
        if (levels.size() >= 1000 && !grid.empty()) {
            const auto curve = ps::number_variance(levels, grid);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < curve.L.size(); ++i)
                rows.push_back({curve.L[i], curve.sigma2[i], static_cast<double>(curve.windows[i]),
                                ps::number_variance_reference(ps::Ensemble::GOE, curve.L[i]),
                                ps::number_variance_reference(ps::Ensemble::GUE, curve.L[i]),
                                curve.L[i]});
            ps::io::write_table((dir / "number_variance.txt").string(),
                                {"L", "sigma2", "windows", "goe", "gue", "poisson"}, rows,
                                "number variance with ensemble references");
        }
    }
    return result;
}

void write_summary(const ps::io::KeyValueDocument& doc, const Options& opt,
                   const std::string& name) {
    const fs::path dir(opt.output);
    fs::create_directories(dir);
    doc.save((dir / name).string());
}

int cmd_spectrum(const Options& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = make_config(opt);
    const auto spectrum = solve(opt, cfg);
    ps::io::KeyValueDocument doc;
    echo_config(doc, opt, cfg);
    doc.set("roots_found", static_cast<long long>(spectrum.roots.size()));
    doc.set("count_deviation", static_cast<long long>(spectrum.diagnostics.max_count_deviation));
    doc.set("rescans", static_cast<long long>(spectrum.diagnostics.rescans));
    doc.set("scan_step", spectrum.diagnostics.scan_step);
    double max_resid = 0.0;
    for (double r : spectrum.residuals) max_resid = std::max(max_resid, r);
    doc.set("max_residual", max_resid);

    const fs::path dir(opt.output);
    fs::create_directories(dir);
    ps::io::KeyValueDocument header;
    echo_config(header, opt, cfg);
    ps::io::write_roots((dir / "roots.txt").string(), spectrum, header);
    doc.set("timing_total_s", elapsed_s(t0));
    write_summary(doc, opt, "summary.txt");
    std::cout << "roots: " << spectrum.roots.size()
              << "  count-deviation: " << spectrum.diagnostics.max_count_deviation
              << "  max-residual: " << max_resid << "\n";
    return kOk;
}

int cmd_analyze(const Options& opt, const std::string& roots_file) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = make_config(opt);
    ps::Spectrum spectrum;
    if (!roots_file.empty()) {
        spectrum = ps::io::read_roots(roots_file);
        if (spectrum.roots.empty()) throw std::runtime_error("empty roots file: " + roots_file);
    } else {
        spectrum = solve(opt, cfg);
    }
    auto result = analyze_spectrum(spectrum, opt, cfg, true);
    ps::io::KeyValueDocument doc;
    echo_config(doc, opt, cfg);
    for (auto& e : result.summary.entries) doc.set(e.first, e.second);
    doc.set("timing_total_s", elapsed_s(t0));
    write_summary(doc, opt, "summary.txt");
    for (const auto& [k, v] : doc.entries)
        if (k.rfind("timing_", 0) != 0) std::cout << k << "=" << v << "\n";
    return kOk;
}

int cmd_sweep(const Options& opt, std::vector<double> alphas, double from, double to,
              double by) {
    const auto t0 = std::chrono::steady_clock::now();
    if (alphas.empty())
        for (double a = from; a <= to + 1e-12; a += by) alphas.push_back(a);
    if (alphas.empty()) throw std::invalid_argument("sweep: no alpha values");

    std::vector<std::vector<double>> rows;
    ps::io::KeyValueDocument doc;
    int failures = 0;
    for (double alpha : alphas) {
        Options local = opt;
        local.alpha = alpha;
        try {
            const auto cfg = make_config(local);
            const auto spectrum = solve(local, cfg);
            const auto result = analyze_spectrum(spectrum, local, cfg, false);
            const auto get = [&](const char* key) {
                const std::string* v = result.summary.find(key);
                return v ? std::stod(*v) : std::nan("");
            };
            const double dfw = result.degenerate ? std::nan("") : get("delta_F_W");
            const double dfg = result.degenerate ? std::nan("") : get("delta_F_GOE");
            rows.push_back({alpha, dfw, dfg, result.degenerate ? std::nan("") : get("ks_W_odd"),
                            result.degenerate ? 1.0 : 0.0});
            std::cout << "alpha=" << alpha << " dFW=" << dfw << " dFGOE=" << dfg
                      << (result.degenerate ? " [degenerate]" : "") << "\n";
        } catch (const std::exception& e) {
            ++failures;
            rows.push_back({alpha, std::nan(""), std::nan(""), std::nan(""), 2.0});
            std::cerr << "alpha=" << alpha << " failed: " << e.what() << "\n";
        }
    }
    const fs::path dir(opt.output);
    fs::create_directories(dir);
    ps::io::write_table((dir / "sweep.txt").string(),
                        {"alpha", "delta_F_W", "delta_F_GOE", "ks_W", "flag"}, rows,
                        "flag: 0 ok, 1 degenerate, 2 failed");
    echo_config(doc, opt, make_config(opt));
    doc.set("sweep_points", static_cast<long long>(alphas.size()));
    doc.set("sweep_failures", static_cast<long long>(failures));
    doc.set("timing_total_s", elapsed_s(t0));
    write_summary(doc, opt, "summary.txt");
    return kOk;
}

int cmd_perturb_check(const Options& opt, int J) {
    const auto cfg = make_config(opt);
    if (cfg.topology != ps::Topology::Circle)
        throw std::invalid_argument("perturb-check: circle topology required");
    if (!ps::weak_coupling_ok(cfg))
        std::cerr << "warning: |beta| > 1/(2n); first-order predictions may be poor\n";
    const double beta = cfg.beta();
    ps::ScanPolicy policy = make_policy(opt);
    const auto spectrum = ps::find_spectrum_range(cfg, J + 1.0, policy);
    const auto pred = ps::perturbative_doublets(cfg, J);
    if (spectrum.roots.size() < static_cast<std::size_t>(2 * J + 1))
        throw std::runtime_error("perturb-check: solver returned too few roots");

    std::vector<std::vector<double>> rows;
    double max_err = 0.0;
    for (int j = 1; j <= J; ++j) {
        const double lo = spectrum.roots[2 * j - 1];
        const double hi = spectrum.roots[2 * j];
        const double err =
            std::max(std::abs(lo - pred[j - 1].k_lower), std::abs(hi - pred[j - 1].k_upper));
        max_err = std::max(max_err, err);
        rows.push_back({static_cast<double>(j), lo, hi, pred[j - 1].k_lower,
                        pred[j - 1].k_upper, err});
    }
    const fs::path dir(opt.output);
    fs::create_directories(dir);
    ps::io::write_table((dir / "perturb_check.txt").string(),
                        {"j", "k_lower", "k_upper", "k_lower_pred", "k_upper_pred", "abs_err"},
                        rows, "exact vs first-order doublet positions");
    ps::io::KeyValueDocument doc;
    echo_config(doc, opt, cfg);
    doc.set("J", static_cast<long long>(J));
    doc.set("beta", beta);
    doc.set("max_abs_error", max_err);
    doc.set("beta_squared", beta * beta);
    write_summary(doc, opt, "summary.txt");
    std::cout << "max |k_exact - k_pred| = " << max_err << " (beta^2 = " << beta * beta
              << ")\n";
    return kOk;
}

int cmd_rmt_table(const Options& opt, double table_step, double smax, int nodes,
                  bool mc_check) {
    ps::GoeTableParams params;
    params.grid_step = table_step;
    params.s_max = smax;
    params.quad_nodes = nodes;
    const auto table = ps::generate_goe_table(params);
    const fs::path dir(opt.output);
    fs::create_directories(dir);
    const auto path = (dir / "goe_table.txt").string();
    table.save(path);
    const ps::GoeDistribution dist(table);
    const double delta = ps::goe_wigner_delta(dist);
    std::cout << "wrote " << path << "\n";
    std::cout << "Delta(F_GOE - F_W) = " << delta << "\n";
    if (mc_check) {
        const auto sample = ps::goe_mc_oracle(200, 500, opt.seed, opt.threads);
        const auto norm = ps::normalize_to_unit_mean(sample);
        const double ks =
            ps::ks_distance(ps::EmpiricalCdf(norm.values), [&](double s) { return dist.cdf(s); });
        std::cout << "MC oracle (" << sample.size() << " spacings): KS vs table = " << ks
                  << "\n";
    }
    return kOk;
}

int cmd_selftest(const Options& opt) {
    int failures = 0;
    const auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
        if (!ok) ++failures;
    };

    const auto free_cfg = ps::SystemConfig::circle(1.0, {});
    const auto free_spec = ps::find_spectrum_range(free_cfg, 10.0);
    bool free_ok = free_spec.roots.size() == 20;
    for (int l = 1; free_ok && l <= 10; ++l)
        free_ok = std::abs(free_spec.roots[2 * l - 2] - l) < 1e-6 &&
                  free_spec.multiplicities[2 * l - 2] == 2;
    check(free_ok, "free circle: doubly degenerate integer roots");

    const auto n1 = ps::SystemConfig::circle(2.0, {1.0});
    const auto n1_spec = ps::find_spectrum_range(n1, 10.0);
    const double d = std::acos(0.8) / (2.0 * std::numbers::pi);
    bool n1_ok = std::abs(n1_spec.roots[0] - d) < 1e-10;
    n1_ok = n1_ok && std::abs(n1_spec.roots[1] - (1.0 - d)) < 1e-10;
    check(n1_ok, "n=1 circle: arccos closed-form roots");

    const ps::WignerDistribution w;
    check(std::abs(w.cdf(1.0) - 0.544062) < 1e-5, "wigner cdf value at s=1");

    const auto cfg3 = ps::SystemConfig::circle(1.3, ps::prime_positions(3));
    bool osc_ok = true;
    for (double k = 0.1; k < 20.0; k += 0.173)
        osc_ok = osc_ok && std::abs(ps::secular_circle(k, cfg3).value -
                                    ps::secular_circle_expansion(k, cfg3)) < 1e-9;
    check(osc_ok, "secular expansion oracle, n=3");

    try {
        const auto& goe = ps::goe_reference(opt.goe_table);
        const double delta = ps::goe_wigner_delta(goe);
        check(std::abs(delta - 3.9280e-5) < 1e-6, "GOE table Delta self-check");
    } catch (const std::exception& e) {
        check(false, std::string("GOE table: ") + e.what());
    }
    return failures == 0 ? kOk : kSelfCheckError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral statistics of a 1D particle with scale-free point interactions"};
    app.set_config("--config", "", "key=value configuration file");
    Options opt;

    app.add_option("--topology", opt.topology, "circle | segment")
        ->check(CLI::IsMember({"circle", "segment"}));
    app.add_option("--alpha", opt.alpha, "coupling parameter alpha > 0");
    app.add_option("--n", opt.n, "number of prime-sqrt interaction positions");
    app.add_option("--positions", opt.positions, "explicit positions in (0, 2pi); equidistribution results assume rationally independent values")->expected(-1);
    app.add_option("--roots", opt.roots, "number of roots to compute");
    app.add_option("--kmax", opt.kmax, "scan range (0, kmax] instead of a root count");
    app.add_option("--drop", opt.drop, "low levels to drop before statistics (-1 = auto)");
    app.add_option("--step", opt.step, "scan step override");
    app.add_option("--rescans", opt.rescans, "max completeness rescans");
    app.add_option("--threads", opt.threads, "worker threads (0 = hardware)");
    app.add_option("--seed", opt.seed, "seed for Monte-Carlo checks");
    app.add_option("--output,-o", opt.output, "output directory");
    app.add_option("--goe-table", opt.goe_table, "GOE CDF table file (default: regenerate)");
    app.add_option("--bin-width", opt.bin_width, "histogram bin width (0 = auto)");
    app.add_option("--L-max", opt.L_max, "number-variance window maximum");
    app.add_option("--L-step", opt.L_step, "number-variance window step");

    app.fallthrough(); // common flags are accepted after the subcommand too
    auto* sub_spectrum = app.add_subcommand("spectrum", "solve the secular equation");
    auto* sub_analyze = app.add_subcommand("analyze", "spacing statistics and distances");
    std::string roots_file;
    sub_analyze->add_option("--roots-file", roots_file, "load a roots table instead of solving");
    auto* sub_sweep = app.add_subcommand("sweep", "alpha sweep of the distance functionals");
    std::vector<double> alpha_list;
    double alpha_from = 1.05, alpha_to = 1.6, alpha_step = 0.025;
    sub_sweep->add_option("--alpha-list", alpha_list, "explicit alpha values")->expected(-1);
    sub_sweep->add_option("--alpha-from", alpha_from, "sweep start");
    sub_sweep->add_option("--alpha-to", alpha_to, "sweep end");
    sub_sweep->add_option("--alpha-step", alpha_step, "sweep step");
    auto* sub_perturb = app.add_subcommand("perturb-check", "exact vs first-order doublets");
    int J = 200;
    sub_perturb->add_option("--doublets", J, "number of doublets to check");
    auto* sub_table = app.add_subcommand("rmt-table", "generate the GOE spacing CDF table");
    double table_step = 0.005, table_smax = 6.0;
    int table_nodes = 64;
    bool mc_check = false;
    sub_table->add_option("--table-step", table_step, "grid step");
    sub_table->add_option("--smax", table_smax, "table upper end");
    sub_table->add_option("--nodes", table_nodes, "quadrature nodes");
    sub_table->add_flag("--mc-check", mc_check, "compare against the Monte-Carlo oracle");
    auto* sub_selftest = app.add_subcommand("selftest", "built-in sanity checks");

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (sub_spectrum->parsed()) return cmd_spectrum(opt);
        if (sub_analyze->parsed()) return cmd_analyze(opt, roots_file);
        if (sub_sweep->parsed())
            return cmd_sweep(opt, alpha_list, alpha_from, alpha_to, alpha_step);
        if (sub_perturb->parsed()) return cmd_perturb_check(opt, J);
        if (sub_table->parsed())
            return cmd_rmt_table(opt, table_step, table_smax, table_nodes, mc_check);
        if (sub_selftest->parsed()) return cmd_selftest(opt);
    } catch (const ps::CompletenessError& e) {
        std::cerr << "completeness failure: " << e.what() << "\n";
        return kCompletenessError;
    } catch (const ps::GoeGenerationError& e) {
        std::cerr << "self-check failure: " << e.what() << "\n";
        return kSelfCheckError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.find("cannot open") != std::string::npos ||
            what.find("write failed") != std::string::npos) {
            std::cerr << "I/O error: " << what << "\n";
            return kIoError;
        }
        std::cerr << "error: " << what << "\n";
        return kConfigError;
    }
    return kOk;
}

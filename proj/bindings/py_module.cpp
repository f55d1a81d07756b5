#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pointspec/io.hpp"
#include "pointspec/perturbation.hpp"
#include "pointspec/rmt.hpp"
#include "pointspec/rootfind.hpp"
#include "pointspec/secular.hpp"
#include "pointspec/statistics.hpp"

namespace py = pybind11;
using namespace pointspec;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    return {a.data(), a.data() + a.size()};
}

const ReferenceDistribution& named_reference(const std::string& name, const std::string& table) {
    static const WignerDistribution wigner;
    static const PoissonDistribution poisson;
    if (name == "wigner") return wigner;
    if (name == "poisson") return poisson;
    if (name == "goe") return goe_reference(table);
    throw std::invalid_argument("unknown reference: " + name + " (wigner|goe|poisson)");
}

} // namespace

PYBIND11_MODULE(_pointspec, m) {
    m.doc() = "spectral statistics of a 1D particle with scale-free point interactions";

    py::enum_<Topology>(m, "Topology")
        .value("Circle", Topology::Circle)
        .value("Segment", Topology::Segment);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init([](const std::string& topology, double alpha, std::vector<double> xs) {
                 const auto topo = topology == "segment" ? Topology::Segment : Topology::Circle;
                 SystemConfig cfg{topo, alpha, std::move(xs)};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("topology"), py::arg("alpha"), py::arg("positions"))
        .def_static("circle_primes", &SystemConfig::circle_primes, py::arg("alpha"), py::arg("n"))
        .def_static("segment_primes", &SystemConfig::segment_primes, py::arg("alpha"),
                    py::arg("n"))
        .def_property_readonly("alpha", [](const SystemConfig& c) { return c.alpha; })
        .def_property_readonly("beta", &SystemConfig::beta)
        .def_property_readonly("n", &SystemConfig::n)
        .def_property_readonly("positions",
                               [](const SystemConfig& c) { return to_array(c.positions); })
        .def_property_readonly("topology", [](const SystemConfig& c) {
            return c.topology == Topology::Circle ? "circle" : "segment";
        });

    py::class_<Spectrum>(m, "Spectrum")
        .def_property_readonly("roots", [](const Spectrum& s) { return to_array(s.roots); })
        .def_property_readonly("multiplicities",
                               [](const Spectrum& s) { return s.multiplicities; })
        .def_property_readonly("residuals",
                               [](const Spectrum& s) { return to_array(s.residuals); })
        .def_property_readonly("count_deviation",
                               [](const Spectrum& s) { return s.diagnostics.max_count_deviation; })
        .def_property_readonly("scan_step",
                               [](const Spectrum& s) { return s.diagnostics.scan_step; })
        .def("__len__", [](const Spectrum& s) { return s.roots.size(); });

    m.def("beta_of_alpha", &beta_of_alpha, py::arg("alpha"));
    m.def("prime_positions", [](int n) { return to_array(prime_positions(n)); }, py::arg("n"));

    m.def(
        "secular_circle",
        [](double k, const SystemConfig& cfg) {
            const auto v = secular_circle(k, cfg);
            return py::make_tuple(v.value, v.residual_imag);
        },
        py::arg("k"), py::arg("config"));
    m.def("secular_circle_expansion", &secular_circle_expansion, py::arg("k"), py::arg("config"));
    m.def(
        "secular_segment",
        [](double k, const SystemConfig& cfg) {
            const auto v = secular_segment(k, cfg);
            return py::make_tuple(v.value, v.residual_imag);
        },
        py::arg("k"), py::arg("config"));

    m.def(
        "find_spectrum",
        [](const SystemConfig& cfg, std::size_t count, double k_max, int threads, double step) {
            ScanPolicy policy;
            policy.threads = threads;
            policy.base_step = step;
            py::gil_scoped_release release;
            if (k_max > 0.0) return find_spectrum_range(cfg, k_max, policy);
            return find_spectrum(cfg, count, policy);
        },
        py::arg("config"), py::arg("count") = 1000, py::arg("k_max") = 0.0,
        py::arg("threads") = 0, py::arg("step") = 0.0);

    m.def(
        "lambda_pm",
        [](int j, py::array_t<double, py::array::c_style | py::array::forcecast> xs) {
            const auto v = from_array(xs);
            return lambda_pm(j, v);
        },
        py::arg("j"), py::arg("positions"));
    m.def(
        "perturbative_doublets",
        [](const SystemConfig& cfg, int J) {
            const auto ds = perturbative_doublets(cfg, J);
            py::list out;
            for (const auto& d : ds)
                out.append(py::dict(py::arg("j") = d.j, py::arg("lambda_plus") = d.lambda_plus,
                                    py::arg("k_lower") = d.k_lower, py::arg("k_upper") = d.k_upper,
                                    py::arg("odd_spacing") = d.odd_spacing));
            return out;
        },
        py::arg("config"), py::arg("J"));
    m.def(
        "gamma_segment",
        [](int j, py::array_t<double, py::array::c_style | py::array::forcecast> xs, double beta) {
            const auto v = from_array(xs);
            const auto p = gamma_segment(j, v, beta);
            return py::make_tuple(p.gamma, p.k_pred);
        },
        py::arg("j"), py::arg("positions"), py::arg("beta"));

    m.def(
        "unfold",
        [](const Spectrum& s, int drop) { return to_array(unfold(s, drop)); }, py::arg("spectrum"),
        py::arg("drop") = 0);
    m.def(
        "parity_split",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> levels) {
            const auto series = parity_split(from_array(levels));
            return py::make_tuple(to_array(series.odd()), to_array(series.even()),
                                  to_array(series.spacings));
        },
        py::arg("levels"), "returns (odd, even, all) spacing arrays");

    m.def(
        "delta_F",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> sample,
           const std::string& reference, const std::string& table) {
            const auto& ref = named_reference(reference, table);
            const EmpiricalCdf ecdf(from_array(sample));
            return delta_F(ecdf, [&](double s) { return ref.cdf(s); }, ref.tail_cut());
        },
        py::arg("sample"), py::arg("reference"), py::arg("goe_table") = "");
    m.def(
        "ks_distance",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> sample,
           const std::string& reference, const std::string& table) {
            const auto& ref = named_reference(reference, table);
            const EmpiricalCdf ecdf(from_array(sample));
            return ks_distance(ecdf, [&](double s) { return ref.cdf(s); });
        },
        py::arg("sample"), py::arg("reference"), py::arg("goe_table") = "");
    m.def(
        "small_s_exponent",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> sample) {
            return small_s_exponent(from_array(sample));
        },
        py::arg("sample"));
    m.def(
        "number_variance",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> levels,
           py::array_t<double, py::array::c_style | py::array::forcecast> L) {
            const auto curve = number_variance(from_array(levels), from_array(L));
            return py::make_tuple(to_array(curve.L), to_array(curve.sigma2));
        },
        py::arg("levels"), py::arg("L_grid"));

    m.def(
        "reference_pdf",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> s,
           const std::string& reference, const std::string& table) {
            const auto& ref = named_reference(reference, table);
            auto v = from_array(s);
            for (auto& x : v) x = ref.pdf(x);
            return to_array(v);
        },
        py::arg("s"), py::arg("reference"), py::arg("goe_table") = "");
    m.def(
        "reference_cdf",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> s,
           const std::string& reference, const std::string& table) {
            const auto& ref = named_reference(reference, table);
            auto v = from_array(s);
            for (auto& x : v) x = ref.cdf(x);
            return to_array(v);
        },
        py::arg("s"), py::arg("reference"), py::arg("goe_table") = "");

    m.def("goe_cdf_exact", &goe_cdf_exact, py::arg("s"), py::arg("nodes") = 64);
    m.def(
        "generate_goe_table",
        [](const std::string& path) {
            const auto table = generate_goe_table();
            if (!path.empty()) table.save(path);
            return py::make_tuple(to_array(table.s), to_array(table.F));
        },
        py::arg("save_path") = "");
    m.def(
        "goe_mc_oracle",
        [](int dim, int count, std::uint64_t seed, int threads) {
            py::gil_scoped_release release;
            return goe_mc_oracle(dim, count, seed, threads);
        },
        py::arg("dim") = 200, py::arg("count") = 100, py::arg("seed") = 1, py::arg("threads") = 0);
    m.def(
        "number_variance_reference",
        [](const std::string& ensemble, double L) {
            if (ensemble == "goe") return number_variance_reference(Ensemble::GOE, L);
            if (ensemble == "gue") return number_variance_reference(Ensemble::GUE, L);
            if (ensemble == "poisson") return number_variance_reference(Ensemble::Poisson, L);
            throw std::invalid_argument("unknown ensemble: " + ensemble);
        },
        py::arg("ensemble"), py::arg("L"));

    m.attr("__version__") = "0.1.0";
}

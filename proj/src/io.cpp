#include "pointspec/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pointspec::io {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

} // namespace

void KeyValueDocument::set(const std::string& key, const std::string& value) {
    for (auto& e : entries)
        if (e.first == key) {
            e.second = value;
            return;
        }
    entries.emplace_back(key, value);
}

void KeyValueDocument::set(const std::string& key, double value) { set(key, fmt(value)); }

void KeyValueDocument::set(const std::string& key, long long value) {
    set(key, std::to_string(value));
}

const std::string* KeyValueDocument::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.first == key) return &e.second;
    return nullptr;
}

std::string KeyValueDocument::serialize() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
    return out.str();
}

KeyValueDocument KeyValueDocument::parse(const std::string& text) {
    KeyValueDocument doc;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        doc.entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return doc;
}

void KeyValueDocument::save(const std::string& path) const {
    auto out = open_out(path);
    out << serialize();
    if (!out) throw std::runtime_error("write failed: " + path);
}

KeyValueDocument KeyValueDocument::load(const std::string& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void write_roots(const std::string& path, const Spectrum& spectrum,
                 const KeyValueDocument& header) {
    auto out = open_out(path);
    out << "# roots table: index k e multiplicity residual\n";
    for (const auto& [k, v] : header.entries) out << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < spectrum.roots.size(); ++i)
        out << i + 1 << " " << fmt(spectrum.roots[i]) << " " << fmt(2.0 * spectrum.roots[i])
            << " " << spectrum.multiplicities[i] << " " << fmt(spectrum.residuals[i]) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

Spectrum read_roots(const std::string& path) {
    auto in = open_in(path);
    Spectrum spec;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::size_t idx;
        double k, e, residual;
        int mult;
        if (ss >> idx >> k >> e >> mult >> residual) {
            spec.roots.push_back(k);
            spec.multiplicities.push_back(mult);
            spec.residuals.push_back(residual);
        }
    }
    return spec;
}

void write_series(const std::string& path, std::span<const double> values,
                  const std::string& comment) {
    auto out = open_out(path);
    if (!comment.empty()) out << "# " << comment << "\n";
    for (std::size_t i = 0; i < values.size(); ++i) out << i + 1 << " " << fmt(values[i]) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_series(const std::string& path) {
    auto in = open_in(path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::size_t idx;
        double v;
        if (ss >> idx >> v) values.push_back(v);
    }
    return values;
}

void write_histogram(const std::string& path, const Histogram& hist,
                     const std::string& comment) {
    auto out = open_out(path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "# bin_lo bin_hi density count\n";
    for (std::size_t i = 0; i < hist.density.size(); ++i)
        out << fmt(hist.edges[i]) << " " << fmt(hist.edges[i + 1]) << " "
            << fmt(hist.density[i]) << " " << hist.counts[i] << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_ecdf(const std::string& path, std::span<const double> sorted_sample,
                const std::string& comment) {
    auto out = open_out(path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "# s F\n";
    const std::size_t N = sorted_sample.size();
    for (std::size_t i = 0; i < N; ++i)
        out << fmt(sorted_sample[i]) << " " << fmt(static_cast<double>(i + 1) / N) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_number_variance(const std::string& path, const NumberVarianceCurve& curve,
                           const std::string& comment) {
    auto out = open_out(path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "# L sigma2 windows\n";
    for (std::size_t i = 0; i < curve.L.size(); ++i)
        out << fmt(curve.L[i]) << " " << fmt(curve.sigma2[i]) << " " << curve.windows[i]
            << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_table(const std::string& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows, const std::string& comment) {
    auto out = open_out(path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "#";
    for (const auto& c : columns) out << " " << c;
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << fmt(row[i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::vector<double>> read_table(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        // strtod-based so that nan/inf entries survive the round trip
        const char* p = line.c_str();
        char* end = nullptr;
        for (double v = std::strtod(p, &end); end != p; v = std::strtod(p, &end)) {
            row.push_back(v);
            p = end;
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace pointspec::io

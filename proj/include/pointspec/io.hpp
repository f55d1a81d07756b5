#pragma once

#include <map>
#include <string>
#include <vector>

#include "pointspec/rootfind.hpp"
#include "pointspec/statistics.hpp"

namespace pointspec::io {

/// Ordered key=value document ('#' lines are comments). The summary format of
/// the command-line tool; parse(serialize(x)) == x.
struct KeyValueDocument {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    const std::string* find(const std::string& key) const;

    std::string serialize() const;
    static KeyValueDocument parse(const std::string& text);

    void save(const std::string& path) const;
    static KeyValueDocument load(const std::string& path);
};

/// Roots table: "index k e multiplicity residual" per line, '#' comments.
void write_roots(const std::string& path, const Spectrum& spectrum,
                 const KeyValueDocument& header);
Spectrum read_roots(const std::string& path);

/// Two-column series (index value), '#' comments.
void write_series(const std::string& path, std::span<const double> values,
                  const std::string& comment);
std::vector<double> read_series(const std::string& path);

/// Columns: bin_lo bin_hi density count.
void write_histogram(const std::string& path, const Histogram& hist,
                     const std::string& comment);

/// Columns: s F(s).
void write_ecdf(const std::string& path, std::span<const double> sorted_sample,
                const std::string& comment);

/// Columns: L sigma2 windows.
void write_number_variance(const std::string& path, const NumberVarianceCurve& curve,
                           const std::string& comment);

/// Generic whitespace-separated table with a named-column header comment.
void write_table(const std::string& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows, const std::string& comment);
std::vector<std::vector<double>> read_table(const std::string& path);

} // namespace pointspec::io

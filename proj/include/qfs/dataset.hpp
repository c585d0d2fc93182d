#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qfs/common.hpp"
#include "qfs/csv.hpp"

namespace qfs {

enum class ColumnKind { categorical, numerical };
enum class ColumnRole { feature, target };
enum class MissingPolicy { drop_rows, impute_mode };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::numerical;
    ColumnRole role = ColumnRole::feature;
};

/// Encoded tabular dataset. Categorical columns hold 0-based integer codes
/// (stored as doubles), numerical feature columns are standardized to zero
/// mean and unit variance, and exactly one column is the binary target.
/// Column order follows the source file and fixes the feature/qubit order.
class FeatureTable {
  public:
    FeatureTable() = default;
    FeatureTable(std::vector<ColumnSpec> columns, std::vector<std::vector<double>> column_data)
        : columns_(std::move(columns)), data_(std::move(column_data)) {
        if (columns_.size() != data_.size())
            throw ValidationError("column spec count does not match data column count");
        std::size_t target_count = 0;
        for (const auto& c : columns_)
            if (c.role == ColumnRole::target) ++target_count;
        if (target_count != 1) throw ValidationError("table must have exactly one target column");
        for (const auto& col : data_)
            if (col.size() != data_.front().size())
                throw ValidationError("ragged column data");
    }

    std::size_t n_rows() const { return data_.empty() ? 0 : data_.front().size(); }
    std::size_t n_columns() const { return columns_.size(); }
    std::size_t n_features() const { return columns_.empty() ? 0 : columns_.size() - 1; }

    const std::vector<ColumnSpec>& columns() const { return columns_; }
    const ColumnSpec& column(std::size_t c) const { return columns_.at(c); }
    const std::vector<double>& column_values(std::size_t c) const { return data_.at(c); }

    std::size_t target_column_index() const {
        for (std::size_t c = 0; c < columns_.size(); ++c)
            if (columns_[c].role == ColumnRole::target) return c;
        throw ValidationError("table has no target column");
    }

    /// Column indices of the feature columns, in stable (file) order.
    std::vector<std::size_t> feature_column_indices() const {
        std::vector<std::size_t> out;
        out.reserve(n_features());
        for (std::size_t c = 0; c < columns_.size(); ++c)
            if (columns_[c].role == ColumnRole::feature) out.push_back(c);
        return out;
    }

    const ColumnSpec& feature_spec(std::size_t i) const {
        return columns_.at(feature_column_indices().at(i));
    }
    const std::vector<double>& feature(std::size_t i) const {
        return data_.at(feature_column_indices().at(i));
    }
    const std::vector<double>& target() const { return data_.at(target_column_index()); }

    std::vector<std::string> feature_names() const {
        std::vector<std::string> names;
        for (std::size_t c : feature_column_indices()) names.push_back(columns_[c].name);
        return names;
    }

    /// New table containing only the given rows (ascending original order).
    FeatureTable select_rows(const std::vector<std::size_t>& rows) const {
        std::vector<std::vector<double>> cols(data_.size());
        for (std::size_t c = 0; c < data_.size(); ++c) {
            cols[c].reserve(rows.size());
            for (std::size_t r : rows) cols[c].push_back(data_[c].at(r));
        }
        return FeatureTable(columns_, std::move(cols));
    }

  private:
    std::vector<ColumnSpec> columns_;
    std::vector<std::vector<double>> data_;  // column-major: data_[col][row]
};

/// Per-feature integer bins for entropy estimation. Bin indices are dense
/// (0-based and consecutive for quantile bins); `n_bins[i]` bounds the index
/// range of feature i.
struct DiscretizedView {
    std::vector<std::vector<int>> bins;  // bins[feature][row]
    std::vector<int> n_bins;             // per feature

    std::size_t n_features() const { return bins.size(); }
    std::size_t n_rows() const { return bins.empty() ? 0 : bins.front().size(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool is_missing(const std::string& trimmed) {
    return trimmed.empty() || trimmed == "?" || trimmed == "NA" || trimmed == "NaN";
}

inline bool parse_finite_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(out);
}

/// Most frequent value; ties broken by first occurrence in row order.
inline std::string column_mode(const std::vector<std::string>& values) {
    std::unordered_map<std::string, std::size_t> counts;
    std::vector<std::string> order;
    for (const auto& v : values) {
        if (counts.emplace(v, 0).second) order.push_back(v);
        ++counts[v];
    }
    std::string best;
    std::size_t best_count = 0;
    for (const auto& v : order) {
        if (counts[v] > best_count) {
            best = v;
            best_count = counts[v];
        }
    }
    return best;
}

}  // namespace detail

/// Load a delimited text table with a header row, encode categoricals by
/// first-occurrence label codes, standardize numerical feature columns to
/// zero mean / unit (population) variance, and encode the target as {0,1}.
/// Numeric targets whose values are already exactly {0,1} keep their values;
/// every other target is label-encoded by first occurrence. Non-fatal issues
/// (zero-variance columns) are appended to `warnings` when provided.
inline FeatureTable load_table(const std::string& path, const std::string& target_name,
                               MissingPolicy missing_policy = MissingPolicy::drop_rows,
                               char delimiter = ',',
                               std::vector<std::string>* warnings = nullptr) {
    if (!std::ifstream(path)) throw ValidationError("cannot open dataset file: " + path);
    auto raw = csv::read_file(path, delimiter);
    if (raw.empty()) throw ValidationError("empty table: " + path);

    std::vector<std::string> header;
    for (const auto& h : raw.front()) header.push_back(detail::trim(h));
    const std::size_t n_cols = header.size();
    for (std::size_t a = 0; a < n_cols; ++a)
        for (std::size_t b = a + 1; b < n_cols; ++b)
            if (header[a] == header[b])
                throw ValidationError("duplicate column name: " + header[a]);

    std::size_t target_col = n_cols;
    for (std::size_t c = 0; c < n_cols; ++c)
        if (header[c] == target_name) target_col = c;
    if (target_col == n_cols) throw ValidationError("target column not found: " + target_name);

    // Trim every cell, validate row widths, and apply the missing-value policy.
    std::vector<std::vector<std::string>> cells;  // column-major
    cells.resize(n_cols);
    for (std::size_t r = 1; r < raw.size(); ++r) {
        if (raw[r].size() == 1 && detail::trim(raw[r][0]).empty()) continue;  // blank line
        if (raw[r].size() != n_cols)
            throw ValidationError("row " + std::to_string(r) + " has " +
                                  std::to_string(raw[r].size()) + " fields, expected " +
                                  std::to_string(n_cols));
        std::vector<std::string> row(n_cols);
        bool any_missing = false;
        for (std::size_t c = 0; c < n_cols; ++c) {
            row[c] = detail::trim(raw[r][c]);
            any_missing = any_missing || detail::is_missing(row[c]);
        }
        if (any_missing && missing_policy == MissingPolicy::drop_rows) continue;
        for (std::size_t c = 0; c < n_cols; ++c) cells[c].push_back(row[c]);
    }
    const std::size_t n_rows = cells.front().size();
    if (n_rows == 0) throw ValidationError("no data rows remain after ingestion");

    if (missing_policy == MissingPolicy::impute_mode) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            std::vector<std::string> present;
            for (const auto& v : cells[c])
                if (!detail::is_missing(v)) present.push_back(v);
            if (present.empty())
                throw ValidationError("column is entirely missing: " + header[c]);
            const std::string mode = detail::column_mode(present);
            for (auto& v : cells[c])
                if (detail::is_missing(v)) v = mode;
        }
    }

    std::vector<ColumnSpec> specs(n_cols);
    std::vector<std::vector<double>> data(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        specs[c].name = header[c];
        specs[c].role = (c == target_col) ? ColumnRole::target : ColumnRole::feature;

        std::vector<double> parsed(n_rows);
        bool numeric = true;
        for (std::size_t r = 0; r < n_rows && numeric; ++r)
            numeric = detail::parse_finite_double(cells[c][r], parsed[r]);
        specs[c].kind = numeric ? ColumnKind::numerical : ColumnKind::categorical;

        if (c == target_col) {
            // A numeric {0,1} target keeps its values so class 1 stays the
            // positive class; anything else gets first-occurrence codes.
            bool already_01 = numeric;
            for (std::size_t r = 0; r < n_rows && already_01; ++r)
                already_01 = parsed[r] == 0.0 || parsed[r] == 1.0;
            if (already_01) {
                data[c] = std::move(parsed);
            } else {
                std::unordered_map<std::string, double> codes;
                data[c].resize(n_rows);
                for (std::size_t r = 0; r < n_rows; ++r) {
                    auto it = codes.emplace(cells[c][r], static_cast<double>(codes.size()));
                    data[c][r] = it.first->second;
                }
                specs[c].kind = ColumnKind::categorical;
            }
            std::vector<double> distinct;
            for (double v : data[c])
                if (std::find(distinct.begin(), distinct.end(), v) == distinct.end())
                    distinct.push_back(v);
            if (distinct.size() != 2)
                throw ValidationError("target not binary after encoding: " +
                                      std::to_string(distinct.size()) + " classes");
        } else if (numeric) {
            double lo = parsed[0], hi = parsed[0], m = 0.0;
            for (double v : parsed) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                m += v;
            }
            m /= static_cast<double>(n_rows);
            if (lo == hi) {
                if (warnings)
                    warnings->push_back("zero-variance numerical column '" + header[c] +
                                        "' retained with zero values");
                data[c].assign(n_rows, 0.0);
            } else {
                double var = 0.0;
                for (double v : parsed) var += (v - m) * (v - m);
                const double s = std::sqrt(var / static_cast<double>(n_rows));
                data[c].resize(n_rows);
                for (std::size_t r = 0; r < n_rows; ++r) data[c][r] = (parsed[r] - m) / s;
            }
        } else {
            std::unordered_map<std::string, double> codes;
            data[c].resize(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) {
                auto it = codes.emplace(cells[c][r], static_cast<double>(codes.size()));
                data[c][r] = it.first->second;
            }
        }
    }
    return FeatureTable(std::move(specs), std::move(data));
}

namespace detail {

/// Equal-frequency quantile bins with tied values kept together: each run of
/// equal values is placed by the midpoint of its rank range, and occupied
/// bins are renumbered consecutively from 0.
inline std::pair<std::vector<int>, int> quantile_bins(const std::vector<double>& values,
                                                      int n_bins) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<int> provisional(n, 0);
    std::size_t run_start = 0;
    while (run_start < n) {
        std::size_t run_end = run_start;
        while (run_end + 1 < n && values[order[run_end + 1]] == values[order[run_start]])
            ++run_end;
        const double midrank = 0.5 * static_cast<double>(run_start + run_end);
        const int bin = static_cast<int>(std::floor(midrank * n_bins / static_cast<double>(n)));
        for (std::size_t k = run_start; k <= run_end; ++k) provisional[order[k]] = bin;
        run_start = run_end + 1;
    }

    std::map<int, int> remap;
    for (int b : provisional) remap.emplace(b, 0);
    int next = 0;
    for (auto& [from, to] : remap) to = next++;
    std::vector<int> bins(n);
    for (std::size_t r = 0; r < n; ++r) bins[r] = remap[provisional[r]];
    return {bins, next};
}

}  // namespace detail

/// Discretize the feature columns for entropy estimation: numerical columns
/// get equal-frequency quantile bins (ties share a bin; fewer distinct values
/// than bins collapses to distinct-value bins), categorical columns pass
/// their codes through unchanged.
inline DiscretizedView discretize(const FeatureTable& table, int n_bins = 10) {
    if (n_bins < 2) throw ValidationError("n_bins must be at least 2");
    if (table.n_rows() == 0) throw ValidationError("cannot discretize an empty table");
    DiscretizedView view;
    for (std::size_t c : table.feature_column_indices()) {
        const auto& values = table.column_values(c);
        if (table.column(c).kind == ColumnKind::numerical) {
            auto [bins, used] = detail::quantile_bins(values, n_bins);
            view.bins.push_back(std::move(bins));
            view.n_bins.push_back(used);
        } else {
            std::vector<int> codes(values.size());
            int max_code = 0;
            for (std::size_t r = 0; r < values.size(); ++r) {
                codes[r] = static_cast<int>(std::llround(values[r]));
                if (codes[r] < 0) throw ValidationError("negative categorical code");
                max_code = std::max(max_code, codes[r]);
            }
            view.bins.push_back(std::move(codes));
            view.n_bins.push_back(max_code + 1);
        }
    }
    return view;
}

/// Deterministic class-stratified split. Per class, round(test_fraction * n)
/// rows go to the test set (always leaving at least one row in train);
/// shuffling uses one mt19937_64 stream over classes in ascending code order.
inline std::pair<FeatureTable, FeatureTable> split(const FeatureTable& table,
                                                   double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValidationError("test_fraction must lie strictly between 0 and 1");

    const auto& y = table.target();
    std::map<double, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < y.size(); ++r) by_class[y[r]].push_back(r);
    if (by_class.size() < 2) throw ValidationError("split requires at least two classes");
    for (const auto& [cls, rows] : by_class)
        if (rows.size() < 2)
            throw ValidationError("class " + format_double(cls) + " has fewer than 2 rows");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> test_rows, train_rows;
    for (auto& [cls, rows] : by_class) {
        std::shuffle(rows.begin(), rows.end(), rng);
        auto n_test = static_cast<std::size_t>(std::llround(
            test_fraction * static_cast<double>(rows.size())));
        n_test = std::min(n_test, rows.size() - 1);
        test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + n_test);
        train_rows.insert(train_rows.end(), rows.begin() + n_test, rows.end());
    }
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    return {table.select_rows(train_rows), table.select_rows(test_rows)};
}

}  // namespace qfs

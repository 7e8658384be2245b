#include "tempshift/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tempshift/civil_time.hpp"

namespace tempshift {

std::string task_name(Task t) {
    return t == Task::Classification ? "classification" : "regression";
}

Task task_from_name(const std::string& name) {
    if (name == "classification") return Task::Classification;
    if (name == "regression") return Task::Regression;
    throw std::invalid_argument("unknown task: '" + name +
                                "' (expected classification or regression)");
}

bool TemporalDataset::is_sorted_by_time() const {
    return std::is_sorted(timestamps.begin(), timestamps.end());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    return std::isfinite(out);
}

bool parse_timestamp(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    // Integer epoch seconds first, ISO-8601 second.
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() + s.size() && errno != ERANGE) {
        out = v;
        return true;
    }
    if (auto t = parse_iso8601(s)) {
        out = *t;
        return true;
    }
    return false;
}

[[noreturn]] void cell_error(const std::string& path, std::size_t row,
                             const std::string& column, const std::string& what) {
    throw std::runtime_error(path + ": row " + std::to_string(row) + ", column '" +
                             column + "': " + what);
}

} // namespace

TemporalDataset load_csv(const std::string& path, const CsvSchema& schema,
                         LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty file (missing header)");
    const auto header = split_csv_line(line);

    auto column_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        throw std::runtime_error(path + ": schema names column '" + name +
                                 "' which is not in the header");
    };

    const std::size_t ts_col = column_index(schema.timestamp_column);
    const std::size_t label_col = column_index(schema.label_column);

    std::vector<std::string> feature_names = schema.feature_columns;
    if (feature_names.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string name = trim(header[i]);
            if (i != ts_col && i != label_col && !name.empty())
                feature_names.push_back(name);
        }
    }
    if (feature_names.empty())
        throw std::runtime_error(path + ": schema yields no feature columns");

    std::vector<std::size_t> feature_cols;
    feature_cols.reserve(feature_names.size());
    for (const auto& name : feature_names) {
        const std::size_t idx = column_index(name);
        if (idx == ts_col || idx == label_col)
            throw std::runtime_error(path + ": column '" + name +
                                     "' is both a feature and a timestamp/label");
        feature_cols.push_back(idx);
    }

    const std::size_t d = feature_names.size();
    std::vector<double> feat_rows;
    std::vector<std::int64_t> timestamps;
    std::vector<double> labels;
    LoadReport rep;

    std::size_t row_no = 1; // header is row 1
    std::vector<double> row_buf(d);
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            if (schema.drop_bad_rows) {
                ++rep.rows_dropped;
                continue;
            }
            throw std::runtime_error(path + ": row " + std::to_string(row_no) +
                                     ": expected " + std::to_string(header.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        }

        bool bad = false;
        std::int64_t ts = 0;
        double label = 0.0;
        std::size_t row_missing = 0;

        const std::string ts_cell = trim(cells[ts_col]);
        if (!parse_timestamp(ts_cell, ts)) {
            if (!schema.drop_bad_rows)
                cell_error(path, row_no, schema.timestamp_column,
                           "cannot parse timestamp '" + ts_cell + "'");
            bad = true;
        }
        const std::string label_cell = trim(cells[label_col]);
        if (!bad && !parse_double(label_cell, label)) {
            if (!schema.drop_bad_rows)
                cell_error(path, row_no, schema.label_column,
                           "cannot parse label '" + label_cell + "'");
            bad = true;
        }
        if (!bad && schema.task == Task::Classification && label != 0.0 && label != 1.0) {
            if (!schema.drop_bad_rows)
                cell_error(path, row_no, schema.label_column,
                           "classification label must be 0 or 1, got '" + label_cell + "'");
            bad = true;
        }
        if (!bad) {
            for (std::size_t j = 0; j < d; ++j) {
                const std::string cell = trim(cells[feature_cols[j]]);
                if (cell.empty() && schema.allow_missing) {
                    row_buf[j] = std::numeric_limits<double>::quiet_NaN();
                    ++row_missing;
                    continue;
                }
                if (!parse_double(cell, row_buf[j])) {
                    if (!schema.drop_bad_rows)
                        cell_error(path, row_no, feature_names[j],
                                   "cannot parse feature '" + cell + "'");
                    bad = true;
                    break;
                }
            }
        }
        if (bad) {
            ++rep.rows_dropped;
            continue;
        }
        feat_rows.insert(feat_rows.end(), row_buf.begin(), row_buf.end());
        timestamps.push_back(ts);
        labels.push_back(label);
        rep.missing_cells += row_missing;
        ++rep.rows_kept;
    }

    if (timestamps.empty())
        throw std::runtime_error(path + ": no data rows survived ingestion");

    TemporalDataset ds;
    ds.features = Matrix(timestamps.size(), d);
    ds.features.data = std::move(feat_rows);
    ds.timestamps = std::move(timestamps);
    ds.labels = std::move(labels);
    ds.task = schema.task;
    ds.feature_names = std::move(feature_names);
    if (report) *report = rep;
    return ds;
}

TemporalDataset sort_by_time(const TemporalDataset& ds) {
    const std::size_t n = ds.n_rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ds.timestamps[a] < ds.timestamps[b];
    });

    TemporalDataset out;
    out.task = ds.task;
    out.feature_names = ds.feature_names;
    out.features = Matrix(n, ds.n_features());
    out.timestamps.resize(n);
    out.labels.resize(n);
    const std::size_t d = ds.n_features();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = order[i];
        std::copy_n(ds.features.row_ptr(src), d, out.features.row_ptr(i));
        out.timestamps[i] = ds.timestamps[src];
        out.labels[i] = ds.labels[src];
    }
    return out;
}

void impute_with_mean(TemporalDataset& ds, const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw std::invalid_argument("impute_with_mean: empty row set");
    const std::size_t d = ds.n_features();
    std::vector<double> sums(d, 0.0);
    std::vector<std::size_t> counts(d, 0);
    for (std::size_t r : rows) {
        if (r >= ds.n_rows())
            throw std::invalid_argument("impute_with_mean: row index out of range");
        const double* row = ds.features.row_ptr(r);
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::isnan(row[j])) {
                sums[j] += row[j];
                ++counts[j];
            }
        }
    }
    std::vector<double> means(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        means[j] = counts[j] ? sums[j] / static_cast<double>(counts[j]) : 0.0;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        double* row = ds.features.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j)
            if (std::isnan(row[j])) row[j] = means[j];
    }
}

void validate_finite(const TemporalDataset& ds) {
    const std::size_t d = ds.n_features();
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        const double* row = ds.features.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j)
            if (!std::isfinite(row[j]))
                throw std::runtime_error("non-finite feature at row " + std::to_string(i) +
                                         ", column " + ds.feature_names[j]);
        if (!std::isfinite(ds.labels[i]))
            throw std::runtime_error("non-finite label at row " + std::to_string(i));
        if (ds.task == Task::Classification && ds.labels[i] != 0.0 && ds.labels[i] != 1.0)
            throw std::runtime_error("classification label not in {0,1} at row " +
                                     std::to_string(i));
    }
}

Standardizer fit_standardizer(const TemporalDataset& ds,
                              const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw std::invalid_argument("fit_standardizer: empty row set");
    for (std::size_t r : rows)
        if (r >= ds.n_rows())
            throw std::invalid_argument("fit_standardizer: row index out of range");

    const std::size_t d = ds.n_features();
    Standardizer s;
    s.means.assign(d, 0.0);
    s.stds.assign(d, 0.0);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (std::size_t r : rows) {
        const double* row = ds.features.row_ptr(r);
        for (std::size_t j = 0; j < d; ++j) s.means[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) s.means[j] *= inv_n;
    for (std::size_t r : rows) {
        const double* row = ds.features.row_ptr(r);
        for (std::size_t j = 0; j < d; ++j) {
            const double dlt = row[j] - s.means[j];
            s.stds[j] += dlt * dlt;
        }
    }
    for (std::size_t j = 0; j < d; ++j)
        s.stds[j] = std::max(std::sqrt(s.stds[j] * inv_n), 1e-12);

    if (ds.task == Task::Regression) {
        s.has_label_stats = true;
        double m = 0.0;
        for (std::size_t r : rows) m += ds.labels[r];
        m *= inv_n;
        double v = 0.0;
        for (std::size_t r : rows) {
            const double dlt = ds.labels[r] - m;
            v += dlt * dlt;
        }
        s.label_mean = m;
        s.label_std = std::max(std::sqrt(v * inv_n), 1e-12);
    }
    return s;
}

void Standardizer::apply(TemporalDataset& ds) const {
    const std::size_t d = ds.n_features();
    if (means.size() != d)
        throw std::invalid_argument("Standardizer::apply: feature width mismatch");
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        double* row = ds.features.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - means[j]) / stds[j];
    }
    if (has_label_stats)
        for (double& y : ds.labels) y = (y - label_mean) / label_std;
}

void Standardizer::invert(TemporalDataset& ds) const {
    const std::size_t d = ds.n_features();
    if (means.size() != d)
        throw std::invalid_argument("Standardizer::invert: feature width mismatch");
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        double* row = ds.features.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) row[j] = row[j] * stds[j] + means[j];
    }
    if (has_label_stats)
        for (double& y : ds.labels) y = y * label_std + label_mean;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace

TimeSliceIndex slice_by_time(const TemporalDataset& ds, std::int64_t slice_width) {
    if (slice_width <= 0)
        throw std::invalid_argument("slice_by_time: slice_width must be positive");
    if (!ds.is_sorted_by_time())
        throw std::invalid_argument("slice_by_time: dataset must be sorted by time");

    TimeSliceIndex idx;
    idx.slice_width = slice_width;
    if (ds.n_rows() == 0) return idx;

    const std::int64_t first = floor_div(ds.timestamps.front(), slice_width) * slice_width;
    const std::int64_t last = floor_div(ds.timestamps.back(), slice_width) * slice_width;

    std::size_t row = 0;
    for (std::int64_t start = first; start <= last; start += slice_width) {
        const std::int64_t end_time = start + slice_width;
        const std::size_t begin = row;
        while (row < ds.n_rows() && ds.timestamps[row] < end_time) ++row;
        idx.boundaries.push_back(start);
        idx.ranges.emplace_back(begin, row);
    }
    return idx;
}

} // namespace tempshift

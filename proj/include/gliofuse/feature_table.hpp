#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gliofuse/error.hpp"
#include "gliofuse/linalg.hpp"
#include "gliofuse/radiomics/extractor.hpp"
#include "gliofuse/volume.hpp"

namespace gliofuse {

struct FeatureRow {
    std::string subject_id;
    Grade grade = Grade::LGG;
    std::vector<double> values;

    friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

/// Subjects by features, plus grade labels.
struct FeatureTable {
    std::vector<std::string> column_names;
    std::vector<FeatureRow> rows;

    [[nodiscard]] std::size_t width() const noexcept { return column_names.size(); }

    [[nodiscard]] Matrix matrix() const
    {
        Matrix m(rows.size(), width());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < width(); ++c) {
                m(r, c) = rows[r].values[c];
            }
        }
        return m;
    }

    [[nodiscard]] std::vector<int> labels() const
    {
        std::vector<int> y;
        for (const auto& r : rows) {
            y.push_back(r.grade == Grade::HGG ? 1 : 0);
        }
        return y;
    }

    [[nodiscard]] std::size_t column(std::string_view name) const
    {
        for (std::size_t c = 0; c < column_names.size(); ++c) {
            if (column_names[c] == name) {
                return c;
            }
        }
        throw Error(ErrorCode::SchemaMismatch, "no column named " + std::string(name));
    }

    [[nodiscard]] FeatureTable select_rows(const std::vector<std::size_t>& idx) const
    {
        FeatureTable t;
        t.column_names = column_names;
        for (auto i : idx) {
            t.rows.push_back(rows[i]);
        }
        return t;
    }

    /// Rectangular, finite, unique column names.
    void validate() const
    {
        for (std::size_t a = 0; a < column_names.size(); ++a) {
            for (std::size_t b = a + 1; b < column_names.size(); ++b) {
                if (column_names[a] == column_names[b]) {
                    throw Error(ErrorCode::SchemaMismatch, "duplicate column " + column_names[a]);
                }
            }
        }
        for (const auto& r : rows) {
            if (r.values.size() != width()) {
                throw Error(ErrorCode::SchemaMismatch, "row " + r.subject_id + " has wrong width");
            }
            for (double v : r.values) {
                if (!std::isfinite(v)) {
                    throw Error(ErrorCode::NonFiniteValue, "row " + r.subject_id + " has a non-finite value");
                }
            }
        }
    }

    friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::SchemaMismatch, "not a number: '" + std::string(s) + "'");
    }
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        out.push_back(cur);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

/// CSV with header `subject_id,grade,<features...>`, 17 significant digits.
inline void write_feature_table(const FeatureTable& t, const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << "subject_id,grade";
    for (const auto& n : t.column_names) {
        out << ',' << n;
    }
    out << '\n';
    for (const auto& r : t.rows) {
        out << r.subject_id << ',' << to_string(r.grade);
        for (double v : r.values) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

/// Reads a feature CSV. When `expected_columns` is nonempty the header must match it exactly.
inline FeatureTable read_feature_table(const std::filesystem::path& path,
                                       const std::vector<std::string>& expected_columns = radiomics::feature_names())
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::MissingInput, "feature table " + path.string() + " not found");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::SchemaMismatch, path.string() + " is empty");
    }
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "subject_id" || header[1] != "grade") {
        throw Error(ErrorCode::SchemaMismatch, "header must start with subject_id,grade");
    }
    FeatureTable t;
    t.column_names.assign(header.begin() + 2, header.end());
    if (!expected_columns.empty() && t.column_names != expected_columns) {
        throw Error(ErrorCode::SchemaMismatch, "header does not match the feature manifest");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(lineno) + " has " +
                                                       std::to_string(cells.size()) + " cells, expected " +
                                                       std::to_string(header.size()));
        }
        FeatureRow r;
        r.subject_id = cells[0];
        r.grade = parse_grade(cells[1]);
        for (std::size_t c = 2; c < cells.size(); ++c) {
            r.values.push_back(parse_double(cells[c]));
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

} // namespace gliofuse

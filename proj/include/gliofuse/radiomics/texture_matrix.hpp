#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gliofuse::radiomics {

enum class MatrixKind { GLCM, GLDM, GLRLM, GLSZM, NGTDM };

/// Dense gray-level matrix. Rows are gray levels 1..ng; `column_values[c]` is what column c
/// indexes (second gray level, run length, zone size, neighbour count, or NGTDM field).
struct TextureMatrix {
    MatrixKind kind = MatrixKind::GLCM;
    int rows = 0;
    std::vector<double> column_values;
    std::vector<double> cells;
    std::string meta;

    TextureMatrix() = default;
    TextureMatrix(MatrixKind k, int r, std::vector<double> cols)
        : kind(k), rows(r), column_values(std::move(cols)), cells(static_cast<std::size_t>(r) * column_values.size(), 0.0)
    {
    }

    [[nodiscard]] std::size_t cols() const noexcept { return column_values.size(); }
    [[nodiscard]] double& at(int level, std::size_t col) { return cells[static_cast<std::size_t>(level - 1) * cols() + col]; }
    [[nodiscard]] double at(int level, std::size_t col) const { return cells[static_cast<std::size_t>(level - 1) * cols() + col]; }

    [[nodiscard]] double sum() const noexcept
    {
        double s = 0.0;
        for (double c : cells) {
            s += c;
        }
        return s;
    }

    /// Nonzero cells keyed by (gray level, column value).
    [[nodiscard]] std::map<std::pair<int, double>, double> sparse() const
    {
        std::map<std::pair<int, double>, double> out;
        for (int i = 1; i <= rows; ++i) {
            for (std::size_t c = 0; c < cols(); ++c) {
                if (at(i, c) != 0.0) {
                    out[{i, column_values[c]}] = at(i, c);
                }
            }
        }
        return out;
    }
};

template <std::size_t N>
using FeatureValues = std::array<double, N>;

} // namespace gliofuse::radiomics

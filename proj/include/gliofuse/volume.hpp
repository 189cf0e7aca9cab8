#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gliofuse/error.hpp"

namespace gliofuse {

struct Dims {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nz = 0;

    [[nodiscard]] constexpr std::size_t count() const noexcept { return nx * ny * nz; }
    friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

struct Spacing {
    double sx = 1.0;
    double sy = 1.0;
    double sz = 1.0;

    [[nodiscard]] constexpr double voxel_volume() const noexcept { return sx * sy * sz; }
    friend constexpr bool operator==(const Spacing&, const Spacing&) = default;
};

/// Dense 3-D scalar grid. Voxel (x, y, z) lives at x + nx * (y + ny * z), the NIfTI
/// storage order. Immutable after construction; the constructor enforces the invariants.
class Volume {
public:
    Volume() = default;

    Volume(Dims dims, Spacing spacing, std::vector<double> data, bool is_label = false)
        : dims_(dims), spacing_(spacing), data_(std::move(data)), is_label_(is_label)
    {
        if (data_.size() != dims_.count()) {
            throw Error(ErrorCode::DimMismatch, "volume data length " + std::to_string(data_.size()) +
                                                    " does not match dims " + std::to_string(dims_.count()));
        }
        if (!(spacing_.sx > 0.0 && spacing_.sy > 0.0 && spacing_.sz > 0.0)) {
            throw Error(ErrorCode::BadHeader, "voxel spacing must be positive");
        }
        for (double v : data_) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFiniteValue, "volume contains NaN or Inf");
            }
        }
    }

    static Volume filled(Dims dims, double value, Spacing spacing = {}, bool is_label = false)
    {
        return Volume(dims, spacing, std::vector<double>(dims.count(), value), is_label);
    }

    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] const Spacing& spacing() const noexcept { return spacing_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] bool is_label() const noexcept { return is_label_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept
    {
        return x + dims_.nx * (y + dims_.ny * z);
    }

    [[nodiscard]] double at(std::size_t x, std::size_t y, std::size_t z) const noexcept
    {
        return data_[index(x, y, z)];
    }

    [[nodiscard]] double operator[](std::size_t i) const noexcept { return data_[i]; }

    /// Releases the buffer for in-place derivation of a new volume.
    [[nodiscard]] std::vector<double> take_data() && { return std::move(data_); }

    friend bool operator==(const Volume&, const Volume&) = default;

private:
    Dims dims_{};
    Spacing spacing_{};
    std::vector<double> data_;
    bool is_label_ = false;
};

/// Binary mask sharing a volume's grid.
struct Mask {
    Dims dims{};
    std::vector<std::uint8_t> bits;

    Mask() = default;
    explicit Mask(Dims d, bool value = false) : dims(d), bits(d.count(), value ? 1 : 0) {}

    [[nodiscard]] std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept
    {
        return x + dims.nx * (y + dims.ny * z);
    }
    [[nodiscard]] bool at(std::size_t x, std::size_t y, std::size_t z) const noexcept
    {
        return bits[index(x, y, z)] != 0;
    }
    void set(std::size_t x, std::size_t y, std::size_t z, bool v = true) noexcept
    {
        bits[index(x, y, z)] = v ? 1 : 0;
    }
    [[nodiscard]] std::size_t count() const noexcept
    {
        std::size_t n = 0;
        for (auto b : bits) {
            n += b != 0;
        }
        return n;
    }

    friend bool operator==(const Mask&, const Mask&) = default;
};

enum class Grade { LGG = 0, HGG = 1 };

inline std::string to_string(Grade g) { return g == Grade::HGG ? "HGG" : "LGG"; }

inline Grade parse_grade(const std::string& s)
{
    if (s == "HGG") {
        return Grade::HGG;
    }
    if (s == "LGG") {
        return Grade::LGG;
    }
    throw Error(ErrorCode::SchemaMismatch, "grade must be HGG or LGG, got '" + s + "'");
}

/// One subject: four co-registered sequences plus the tumour label map.
struct SubjectCase {
    std::string id;
    Volume flair;
    Volume t1;
    Volume t1ce;
    Volume t2;
    Volume seg;
    Grade grade = Grade::LGG;

    /// Checks the shared-grid and label-set invariants.
    void validate() const
    {
        for (const Volume* v : {&t1, &t1ce, &t2, &seg}) {
            if (!(v->dims() == flair.dims()) || !(v->spacing() == flair.spacing())) {
                throw Error(ErrorCode::DimMismatch, "subject " + id + ": volumes do not share a grid");
            }
        }
        for (double v : seg.data()) {
            if (v != 0.0 && v != 1.0 && v != 2.0 && v != 4.0) {
                throw Error(ErrorCode::SchemaMismatch,
                            "subject " + id + ": segmentation label " + std::to_string(v) + " not in {0,1,2,4}");
            }
        }
    }
};

} // namespace gliofuse

#pragma once

// Separable 2-D discrete wavelet transform on axial slices and mean-value fusion of the
// four MRI sequences in the wavelet domain.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/error.hpp"
#include "gliofuse/volume.hpp"

namespace gliofuse {

/// Row-major 2-D real grid, element (x, y) at x + nx * y.
struct Grid2D {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> v;

    Grid2D() = default;
    Grid2D(std::size_t w, std::size_t h, double fill = 0.0) : nx(w), ny(h), v(w * h, fill) {}

    [[nodiscard]] double& at(std::size_t x, std::size_t y) { return v[x + nx * y]; }
    [[nodiscard]] double at(std::size_t x, std::size_t y) const { return v[x + nx * y]; }
    [[nodiscard]] bool empty() const noexcept { return v.empty(); }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

struct WaveletFilter {
    std::string name;
    std::vector<double> low_pass;
    std::vector<double> high_pass;

    static WaveletFilter db1()
    {
        const double s = 1.0 / std::numbers::sqrt2;
        return {"db1", {s, s}, {s, -s}};
    }
};

/// Single-level decomposition of one slice. `source_nx/ny` is the slice size before any
/// edge-replication padding to even dims.
struct Subbands {
    Grid2D ad; ///< low/low approximation
    Grid2D hd; ///< low along x, high along y
    Grid2D vd; ///< high along x, low along y
    Grid2D dd; ///< high/high
    std::size_t source_nx = 0;
    std::size_t source_ny = 0;

    [[nodiscard]] bool same_shape(const Subbands& o) const noexcept
    {
        return ad.nx == o.ad.nx && ad.ny == o.ad.ny && source_nx == o.source_nx && source_ny == o.source_ny;
    }
};

namespace detail {

// Stride-2 analysis of one line: out_low[k] = sum_m l[m] x[2k+m], periodic wrap.
inline void analyze_line(std::span<const double> x, const WaveletFilter& f, std::span<double> lo, std::span<double> hi)
{
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < f.low_pass.size(); ++m) {
            const double xv = x[(2 * k + m) % n];
            a += f.low_pass[m] * xv;
            d += f.high_pass[m] * xv;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

// Transpose of analyze_line; exact inverse for orthonormal filters.
inline void synthesize_line(std::span<const double> lo, std::span<const double> hi, const WaveletFilter& f, std::span<double> x)
{
    const std::size_t n = x.size();
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t k = 0; k < lo.size(); ++k) {
        for (std::size_t m = 0; m < f.low_pass.size(); ++m) {
            x[(2 * k + m) % n] += f.low_pass[m] * lo[k] + f.high_pass[m] * hi[k];
        }
    }
}

inline Grid2D pad_even(const Grid2D& g)
{
    const std::size_t px = g.nx + (g.nx % 2);
    const std::size_t py = g.ny + (g.ny % 2);
    if (px == g.nx && py == g.ny) {
        return g;
    }
    Grid2D out(px, py);
    for (std::size_t y = 0; y < py; ++y) {
        for (std::size_t x = 0; x < px; ++x) {
            out.at(x, y) = g.at(std::min(x, g.nx - 1), std::min(y, g.ny - 1));
        }
    }
    return out;
}

} // namespace detail

inline Subbands dwt2_level1(const Grid2D& slice, const WaveletFilter& f = WaveletFilter::db1())
{
    if (slice.empty() || slice.nx == 0 || slice.ny == 0) {
        throw Error(ErrorCode::EmptySlice, "dwt2 on an empty slice");
    }
    const Grid2D g = detail::pad_even(slice);
    const std::size_t hx = g.nx / 2;
    const std::size_t hy = g.ny / 2;

    // Rows (along x) into low/high halves.
    Grid2D row_lo(hx, g.ny);
    Grid2D row_hi(hx, g.ny);
    std::vector<double> line(g.nx);
    std::vector<double> lo(hx);
    std::vector<double> hi(hx);
    for (std::size_t y = 0; y < g.ny; ++y) {
        std::copy_n(g.v.begin() + static_cast<std::ptrdiff_t>(y * g.nx), g.nx, line.begin());
        detail::analyze_line(line, f, lo, hi);
        for (std::size_t k = 0; k < hx; ++k) {
            row_lo.at(k, y) = lo[k];
            row_hi.at(k, y) = hi[k];
        }
    }

    Subbands sb;
    sb.ad = Grid2D(hx, hy);
    sb.hd = Grid2D(hx, hy);
    sb.vd = Grid2D(hx, hy);
    sb.dd = Grid2D(hx, hy);
    sb.source_nx = slice.nx;
    sb.source_ny = slice.ny;
    std::vector<double> col(g.ny);
    std::vector<double> clo(hy);
    std::vector<double> chi(hy);
    for (std::size_t x = 0; x < hx; ++x) {
        for (std::size_t y = 0; y < g.ny; ++y) {
            col[y] = row_lo.at(x, y);
        }
        detail::analyze_line(col, f, clo, chi);
        for (std::size_t k = 0; k < hy; ++k) {
            sb.ad.at(x, k) = clo[k];
            sb.hd.at(x, k) = chi[k];
        }
        for (std::size_t y = 0; y < g.ny; ++y) {
            col[y] = row_hi.at(x, y);
        }
        detail::analyze_line(col, f, clo, chi);
        for (std::size_t k = 0; k < hy; ++k) {
            sb.vd.at(x, k) = clo[k];
            sb.dd.at(x, k) = chi[k];
        }
    }
    return sb;
}

inline Grid2D idwt2_level1(const Subbands& sb, const WaveletFilter& f = WaveletFilter::db1())
{
    const std::size_t hx = sb.ad.nx;
    const std::size_t hy = sb.ad.ny;
    for (const Grid2D* g : {&sb.hd, &sb.vd, &sb.dd}) {
        if (g->nx != hx || g->ny != hy) {
            throw Error(ErrorCode::DimMismatch, "subband grids differ in size");
        }
    }
    const std::size_t nx = 2 * hx;
    const std::size_t ny = 2 * hy;
    Grid2D row_lo(hx, ny);
    Grid2D row_hi(hx, ny);
    std::vector<double> clo(hy);
    std::vector<double> chi(hy);
    std::vector<double> col(ny);
    for (std::size_t x = 0; x < hx; ++x) {
        for (std::size_t k = 0; k < hy; ++k) {
            clo[k] = sb.ad.at(x, k);
            chi[k] = sb.hd.at(x, k);
        }
        detail::synthesize_line(clo, chi, f, col);
        for (std::size_t y = 0; y < ny; ++y) {
            row_lo.at(x, y) = col[y];
        }
        for (std::size_t k = 0; k < hy; ++k) {
            clo[k] = sb.vd.at(x, k);
            chi[k] = sb.dd.at(x, k);
        }
        detail::synthesize_line(clo, chi, f, col);
        for (std::size_t y = 0; y < ny; ++y) {
            row_hi.at(x, y) = col[y];
        }
    }
    Grid2D full(nx, ny);
    std::vector<double> lo(hx);
    std::vector<double> hi(hx);
    std::vector<double> line(nx);
    for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t k = 0; k < hx; ++k) {
            lo[k] = row_lo.at(k, y);
            hi[k] = row_hi.at(k, y);
        }
        detail::synthesize_line(lo, hi, f, line);
        std::copy(line.begin(), line.end(), full.v.begin() + static_cast<std::ptrdiff_t>(y * nx));
    }

    const std::size_t sx = sb.source_nx == 0 ? nx : sb.source_nx;
    const std::size_t sy = sb.source_ny == 0 ? ny : sb.source_ny;
    if (sx == nx && sy == ny) {
        return full;
    }
    Grid2D out(sx, sy);
    for (std::size_t y = 0; y < sy; ++y) {
        for (std::size_t x = 0; x < sx; ++x) {
            out.at(x, y) = full.at(x, y);
        }
    }
    return out;
}

/// Multi-level decomposition: levels[0] is the finest; each next level decomposes the
/// previous approximation band.
struct WaveletPyramid {
    std::vector<Subbands> levels;
};

inline WaveletPyramid dwt2(const Grid2D& slice, int levels, const WaveletFilter& f = WaveletFilter::db1())
{
    WaveletPyramid p;
    p.levels.push_back(dwt2_level1(slice, f));
    for (int l = 1; l < levels; ++l) {
        const Grid2D& approx = p.levels.back().ad;
        if (approx.nx < 2 || approx.ny < 2) {
            break;
        }
        p.levels.push_back(dwt2_level1(approx, f));
    }
    return p;
}

inline Grid2D idwt2(const WaveletPyramid& p, const WaveletFilter& f = WaveletFilter::db1())
{
    Grid2D current = idwt2_level1(p.levels.back(), f);
    for (std::size_t l = p.levels.size() - 1; l-- > 0;) {
        Subbands sb = p.levels[l];
        sb.ad = std::move(current);
        current = idwt2_level1(sb, f);
    }
    return current;
}

enum class DetailRule { Mean, MaxAbs };

/// Coefficient-wise fusion of exactly four decompositions (FLAIR, T1, T1CE, T2). The
/// approximation band is always averaged; detail bands follow `rule`.
inline Subbands fuse_subbands(std::span<const Subbands> parts, DetailRule rule = DetailRule::Mean)
{
    if (parts.size() != 4) {
        throw Error(ErrorCode::WrongArity, "fusion needs 4 subband sets, got " + std::to_string(parts.size()));
    }
    for (const auto& p : parts) {
        if (!p.same_shape(parts[0]) || p.hd.v.size() != p.ad.v.size() || p.vd.v.size() != p.ad.v.size() ||
            p.dd.v.size() != p.ad.v.size()) {
            throw Error(ErrorCode::DimMismatch, "subband sets differ in shape");
        }
    }
    Subbands out = parts[0];
    auto fuse_band = [&](Grid2D Subbands::*band, bool detail) {
        Grid2D& dst = out.*band;
        for (std::size_t i = 0; i < dst.v.size(); ++i) {
            if (detail && rule == DetailRule::MaxAbs) {
                double best = (parts[0].*band).v[i];
                for (std::size_t k = 1; k < 4; ++k) {
                    const double c = (parts[k].*band).v[i];
                    if (std::fabs(c) > std::fabs(best)) {
                        best = c;
                    }
                }
                dst.v[i] = best;
            } else {
                // Sum in a fixed association order so the mean is order-invariant.
                std::array<double, 4> c{};
                for (std::size_t k = 0; k < 4; ++k) {
                    c[k] = (parts[k].*band).v[i];
                }
                std::sort(c.begin(), c.end());
                dst.v[i] = ((c[0] + c[1]) + (c[2] + c[3])) / 4.0;
            }
        }
    };
    fuse_band(&Subbands::ad, false);
    fuse_band(&Subbands::hd, true);
    fuse_band(&Subbands::vd, true);
    fuse_band(&Subbands::dd, true);
    return out;
}

inline WaveletPyramid fuse_pyramids(std::span<const WaveletPyramid> parts, DetailRule rule = DetailRule::Mean)
{
    if (parts.size() != 4) {
        throw Error(ErrorCode::WrongArity, "fusion needs 4 pyramids, got " + std::to_string(parts.size()));
    }
    WaveletPyramid out;
    for (std::size_t l = 0; l < parts[0].levels.size(); ++l) {
        std::array<Subbands, 4> level;
        for (std::size_t k = 0; k < 4; ++k) {
            if (parts[k].levels.size() != parts[0].levels.size()) {
                throw Error(ErrorCode::DimMismatch, "pyramids differ in depth");
            }
            level[k] = parts[k].levels[l];
        }
        out.levels.push_back(fuse_subbands(level, rule));
    }
    return out;
}

/// Affine map of the whole-volume [min, max] onto [0, 255]; a constant volume maps to 0.
inline Volume rescale_grayscale(const Volume& v)
{
    if (v.empty()) {
        throw Error(ErrorCode::EmptyVolume, "cannot rescale an empty volume");
    }
    const auto [lo_it, hi_it] = std::minmax_element(v.data().begin(), v.data().end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    std::vector<double> out(v.size(), 0.0);
    if (range > 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = std::clamp((v[i] - lo) / range * 255.0, 0.0, 255.0);
        }
    }
    return Volume(v.dims(), v.spacing(), std::move(out));
}

inline Grid2D axial_slice(const Volume& v, std::size_t z)
{
    Grid2D g(v.dims().nx, v.dims().ny);
    const std::size_t plane = g.nx * g.ny;
    std::copy_n(v.data().begin() + static_cast<std::ptrdiff_t>(z * plane), plane, g.v.begin());
    return g;
}

struct WaveletConfig {
    int levels = 1;
    DetailRule detail_rule = DetailRule::Mean;
};

/// Fuses the four modality volumes slice by slice (DWT, fuse, IDWT) and rescales the
/// reassembled stack to 0..255.
inline Volume fuse_volumes(std::span<const Volume* const> modalities, const WaveletConfig& cfg = {})
{
    if (modalities.size() != 4) {
        throw Error(ErrorCode::WrongArity, "fusion needs 4 modalities");
    }
    const Dims d = modalities[0]->dims();
    for (const Volume* m : modalities) {
        if (!(m->dims() == d)) {
            throw Error(ErrorCode::DimMismatch, "modality volumes differ in dims");
        }
    }
    const auto filter = WaveletFilter::db1();
    std::vector<double> fused(d.count());
    const std::size_t plane = d.nx * d.ny;
    for (std::size_t z = 0; z < d.nz; ++z) {
        std::array<WaveletPyramid, 4> pyr;
        for (std::size_t k = 0; k < 4; ++k) {
            pyr[k] = dwt2(axial_slice(*modalities[k], z), cfg.levels, filter);
        }
        const Grid2D slice = idwt2(fuse_pyramids(pyr, cfg.detail_rule), filter);
        std::copy(slice.v.begin(), slice.v.end(), fused.begin() + static_cast<std::ptrdiff_t>(z * plane));
    }
    return rescale_grayscale(Volume(d, modalities[0]->spacing(), std::move(fused)));
}

inline Volume fuse_subject(const SubjectCase& sc, const WaveletConfig& cfg = {})
{
    const std::array<const Volume*, 4> m{&sc.flair, &sc.t1, &sc.t1ce, &sc.t2};
    return fuse_volumes(m, cfg);
}

/// Writes the four bands as raw little-endian float64 grids plus a JSON sidecar.
inline void dump_subbands(const std::filesystem::path& dir, const std::string& stem, const Subbands& sb)
{
    std::filesystem::create_directories(dir);
    const std::array<std::pair<const char*, const Grid2D*>, 4> bands{
        {{"ad", &sb.ad}, {"hd", &sb.hd}, {"vd", &sb.vd}, {"dd", &sb.dd}}};
    nlohmann::json side;
    side["nx"] = sb.ad.nx;
    side["ny"] = sb.ad.ny;
    side["source_nx"] = sb.source_nx;
    side["source_ny"] = sb.source_ny;
    side["dtype"] = "float64-le";
    side["bands"] = nlohmann::json::array();
    for (const auto& [name, grid] : bands) {
        const std::string file = stem + "_" + name + ".bin";
        std::ofstream out(dir / file, std::ios::binary);
        out.write(reinterpret_cast<const char*>(grid->v.data()), static_cast<std::streamsize>(grid->v.size() * sizeof(double)));
        side["bands"].push_back({{"name", name}, {"file", file}});
    }
    std::ofstream(dir / (stem + "_subbands.json")) << side.dump(2) << '\n';
}

} // namespace gliofuse

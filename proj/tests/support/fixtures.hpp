#pragma once

// Random inputs shared by the unit and acceptance suites.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gliofuse/classifiers/common.hpp"
#include "gliofuse/linalg.hpp"
#include "gliofuse/radiomics/discretize.hpp"
#include "gliofuse/random.hpp"
#include "gliofuse/volume.hpp"

namespace fixtures {

using namespace gliofuse;

/// |a - b| within `rel` of the larger magnitude, with a tiny absolute floor for values that
/// should be zero but carry summation noise.
inline bool close(double a, double b, double rel = 1e-9, double abs_floor = 1e-12)
{
    if (a == b) {
        return true;
    }
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b)) + abs_floor;
}

/// Random label grid up to 8x8x8 with ng <= 4 and at least one ROI voxel.
inline radiomics::DiscretizedRoi random_labels(Rng& rng)
{
    const Dims d{1 + uniform_index(rng, 8), 1 + uniform_index(rng, 8), 1 + uniform_index(rng, 8)};
    const int ng = 1 + static_cast<int>(uniform_index(rng, 4));
    const double fill = uniform(rng, 0.3, 1.0);
    std::vector<int> labels(d.count(), 0);
    for (auto& l : labels) {
        if (uniform01(rng) < fill) {
            l = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(ng)));
        }
    }
    if (std::all_of(labels.begin(), labels.end(), [](int l) { return l == 0; })) {
        labels[uniform_index(rng, labels.size())] = 1;
    }
    return radiomics::DiscretizedRoi::from_labels(d, std::move(labels), ng);
}

struct RoiCase {
    Volume image;
    Mask mask;
};

/// Random intensities on an n^3 cube (or random dims up to `max_dim` when n == 0) with a
/// random nonempty mask. `levels` > 0 draws integer intensities so ties occur.
inline RoiCase random_roi(Rng& rng, std::size_t n = 0, std::size_t max_dim = 8, int levels = 0)
{
    const Dims d = n > 0 ? Dims{n, n, n}
                         : Dims{1 + uniform_index(rng, max_dim), 1 + uniform_index(rng, max_dim), 1 + uniform_index(rng, max_dim)};
    std::vector<double> v(d.count());
    for (auto& x : v) {
        x = levels > 0 ? static_cast<double>(uniform_index(rng, static_cast<std::uint64_t>(levels))) : uniform(rng, 0.0, 255.0);
    }
    Mask m(d);
    const double fill = uniform(rng, 0.3, 1.0);
    for (auto& b : m.bits) {
        b = uniform01(rng) < fill ? 1 : 0;
    }
    if (m.count() == 0) {
        m.bits[uniform_index(rng, m.bits.size())] = 1;
    }
    return {Volume(d, {}, std::move(v)), std::move(m)};
}

/// The 24 proper rotations of the cube as signed axis permutations: output axis a reads
/// input axis perm[a], mirrored when flip[a] is set.
struct Rotation {
    std::array<int, 3> perm;
    std::array<bool, 3> flip;
};

inline std::vector<Rotation> cube_rotations()
{
    std::vector<Rotation> out;
    const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (const auto& p : perms) {
        int inversions = 0;
        for (int a = 0; a < 3; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                inversions += p[static_cast<std::size_t>(a)] > p[static_cast<std::size_t>(b)];
            }
        }
        for (int bits = 0; bits < 8; ++bits) {
            const int flips = (bits & 1) + ((bits >> 1) & 1) + ((bits >> 2) & 1);
            if ((inversions + flips) % 2 == 0) {
                out.push_back({p, {(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0}});
            }
        }
    }
    return out;
}

inline std::array<std::size_t, 3> rotate_index(const Rotation& r, std::array<std::size_t, 3> p, std::size_t n)
{
    std::array<std::size_t, 3> q{};
    for (std::size_t a = 0; a < 3; ++a) {
        const std::size_t c = p[static_cast<std::size_t>(r.perm[a])];
        q[a] = r.flip[a] ? n - 1 - c : c;
    }
    return q;
}

/// Rotates an isotropic n^3 case.
inline RoiCase rotate(const RoiCase& c, const Rotation& r)
{
    const std::size_t n = c.image.dims().nx;
    std::vector<double> v(c.image.size());
    Mask m(c.mask.dims);
    for (std::size_t z = 0; z < n; ++z) {
        for (std::size_t y = 0; y < n; ++y) {
            for (std::size_t x = 0; x < n; ++x) {
                const auto q = rotate_index(r, {x, y, z}, n);
                const std::size_t dst = q[0] + n * (q[1] + n * q[2]);
                v[dst] = c.image.at(x, y, z);
                m.bits[dst] = c.mask.at(x, y, z) ? 1 : 0;
            }
        }
    }
    return {Volume(c.image.dims(), c.image.spacing(), std::move(v)), std::move(m)};
}

/// Two unit-variance Gaussian clusters centred at +(c, c) (label 1) and -(c, c) (label 0).
inline classifiers::TrainSet gaussian_clusters(std::uint64_t seed, std::size_t per_class = 100, double c = 2.0)
{
    Rng rng(seed);
    classifiers::TrainSet t{Matrix(2 * per_class, 2), {}};
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int y = i < per_class ? 1 : 0;
        const double s = y == 1 ? c : -c;
        t.x(i, 0) = normal(rng, s, 1.0);
        t.x(i, 1) = normal(rng, s, 1.0);
        t.y.push_back(y);
    }
    return t;
}

inline Matrix random_matrix(Rng& rng, std::size_t n, std::size_t p)
{
    Matrix m(n, p);
    // Column scales vary so the spectrum is not flat.
    std::vector<double> scale(p);
    for (auto& s : scale) {
        s = std::exp(uniform(rng, -2.0, 2.0));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            m(i, j) = normal(rng) * scale[j] + (j > 0 ? 0.5 * m(i, j - 1) : 0.0);
        }
    }
    return m;
}

} // namespace fixtures

#pragma once

// Brute-force reference implementations for texture matrices and feature formulas.
// Matrices are built by all-pairs voxel enumeration and union-find, never by the
// scanning/flood-fill code under test; features are evaluated from sparse maps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gliofuse/radiomics/discretize.hpp"
#include "gliofuse/roi.hpp"
#include "gliofuse/volume.hpp"

namespace oracle {

using gliofuse::Dims;
using gliofuse::Spacing;
using gliofuse::radiomics::DiscretizedRoi;

using Cells = std::map<std::pair<int, int>, long long>;

struct Vox {
    int x, y, z, level;
};

inline std::vector<Vox> voxels(const DiscretizedRoi& d)
{
    std::vector<Vox> v;
    for (std::size_t z = 0; z < d.dims.nz; ++z) {
        for (std::size_t y = 0; y < d.dims.ny; ++y) {
            for (std::size_t x = 0; x < d.dims.nx; ++x) {
                const int l = d.at(x, y, z);
                if (l > 0) {
                    v.push_back({static_cast<int>(x), static_cast<int>(y), static_cast<int>(z), l});
                }
            }
        }
    }
    return v;
}

inline int chebyshev(const Vox& a, const Vox& b)
{
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t a)
    {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (size_[a] < size_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        size_[a] += size_[b];
    }
    std::size_t size(std::size_t a) { return size_[find(a)]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

inline Cells glcm_counts(const DiscretizedRoi& d, std::array<int, 3> off)
{
    const auto v = voxels(d);
    Cells c;
    for (const auto& p : v) {
        for (const auto& q : v) {
            const int dx = q.x - p.x;
            const int dy = q.y - p.y;
            const int dz = q.z - p.z;
            const bool fwd = dx == off[0] && dy == off[1] && dz == off[2];
            const bool back = dx == -off[0] && dy == -off[1] && dz == -off[2];
            if (fwd || back) {
                ++c[{p.level, q.level}];
            }
        }
    }
    return c;
}

/// Runs are the components of "same level, next along the direction" links.
inline Cells glrlm_counts(const DiscretizedRoi& d, std::array<int, 3> dir)
{
    const auto v = voxels(d);
    UnionFind uf(v.size());
    for (std::size_t a = 0; a < v.size(); ++a) {
        for (std::size_t b = 0; b < v.size(); ++b) {
            if (v[b].x - v[a].x == dir[0] && v[b].y - v[a].y == dir[1] && v[b].z - v[a].z == dir[2] &&
                v[a].level == v[b].level) {
                uf.unite(a, b);
            }
        }
    }
    Cells c;
    for (std::size_t a = 0; a < v.size(); ++a) {
        if (uf.find(a) == a) {
            ++c[{v[a].level, static_cast<int>(uf.size(a))}];
        }
    }
    return c;
}

inline Cells glszm_counts(const DiscretizedRoi& d)
{
    const auto v = voxels(d);
    UnionFind uf(v.size());
    for (std::size_t a = 0; a < v.size(); ++a) {
        for (std::size_t b = a + 1; b < v.size(); ++b) {
            if (chebyshev(v[a], v[b]) == 1 && v[a].level == v[b].level) {
                uf.unite(a, b);
            }
        }
    }
    Cells c;
    for (std::size_t a = 0; a < v.size(); ++a) {
        if (uf.find(a) == a) {
            ++c[{v[a].level, static_cast<int>(uf.size(a))}];
        }
    }
    return c;
}

/// Column is the raw neighbour count (0..26).
inline Cells gldm_counts(const DiscretizedRoi& d, int alpha = 0)
{
    const auto v = voxels(d);
    Cells c;
    for (const auto& p : v) {
        int k = 0;
        for (const auto& q : v) {
            if (chebyshev(p, q) == 1 && std::abs(p.level - q.level) <= alpha) {
                ++k;
            }
        }
        ++c[{p.level, k}];
    }
    return c;
}

struct Ngtdm {
    std::vector<long long> n; ///< index = level - 1
    std::vector<double> s;
};

inline Ngtdm ngtdm(const DiscretizedRoi& d)
{
    const auto v = voxels(d);
    Ngtdm out{std::vector<long long>(static_cast<std::size_t>(d.ng), 0), std::vector<double>(static_cast<std::size_t>(d.ng), 0.0)};
    for (const auto& p : v) {
        int cnt = 0;
        double sum = 0.0;
        for (const auto& q : v) {
            if (chebyshev(p, q) == 1) {
                ++cnt;
                sum += q.level;
            }
        }
        if (cnt > 0) {
            ++out.n[static_cast<std::size_t>(p.level - 1)];
            out.s[static_cast<std::size_t>(p.level - 1)] += std::fabs(p.level - sum / cnt);
        }
    }
    return out;
}

inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

/// Co-occurrence features from a count map, textbook definitions.
inline std::array<double, 24> glcm_features(const Cells& counts, int ng)
{
    double total = 0.0;
    for (const auto& [k, c] : counts) {
        total += static_cast<double>(c);
    }
    std::array<double, 24> f{};
    if (total == 0.0) {
        f[6] = 1.0;
        f[15] = 1.0;
        return f;
    }
    std::map<std::pair<int, int>, double> p;
    for (const auto& [k, c] : counts) {
        p[k] = static_cast<double>(c) / total;
    }
    std::map<int, double> px, py, psum, pdiff;
    for (const auto& [k, v] : p) {
        px[k.first] += v;
        py[k.second] += v;
        psum[k.first + k.second] += v;
        pdiff[std::abs(k.first - k.second)] += v;
    }
    double mux = 0.0, muy = 0.0;
    for (const auto& [i, v] : px) {
        mux += i * v;
    }
    for (const auto& [j, v] : py) {
        muy += j * v;
    }
    double sx2 = 0.0, sy2 = 0.0, hx = 0.0, hy = 0.0;
    for (const auto& [i, v] : px) {
        sx2 += (i - mux) * (i - mux) * v;
        hx -= xlog2x(v);
    }
    for (const auto& [j, v] : py) {
        sy2 += (j - muy) * (j - muy) * v;
        hy -= xlog2x(v);
    }
    double hxy1 = 0.0, hxy2 = 0.0;
    for (const auto& [i, a] : px) {
        for (const auto& [j, b] : py) {
            const auto it = p.find({i, j});
            const double pij = it == p.end() ? 0.0 : it->second;
            hxy1 -= pij * std::log2(a * b);
            hxy2 -= a * b * std::log2(a * b);
        }
    }
    const double g = ng;
    double auto_c = 0, prom = 0, shade = 0, tend = 0, contrast = 0, energy = 0, hxy = 0, idm = 0, idmn = 0, id = 0, idn = 0,
           maxp = 0, ss = 0;
    for (const auto& [k, v] : p) {
        const double i = k.first;
        const double j = k.second;
        auto_c += i * j * v;
        prom += std::pow(i + j - mux - muy, 4) * v;
        shade += std::pow(i + j - mux - muy, 3) * v;
        tend += std::pow(i + j - mux - muy, 2) * v;
        contrast += (i - j) * (i - j) * v;
        energy += v * v;
        hxy -= v * std::log2(v);
        idm += v / (1.0 + (i - j) * (i - j));
        idmn += v / (1.0 + (i - j) * (i - j) / (g * g));
        id += v / (1.0 + std::fabs(i - j));
        idn += v / (1.0 + std::fabs(i - j) / g);
        maxp = std::max(maxp, v);
        ss += (i - mux) * (i - mux) * v;
    }
    double da = 0, de = 0, iv = 0;
    for (const auto& [k, v] : pdiff) {
        da += k * v;
        de -= xlog2x(v);
        if (k > 0) {
            iv += v / (static_cast<double>(k) * k);
        }
    }
    double dv = 0;
    for (const auto& [k, v] : pdiff) {
        dv += (k - da) * (k - da) * v;
    }
    double sa = 0, se = 0;
    for (const auto& [k, v] : psum) {
        sa += k * v;
        se -= xlog2x(v);
    }
    const bool flat = sx2 <= 0.0 || sy2 <= 0.0;
    const double corr = flat ? 1.0 : (auto_c - mux * muy) / std::sqrt(sx2 * sy2);
    const double imc1 = std::max(hx, hy) > 0.0 ? (hxy - hxy1) / std::max(hx, hy) : 0.0;
    const double imc2 = hxy2 > hxy ? std::sqrt(1.0 - std::exp(-2.0 * (hxy2 - hxy))) : 0.0;

    double mcc = 1.0;
    if (!flat && px.size() >= 2) {
        std::vector<int> lv;
        for (const auto& [i, v] : px) {
            lv.push_back(i);
        }
        const auto n = static_cast<Eigen::Index>(lv.size());
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
        auto P = [&](int i, int j) {
            const auto it = p.find({i, j});
            return it == p.end() ? 0.0 : it->second;
        };
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = 0; b < n; ++b) {
                double s = 0.0;
                for (const auto& [k, pyk] : py) {
                    s += P(lv[static_cast<std::size_t>(a)], k) * P(lv[static_cast<std::size_t>(b)], k) /
                         (px[lv[static_cast<std::size_t>(a)]] * pyk);
                }
                q(a, b) = s;
            }
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(q);
        std::vector<double> ev;
        for (Eigen::Index a = 0; a < n; ++a) {
            ev.push_back(es.eigenvalues()[a].real());
        }
        std::sort(ev.begin(), ev.end(), std::greater<>());
        mcc = std::min(1.0, std::sqrt(std::max(0.0, ev[1])));
    }
    return {auto_c, mux, prom, shade, tend, contrast, corr, da, de, dv, energy, hxy,
            imc1, imc2, idm, mcc, idmn, id, idn, iv, maxp, sa, se, ss};
}

/// Run/zone/dependence features in run-length order; `j_shift` is added to column values.
inline std::array<double, 16> size_features(const Cells& cells, double voxels, int j_shift = 0)
{
    double nr = 0.0;
    for (const auto& [k, c] : cells) {
        nr += static_cast<double>(c);
    }
    std::array<double, 16> f{};
    if (nr == 0.0) {
        return f;
    }
    std::map<int, double> by_i, by_j;
    double mui = 0.0, muj = 0.0;
    for (const auto& [k, c] : cells) {
        const double p = static_cast<double>(c) / nr;
        by_i[k.first] += static_cast<double>(c);
        by_j[k.second + j_shift] += static_cast<double>(c);
        mui += p * k.first;
        muj += p * (k.second + j_shift);
    }
    for (const auto& [k, c] : cells) {
        const double p = static_cast<double>(c) / nr;
        const double i = k.first;
        const double j = k.second + j_shift;
        f[0] += p / (j * j);
        f[1] += p * j * j;
        f[7] += p * (i - mui) * (i - mui);
        f[8] += p * (j - muj) * (j - muj);
        f[9] -= p * std::log2(p);
        f[10] += p / (i * i);
        f[11] += p * i * i;
        f[12] += p / (i * i * j * j);
        f[13] += p * i * i / (j * j);
        f[14] += p * j * j / (i * i);
        f[15] += p * i * i * j * j;
    }
    for (const auto& [i, s] : by_i) {
        f[2] += s * s / nr;
    }
    f[3] = f[2] / nr;
    for (const auto& [j, s] : by_j) {
        f[4] += s * s / nr;
    }
    f[5] = f[4] / nr;
    f[6] = nr / voxels;
    return f;
}

inline std::array<double, 5> ngtdm_features(const Ngtdm& m)
{
    double nvp = 0.0;
    for (auto n : m.n) {
        nvp += static_cast<double>(n);
    }
    std::array<double, 5> f{};
    struct L {
        double i, p, s;
    };
    std::vector<L> live;
    double ps = 0.0, stot = 0.0;
    for (std::size_t k = 0; k < m.n.size(); ++k) {
        if (m.n[k] > 0) {
            const double p = static_cast<double>(m.n[k]) / nvp;
            live.push_back({static_cast<double>(k + 1), p, m.s[k]});
            ps += p * m.s[k];
            stot += m.s[k];
        }
    }
    f[0] = ps > 0.0 ? 1.0 / ps : 1e6;
    if (live.empty()) {
        return f;
    }
    const double ngp = static_cast<double>(live.size());
    double c = 0, bd = 0, cx = 0, st = 0;
    for (const auto& a : live) {
        for (const auto& b : live) {
            c += a.p * b.p * (a.i - b.i) * (a.i - b.i);
            bd += std::fabs(a.i * a.p - b.i * b.p);
            cx += std::fabs(a.i - b.i) * (a.p * a.s + b.p * b.s) / (a.p + b.p);
            st += (a.p + b.p) * (a.i - b.i) * (a.i - b.i);
        }
    }
    f[1] = ngp > 1.0 ? c / (ngp * (ngp - 1.0)) * stot / nvp : 0.0;
    f[2] = bd > 0.0 ? ps / bd : 0.0;
    f[3] = cx / nvp;
    f[4] = stot > 0.0 ? st / stot : 0.0;
    return f;
}

inline std::array<std::array<int, 3>, 13> directions()
{
    // Every offset with Chebyshev norm 1 whose first nonzero component is positive.
    std::array<std::array<int, 3>, 13> out{};
    std::size_t n = 0;
    for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int first = dx != 0 ? dx : dy != 0 ? dy : dz;
                if (first > 0) {
                    out[n++] = {dx, dy, dz};
                }
            }
        }
    }
    return out;
}

template <std::size_t N>
std::array<double, N> mean_of(const std::vector<std::array<double, N>>& rows)
{
    std::array<double, N> m{};
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < N; ++k) {
            m[k] += r[k];
        }
    }
    for (auto& x : m) {
        x /= static_cast<double>(rows.size());
    }
    return m;
}

inline double percentile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double rank = q * static_cast<double>(v.size() - 1);
    const double lo = std::floor(rank);
    const double frac = rank - lo;
    const auto i = static_cast<std::size_t>(lo);
    return frac == 0.0 ? v[i] : v[i] * (1.0 - frac) + v[i + 1] * frac;
}

inline std::array<double, 18> first_order(const std::vector<double>& v, const DiscretizedRoi& d, double voxel_volume)
{
    const double n = static_cast<double>(v.size());
    double e = 0, s = 0;
    for (double x : v) {
        e += x * x;
        s += x;
    }
    const double mean = s / n;
    double m2 = 0, m3 = 0, m4 = 0, mad = 0;
    for (double x : v) {
        m2 += std::pow(x - mean, 2) / n;
        m3 += std::pow(x - mean, 3) / n;
        m4 += std::pow(x - mean, 4) / n;
        mad += std::fabs(x - mean) / n;
    }
    const double p10 = percentile(v, 0.1);
    const double p90 = percentile(v, 0.9);
    std::vector<double> mid;
    for (double x : v) {
        if (x >= p10 && x <= p90) {
            mid.push_back(x);
        }
    }
    const double mid_mean = mid.empty() ? 0.0 : std::accumulate(mid.begin(), mid.end(), 0.0) / static_cast<double>(mid.size());
    double rmad = 0;
    for (double x : mid) {
        rmad += std::fabs(x - mid_mean) / static_cast<double>(mid.size());
    }
    std::map<int, double> hist;
    double cnt = 0;
    for (int l : d.labels) {
        if (l > 0) {
            hist[l] += 1;
            cnt += 1;
        }
    }
    double ent = 0, uni = 0;
    for (const auto& [l, c] : hist) {
        ent -= xlog2x(c / cnt);
        uni += (c / cnt) * (c / cnt);
    }
    const double mn = *std::min_element(v.begin(), v.end());
    const double mx = *std::max_element(v.begin(), v.end());
    const bool flat = m2 <= 0.0;
    return {e,
            e * voxel_volume,
            ent,
            mn,
            p10,
            p90,
            mx,
            mean,
            percentile(v, 0.5),
            percentile(v, 0.75) - percentile(v, 0.25),
            mx - mn,
            mad,
            rmad,
            std::sqrt(e / n),
            flat ? 0.0 : m3 / std::pow(m2, 1.5),
            flat ? 0.0 : m4 / (m2 * m2),
            m2,
            uni};
}

/// Shape features from all-pairs enumeration and a dense eigen-solver.
inline std::array<double, 14> shape(const gliofuse::Mask& m, const Spacing& sp)
{
    std::vector<std::array<double, 3>> pts;
    std::vector<std::array<int, 3>> ip;
    for (std::size_t z = 0; z < m.dims.nz; ++z) {
        for (std::size_t y = 0; y < m.dims.ny; ++y) {
            for (std::size_t x = 0; x < m.dims.nx; ++x) {
                if (m.at(x, y, z)) {
                    ip.push_back({static_cast<int>(x), static_cast<int>(y), static_cast<int>(z)});
                    pts.push_back({x * sp.sx, y * sp.sy, z * sp.sz});
                }
            }
        }
    }
    const double n = static_cast<double>(pts.size());
    const double vol = n * sp.sx * sp.sy * sp.sz;
    // Each face shared by two voxels hides two unit faces.
    double area = 0.0;
    const std::array<double, 3> face{sp.sy * sp.sz, sp.sx * sp.sz, sp.sx * sp.sy};
    for (std::size_t a = 0; a < 3; ++a) {
        area += 2.0 * n * face[a];
    }
    double far3 = 0.0;
    std::array<double, 3> planar{};
    for (std::size_t a = 0; a < ip.size(); ++a) {
        for (std::size_t b = a + 1; b < ip.size(); ++b) {
            int same = 0;
            int axis = -1;
            double d2 = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                const double dd = pts[a][k] - pts[b][k];
                d2 += dd * dd;
            }
            for (int k = 0; k < 3; ++k) {
                const int diff = std::abs(ip[a][static_cast<std::size_t>(k)] - ip[b][static_cast<std::size_t>(k)]);
                if (diff == 1 && ip[a][static_cast<std::size_t>((k + 1) % 3)] == ip[b][static_cast<std::size_t>((k + 1) % 3)] &&
                    ip[a][static_cast<std::size_t>((k + 2) % 3)] == ip[b][static_cast<std::size_t>((k + 2) % 3)]) {
                    area -= 2.0 * face[static_cast<std::size_t>(k)];
                }
                if (diff == 0) {
                    ++same;
                    axis = k;
                }
            }
            far3 = std::max(far3, d2);
            if (same >= 1) {
                for (int k = 0; k < 3; ++k) {
                    if (ip[a][static_cast<std::size_t>(k)] == ip[b][static_cast<std::size_t>(k)]) {
                        planar[static_cast<std::size_t>(k)] = std::max(planar[static_cast<std::size_t>(k)], d2);
                    }
                }
            }
            (void)axis;
        }
    }
    std::sort(planar.begin(), planar.end(), std::greater<>());
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : pts) {
        mean += Eigen::Vector3d(p[0], p[1], p[2]);
    }
    mean /= n;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) {
        const Eigen::Vector3d d = Eigen::Vector3d(p[0], p[1], p[2]) - mean;
        cov += d * d.transpose();
    }
    cov /= n;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    std::array<double, 3> lam{es.eigenvalues()[2], es.eigenvalues()[1], es.eigenvalues()[0]};
    const double top = std::max(lam[0], 0.0);
    for (auto& l : lam) {
        l = l > 1e-12 * top ? l : 0.0;
    }
    const double sph = std::cbrt(std::numbers::pi) * std::pow(6.0 * vol, 2.0 / 3.0) / area;
    return {vol,
            vol,
            area,
            area / vol,
            sph,
            std::sqrt(far3),
            std::sqrt(planar[0]),
            std::sqrt(planar[1]),
            std::sqrt(planar[2]),
            4.0 * std::sqrt(lam[0]),
            4.0 * std::sqrt(lam[1]),
            4.0 * std::sqrt(lam[2]),
            lam[0] > 0.0 ? std::sqrt(lam[1] / lam[0]) : 1.0,
            lam[0] > 0.0 ? std::sqrt(lam[2] / lam[0]) : 1.0};
}

/// Equal-width binning with the top edge folded into the last bin; constant data gets one level.
inline DiscretizedRoi bin_count(const gliofuse::Volume& img, const gliofuse::Mask& mask, int bins)
{
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (mask.bits[i]) {
            lo = std::min(lo, img[i]);
            hi = std::max(hi, img[i]);
        }
    }
    std::vector<int> labels(mask.bits.size(), 0);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (!mask.bits[i]) {
            continue;
        }
        if (hi == lo) {
            labels[i] = 1;
        } else {
            const int b = static_cast<int>(std::floor((img[i] - lo) / (hi - lo) * bins));
            labels[i] = std::min(b, bins - 1) + 1;
        }
    }
    return DiscretizedRoi::from_labels(img.dims(), labels, hi == lo ? 1 : bins, img.spacing());
}

/// All 107 features of one ROI in extraction order.
inline std::array<double, 107> roi_features(const gliofuse::Volume& img, const gliofuse::Mask& mask, int bins = 32)
{
    const auto d = bin_count(img, mask, bins);
    std::vector<double> vals;
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (mask.bits[i]) {
            vals.push_back(img[i]);
        }
    }
    const double voxels = static_cast<double>(vals.size());
    std::array<double, 107> out{};
    std::size_t k = 0;
    auto put = [&](const auto& arr) {
        for (double v : arr) {
            out[k++] = v;
        }
    };
    put(shape(mask, img.spacing()));
    put(first_order(vals, d, img.spacing().voxel_volume()));

    std::vector<std::array<double, 24>> gl;
    std::vector<std::array<double, 16>> rl;
    for (const auto& dir : directions()) {
        const auto c = glcm_counts(d, dir);
        if (!c.empty()) {
            gl.push_back(glcm_features(c, d.ng));
        }
        rl.push_back(size_features(glrlm_counts(d, dir), voxels));
    }
    put(gl.empty() ? glcm_features({}, d.ng) : mean_of(gl));
    const auto dep = size_features(gldm_counts(d, 0), voxels, 1);
    put(std::array<double, 14>{dep[0], dep[1], dep[2], dep[4], dep[5], dep[7], dep[8], dep[9], dep[10], dep[11], dep[12],
                               dep[13], dep[14], dep[15]});
    put(mean_of(rl));
    put(size_features(glszm_counts(d), voxels));
    put(ngtdm_features(ngtdm(d)));
    return out;
}

} // namespace oracle

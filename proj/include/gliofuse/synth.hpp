#pragma once

// Deterministic multi-sequence phantoms standing in for licensed MRI cohorts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gliofuse/random.hpp"
#include "gliofuse/volume.hpp"

namespace gliofuse {

struct SynthOptions {
    Dims dims{128, 128, 16};
    Spacing spacing{1.0, 1.0, 1.0};
};

namespace detail {

// Mean intensity per tissue class: brain, necrotic core, enhancing rim, edema.
struct TissueContrast {
    double brain;
    double core;
    double enhancing;
    double edema;
};

inline constexpr std::array<TissueContrast, 4> kContrast{{
    {0.45, 0.55, 0.75, 0.90}, // FLAIR
    {0.60, 0.25, 0.50, 0.45}, // T1
    {0.55, 0.30, 0.95, 0.50}, // T1CE
    {0.40, 0.80, 0.65, 0.85}, // T2
}};

} // namespace detail

/// Builds a phantom with an ellipsoidal tumour: necrotic core (label 1) inside an
/// enhancing rim (label 4) inside an edema shell (label 2). High-grade phantoms get a
/// larger, more heterogeneous core. Identical (seed, grade) gives a bit-identical case.
inline SubjectCase synth_subject(std::uint64_t seed, Grade grade, const SynthOptions& opt = {})
{
    const bool hgg = grade == Grade::HGG;
    Rng rng(derive_seed(seed, hgg ? 0x4847 : 0x4C47));
    const Dims d = opt.dims;
    const double nx = static_cast<double>(d.nx);
    const double ny = static_cast<double>(d.ny);
    const double nz = static_cast<double>(d.nz);

    const double bcx = (nx - 1) / 2.0;
    const double bcy = (ny - 1) / 2.0;
    const double bcz = (nz - 1) / 2.0;
    const double brx = 0.42 * nx;
    const double bry = 0.46 * ny;
    const double brz = 0.80 * nz;

    const double tcx = bcx + uniform(rng, -0.08, 0.08) * nx;
    const double tcy = bcy + uniform(rng, -0.08, 0.08) * ny;
    const double tcz = bcz + uniform(rng, -0.05, 0.05) * nz;
    const double trx = uniform(rng, 0.14, 0.18) * nx;
    const double try_ = trx * uniform(rng, 0.85, 1.15);
    const double trz = std::max(2.5, uniform(rng, 0.30, 0.36) * nz);

    const double core_r = hgg ? uniform(rng, 0.50, 0.58) : uniform(rng, 0.28, 0.36);
    const double rim_r = core_r + (hgg ? uniform(rng, 0.15, 0.20) : uniform(rng, 0.10, 0.14));
    const double core_sigma = hgg ? 0.12 : 0.03;
    const double enhancing_scale = hgg ? 1.0 : 0.7;

    std::array<double, 4> gain{};
    for (double& g : gain) {
        g = uniform(rng, 0.95, 1.05);
    }

    std::vector<double> seg(d.count(), 0.0);
    std::array<std::vector<double>, 4> mod;
    for (auto& m : mod) {
        m.assign(d.count(), 0.0);
    }

    for (std::size_t z = 0; z < d.nz; ++z) {
        for (std::size_t y = 0; y < d.ny; ++y) {
            for (std::size_t x = 0; x < d.nx; ++x) {
                const std::size_t i = x + d.nx * (y + d.ny * z);
                const double bx = (static_cast<double>(x) - bcx) / brx;
                const double by = (static_cast<double>(y) - bcy) / bry;
                const double bz = (static_cast<double>(z) - bcz) / brz;
                if (bx * bx + by * by + bz * bz > 1.0) {
                    continue;
                }
                const double tx = (static_cast<double>(x) - tcx) / trx;
                const double ty = (static_cast<double>(y) - tcy) / try_;
                const double tz = (static_cast<double>(z) - tcz) / trz;
                const double r = std::sqrt(tx * tx + ty * ty + tz * tz);
                int label = 0;
                if (r <= core_r) {
                    label = 1;
                } else if (r <= rim_r) {
                    label = 4;
                } else if (r <= 1.0) {
                    label = 2;
                }
                seg[i] = label;
                for (std::size_t m = 0; m < 4; ++m) {
                    const auto& c = detail::kContrast[m];
                    double value = 0.0;
                    switch (label) {
                    case 0: value = normal(rng, c.brain, 0.03); break;
                    case 1: value = normal(rng, c.core, core_sigma); break;
                    case 4: value = normal(rng, c.brain + (c.enhancing - c.brain) * enhancing_scale, 0.04); break;
                    default: value = normal(rng, c.edema, 0.04); break;
                    }
                    mod[m][i] = std::clamp(value * gain[m], 0.02, 1.5);
                }
            }
        }
    }

    SubjectCase sc;
    sc.id = std::string(hgg ? "SYN_HGG_" : "SYN_LGG_") + std::to_string(seed);
    sc.grade = grade;
    sc.flair = Volume(d, opt.spacing, std::move(mod[0]));
    sc.t1 = Volume(d, opt.spacing, std::move(mod[1]));
    sc.t1ce = Volume(d, opt.spacing, std::move(mod[2]));
    sc.t2 = Volume(d, opt.spacing, std::move(mod[3]));
    sc.seg = Volume(d, opt.spacing, std::move(seg), true);
    return sc;
}

struct CohortEntry {
    std::string id;
    std::uint64_t seed = 0;
    Grade grade = Grade::LGG;
};

struct CohortManifest {
    std::vector<CohortEntry> subjects;
    Dims dims{128, 128, 16};
};

/// Lists `n_hgg` high-grade then `n_lgg` low-grade phantoms with per-subject seeds.
inline CohortManifest make_cohort(std::size_t n_hgg, std::size_t n_lgg, std::uint64_t seed, Dims dims = {128, 128, 16})
{
    CohortManifest m;
    m.dims = dims;
    auto add = [&](Grade g, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint64_t s = derive_seed(seed, m.subjects.size()) % 1000000007ULL;
            char id[32];
            std::snprintf(id, sizeof id, "SYN_%s_%03zu", g == Grade::HGG ? "HGG" : "LGG", i);
            m.subjects.push_back({id, s, g});
        }
    };
    add(Grade::HGG, n_hgg);
    add(Grade::LGG, n_lgg);
    return m;
}

inline SubjectCase synth_entry(const CohortEntry& e, Dims dims)
{
    SubjectCase sc = synth_subject(e.seed, e.grade, SynthOptions{dims, {}});
    sc.id = e.id;
    return sc;
}

inline nlohmann::json to_json(const CohortManifest& m)
{
    nlohmann::json j;
    j["version"] = 1;
    j["dims"] = {m.dims.nx, m.dims.ny, m.dims.nz};
    j["subjects"] = nlohmann::json::array();
    for (const auto& s : m.subjects) {
        j["subjects"].push_back({{"id", s.id}, {"seed", s.seed}, {"grade", to_string(s.grade)}});
    }
    return j;
}

inline CohortManifest cohort_from_json(const nlohmann::json& j)
{
    CohortManifest m;
    if (j.contains("dims")) {
        const auto& d = j.at("dims");
        m.dims = {d.at(0).get<std::size_t>(), d.at(1).get<std::size_t>(), d.at(2).get<std::size_t>()};
    }
    for (const auto& s : j.at("subjects")) {
        m.subjects.push_back({s.at("id").get<std::string>(), s.at("seed").get<std::uint64_t>(),
                              parse_grade(s.at("grade").get<std::string>())});
    }
    return m;
}

} // namespace gliofuse

#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gliofuse/radiomics/discretize.hpp"
#include "gliofuse/radiomics/first_order.hpp"
#include "gliofuse/radiomics/glcm.hpp"
#include "gliofuse/radiomics/ngtdm.hpp"
#include "gliofuse/radiomics/shape.hpp"
#include "gliofuse/radiomics/size_matrices.hpp"
#include "gliofuse/roi.hpp"

namespace gliofuse::radiomics {

inline constexpr std::size_t kFeaturesPerRoi = 107;
inline constexpr std::size_t kRoiCount = 3;
inline constexpr std::size_t kFeatureCount = kFeaturesPerRoi * kRoiCount;
inline constexpr std::string_view kManifestVersion = "gliofuse-feature-manifest v1";

struct ExtractionConfig {
    BinningPolicy binning = FixedBinCount{32};
    int gldm_alpha = 0;
};

/// `<family>_<Feature>` for the 107 per-ROI features, in extraction order.
inline const std::vector<std::string>& roi_feature_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        auto add = [&](std::string_view family, auto const& list) {
            for (auto n : list) {
                out.push_back(std::string(family) + "_" + std::string(n));
            }
        };
        add("shape", kShapeNames);
        add("firstorder", kFirstOrderNames);
        add("glcm", kGlcmNames);
        add("gldm", kGldmNames);
        add("glrlm", kGlrlmNames);
        add("glszm", kGlszmNames);
        add("ngtdm", kNgtdmNames);
        return out;
    }();
    return names;
}

/// The 321 column names `<family>_<Feature>_ROI<k>`, ROI1 block first.
inline const std::vector<std::string>& feature_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (std::size_t k = 1; k <= kRoiCount; ++k) {
            for (const auto& n : roi_feature_names()) {
                out.push_back(n + "_ROI" + std::to_string(k));
            }
        }
        return out;
    }();
    return names;
}

struct FeatureVector {
    std::vector<double> values; ///< aligned with feature_names()

    [[nodiscard]] double get(std::string_view name) const
    {
        const auto& names = feature_names();
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) {
                return values[i];
            }
        }
        throw Error(ErrorCode::SchemaMismatch, "unknown feature " + std::string(name));
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// All 107 features of one masked region.
inline std::array<double, kFeaturesPerRoi> extract_roi_features(const MaskedVolume& mv, const ExtractionConfig& cfg = {})
{
    const DiscretizedRoi disc = discretize(mv, cfg.binning);
    std::array<double, kFeaturesPerRoi> out{};
    std::size_t k = 0;
    auto put = [&](auto const& values) {
        for (double v : values) {
            out[k++] = v;
        }
    };
    put(shape_features(*mv.mask, mv.image->spacing()));
    put(first_order_features(mv, disc));
    put(glcm_features(disc));
    put(gldm_features(disc, cfg.gldm_alpha));
    put(glrlm_features(disc));
    put(glszm_features(disc));
    put(ngtdm_features(disc));
    return out;
}

inline FeatureVector extract_feature_vector(const Volume& fused, const RoiSet& rois, const ExtractionConfig& cfg = {})
{
    FeatureVector fv;
    fv.values.reserve(kFeatureCount);
    for (int k = 1; k <= static_cast<int>(kRoiCount); ++k) {
        const auto block = extract_roi_features(superimpose(fused, rois.get(k)), cfg);
        fv.values.insert(fv.values.end(), block.begin(), block.end());
    }
    for (std::size_t i = 0; i < fv.values.size(); ++i) {
        if (!std::isfinite(fv.values[i])) {
            throw Error(ErrorCode::NonFiniteValue, "feature " + feature_names()[i] + " is not finite");
        }
    }
    return fv;
}

inline void write_manifest(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    out << kManifestVersion << '\n';
    for (const auto& n : feature_names()) {
        out << n << '\n';
    }
}

} // namespace gliofuse::radiomics

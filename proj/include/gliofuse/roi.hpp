#pragma once

// Tumour regions from BraTS segmentation labels (1 necrotic/non-enhancing core,
// 2 edema, 4 enhancing tumour).

#include <algorithm>
#include <set>
#include <vector>

#include "gliofuse/error.hpp"
#include "gliofuse/nifti.hpp"
#include "gliofuse/volume.hpp"

namespace gliofuse {

struct RoiLabelMap {
    std::vector<int> roi2{1};
    std::vector<int> roi3{1, 2, 4};
};

struct RoiSet {
    Mask roi1; ///< brain tissue outside the tumour
    Mask roi2; ///< necrotic and non-enhancing core
    Mask roi3; ///< whole tumour
    RoiLabelMap label_map;

    [[nodiscard]] const Mask& get(int k) const
    {
        switch (k) {
        case 1: return roi1;
        case 2: return roi2;
        case 3: return roi3;
        default: throw Error(ErrorCode::EmptyRoi, "ROI index must be 1..3");
        }
    }
};

/// Builds the three ROI masks. `brain` is any modality volume whose nonzero voxels mark
/// brain tissue. Throws EmptyRoiError naming the first empty region.
inline RoiSet derive_rois(const Volume& seg, const Volume& brain, const RoiLabelMap& labels = {})
{
    if (!(seg.dims() == brain.dims())) {
        throw Error(ErrorCode::DimMismatch, "segmentation and brain volume differ in dims");
    }
    const auto in = [](const std::vector<int>& set, int v) { return std::find(set.begin(), set.end(), v) != set.end(); };
    RoiSet r;
    r.label_map = labels;
    r.roi1 = Mask(seg.dims());
    r.roi2 = Mask(seg.dims());
    r.roi3 = Mask(seg.dims());
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const int label = static_cast<int>(std::lround(seg[i]));
        r.roi1.bits[i] = (brain[i] > 0.0 && label == 0) ? 1 : 0;
        r.roi2.bits[i] = in(labels.roi2, label) ? 1 : 0;
        r.roi3.bits[i] = in(labels.roi3, label) ? 1 : 0;
    }
    for (int k = 1; k <= 3; ++k) {
        if (r.get(k).count() == 0) {
            throw EmptyRoiError(k);
        }
    }
    return r;
}

/// A fused image restricted to one ROI; feature extractors read only masked voxels.
struct MaskedVolume {
    const Volume* image = nullptr;
    const Mask* mask = nullptr;
    std::size_t voxel_count = 0;

    [[nodiscard]] std::vector<double> values() const
    {
        std::vector<double> out;
        out.reserve(voxel_count);
        for (std::size_t i = 0; i < mask->bits.size(); ++i) {
            if (mask->bits[i]) {
                out.push_back((*image)[i]);
            }
        }
        return out;
    }
};

/// Pairs `img` with `mask`; both must outlive the returned view.
inline MaskedVolume superimpose(const Volume& img, const Mask& mask)
{
    if (!(img.dims() == mask.dims)) {
        throw Error(ErrorCode::DimMismatch, "image and mask differ in dims");
    }
    const std::size_t n = mask.count();
    if (n == 0) {
        throw Error(ErrorCode::EmptyMask, "mask has no voxels");
    }
    return {&img, &mask, n};
}

inline Volume mask_to_volume(const Mask& m, Spacing spacing = {})
{
    std::vector<double> data(m.bits.begin(), m.bits.end());
    return Volume(m.dims, spacing, std::move(data), true);
}

/// Exports a mask as a uint8 NIfTI-1 image.
inline void write_mask(const std::filesystem::path& path, const Mask& m, Spacing spacing = {})
{
    nifti::WriteOptions opt;
    opt.datatype = nifti::Datatype::UInt8;
    nifti::write_file(path, mask_to_volume(m, spacing), opt);
}

} // namespace gliofuse

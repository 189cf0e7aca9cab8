// Synthesizes one phantom, fuses its four modalities, and prints a few ROI2 features.
//
//   fuse_phantom [seed] [HGG|LGG] [out.nii.gz]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "gliofuse/nifti.hpp"
#include "gliofuse/radiomics/extractor.hpp"
#include "gliofuse/roi.hpp"
#include "gliofuse/synth.hpp"
#include "gliofuse/wavelet.hpp"

int main(int argc, char** argv)
{
    using namespace gliofuse;
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0;
    const Grade grade = argc > 2 ? parse_grade(argv[2]) : Grade::HGG;

    try {
        const auto sc = synth_subject(seed, grade);
        const auto fused = fuse_subject(sc);
        const auto rois = derive_rois(sc.seg, sc.flair);
        const auto fv = radiomics::extract_feature_vector(fused, rois);

        std::printf("%s: %zux%zux%zu, ROI voxels %zu / %zu / %zu\n", sc.id.c_str(), fused.dims().nx, fused.dims().ny,
                    fused.dims().nz, rois.roi1.count(), rois.roi2.count(), rois.roi3.count());
        for (const char* name : {"firstorder_Energy_ROI2", "firstorder_Entropy_ROI2", "glcm_Contrast_ROI2",
                                 "shape_Sphericity_ROI3", "ngtdm_Coarseness_ROI2"}) {
            std::printf("  %-26s %.6g\n", name, fv.get(name));
        }
        if (argc > 3) {
            nifti::write_file(argv[3], fused);
            std::printf("fused volume written to %s\n", argv[3]);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "fuse_phantom: %s\n", e.what());
        return 1;
    }
    return 0;
}

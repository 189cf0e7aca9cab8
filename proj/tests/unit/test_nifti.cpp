#include <cstring>
#include <filesystem>

#include <gtest/gtest.h>

#include "gliofuse/nifti.hpp"

using namespace gliofuse;

namespace {

template <typename T>
void poke(std::vector<std::uint8_t>& bytes, std::size_t offset, T value)
{
    std::memcpy(bytes.data() + offset, &value, sizeof(T));
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

} // namespace

TEST(Nifti, HeaderDimsGiveVolumeDims)
{
    auto bytes = nifti::serialize(Volume::filled({2, 2, 2}, 0.0));
    const std::array<std::int16_t, 8> dim{3, 240, 240, 155, 1, 1, 1, 1};
    for (std::size_t i = 0; i < dim.size(); ++i) {
        poke(bytes, 40 + 2 * i, dim[i]);
    }
    const auto h = nifti::parse_header(bytes);
    EXPECT_EQ(nifti::grid_dims(h), (Dims{240, 240, 155}));
}

TEST(Nifti, SingleZeroVoxelFloat32)
{
    const Volume v = Volume::filled({1, 1, 1}, 0.0);
    const auto back = nifti::parse(nifti::serialize(v, {nifti::Datatype::Float32}));
    ASSERT_EQ(back.size(), 1U);
    EXPECT_EQ(back[0], 0.0);
}

TEST(Nifti, SlopeAndInterceptApplied)
{
    auto bytes = nifti::serialize(Volume::filled({1, 1, 1}, 3.0), {nifti::Datatype::Int16});
    poke(bytes, 112, 2.0F);
    poke(bytes, 116, 1.0F);
    std::int16_t raw = 0;
    std::memcpy(&raw, bytes.data() + 352, 2);
    ASSERT_EQ(raw, 3);
    EXPECT_EQ(nifti::parse(bytes)[0], 7.0);
}

TEST(Nifti, RoundTripAcrossDatatypesAndEndianness)
{
    std::vector<double> data;
    for (int i = 0; i < 24; ++i) {
        data.push_back(i * 3 - 20);
    }
    const Volume v({2, 3, 4}, {0.5, 1.0, 2.0}, data);
    for (auto dt : {nifti::Datatype::Int16, nifti::Datatype::Int32, nifti::Datatype::Float32, nifti::Datatype::Float64}) {
        for (auto e : {nifti::Endian::Little, nifti::Endian::Big}) {
            for (bool gz : {false, true}) {
                const auto back = nifti::parse(nifti::serialize(v, {dt, e, gz}));
                EXPECT_EQ(back.dims(), v.dims());
                EXPECT_EQ(back.spacing(), v.spacing());
                EXPECT_TRUE(std::equal(back.data().begin(), back.data().end(), v.data().begin()));
            }
        }
    }
}

TEST(Nifti, FileRoundTripGzip)
{
    const auto path = std::filesystem::temp_directory_path() / "gliofuse_nifti_test.nii.gz";
    const Volume v({3, 2, 1}, {}, {0, 1, 2, 3, 4, 5});
    nifti::write_file(path, v);
    EXPECT_EQ(nifti::read_file(path), v);
    std::filesystem::remove(path);
}

TEST(Nifti, MalformedInputsRaiseTypedErrors)
{
    const auto good = nifti::serialize(Volume::filled({2, 2, 2}, 1.0));
    EXPECT_EQ(code_of([&] { nifti::parse(std::span(good).first(100)); }), ErrorCode::TruncatedFile);
    EXPECT_EQ(code_of([&] { nifti::parse(std::span(good).first(good.size() - 1)); }), ErrorCode::TruncatedFile);
    auto bad = good;
    bad[344] = 'x';
    EXPECT_EQ(code_of([&] { nifti::parse(bad); }), ErrorCode::BadMagic);
    bad = good;
    poke(bad, 70, std::int16_t{128});
    EXPECT_EQ(code_of([&] { nifti::parse(bad); }), ErrorCode::UnsupportedDatatype);
    EXPECT_EQ(code_of([] { nifti::read_file("/nonexistent/x.nii"); }), ErrorCode::MissingInput);
}

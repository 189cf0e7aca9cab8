#pragma once

// NIfTI-1 reader and minimal writer. Only the fields needed to recover the voxel grid
// are honoured; qform/sform orientation is ignored.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "gliofuse/error.hpp"
#include "gliofuse/volume.hpp"

namespace gliofuse::nifti {

inline constexpr std::size_t kHeaderSize = 348;
inline constexpr std::size_t kSingleFileOffset = 352;

enum class Endian { Little, Big };

enum class Datatype : std::int16_t {
    UInt8 = 2,
    Int16 = 4,
    Int32 = 8,
    Float32 = 16,
    Float64 = 64,
    UInt16 = 512,
};

struct Header {
    std::array<char, 4> magic{};
    std::array<std::int16_t, 8> dim{};
    Datatype datatype = Datatype::Float64;
    std::int16_t bitpix = 64;
    std::array<float, 8> pixdim{};
    float vox_offset = 0.0F;
    float scl_slope = 0.0F;
    float scl_inter = 0.0F;
    Endian endian = Endian::Little;

    [[nodiscard]] bool single_file() const noexcept { return magic[1] == '+'; }
};

namespace detail {

inline std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> in)
{
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK) {
        throw Error(ErrorCode::IoError, "inflateInit2 failed");
    }
    std::vector<std::uint8_t> out;
    std::array<std::uint8_t, 1 << 16> chunk{};
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = chunk.data();
        zs.avail_out = static_cast<uInt>(chunk.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw Error(ErrorCode::TruncatedFile, "gzip stream is corrupt or truncated");
        }
        out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw Error(ErrorCode::TruncatedFile, "gzip stream ended early");
        }
    }
    inflateEnd(&zs);
    return out;
}

inline std::vector<std::uint8_t> gzip(std::span<const std::uint8_t> in)
{
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error(ErrorCode::IoError, "deflateInit2 failed");
    }
    std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(in.size())));
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) {
        throw Error(ErrorCode::IoError, "deflate failed");
    }
    out.resize(zs.total_out);
    return out;
}

inline bool is_gzip(std::span<const std::uint8_t> bytes) noexcept
{
    return bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B;
}

template <typename T>
T load(std::span<const std::uint8_t> bytes, std::size_t offset, Endian endian)
{
    std::array<std::uint8_t, sizeof(T)> raw{};
    std::memcpy(raw.data(), bytes.data() + offset, sizeof(T));
    const bool host_little = std::endian::native == std::endian::little;
    if ((endian == Endian::Little) != host_little) {
        std::reverse(raw.begin(), raw.end());
    }
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
}

template <typename T>
void store(std::vector<std::uint8_t>& bytes, std::size_t offset, T value, Endian endian)
{
    std::array<std::uint8_t, sizeof(T)> raw{};
    std::memcpy(raw.data(), &value, sizeof(T));
    const bool host_little = std::endian::native == std::endian::little;
    if ((endian == Endian::Little) != host_little) {
        std::reverse(raw.begin(), raw.end());
    }
    std::memcpy(bytes.data() + offset, raw.data(), sizeof(T));
}

inline std::size_t datatype_size(Datatype dt)
{
    switch (dt) {
    case Datatype::UInt8: return 1;
    case Datatype::Int16:
    case Datatype::UInt16: return 2;
    case Datatype::Int32:
    case Datatype::Float32: return 4;
    case Datatype::Float64: return 8;
    }
    throw Error(ErrorCode::UnsupportedDatatype, "datatype code " + std::to_string(static_cast<int>(dt)));
}

inline bool supported(std::int16_t code) noexcept
{
    switch (code) {
    case 2: case 4: case 8: case 16: case 64: case 512: return true;
    default: return false;
    }
}

} // namespace detail

/// Parses the 348-byte header. Byte order is taken from whichever interpretation of
/// sizeof_hdr yields 348.
inline Header parse_header(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kHeaderSize) {
        throw Error(ErrorCode::TruncatedFile, "header needs 348 bytes, got " + std::to_string(bytes.size()));
    }
    Header h;
    if (detail::load<std::int32_t>(bytes, 0, Endian::Little) == 348) {
        h.endian = Endian::Little;
    } else if (detail::load<std::int32_t>(bytes, 0, Endian::Big) == 348) {
        h.endian = Endian::Big;
    } else {
        throw Error(ErrorCode::BadHeader, "sizeof_hdr is not 348 in either byte order");
    }
    std::memcpy(h.magic.data(), bytes.data() + 344, 4);
    const bool single = std::memcmp(h.magic.data(), "n+1\0", 4) == 0;
    const bool pair = std::memcmp(h.magic.data(), "ni1\0", 4) == 0;
    if (!single && !pair) {
        throw Error(ErrorCode::BadMagic, "magic is neither n+1 nor ni1");
    }
    for (std::size_t i = 0; i < 8; ++i) {
        h.dim[i] = detail::load<std::int16_t>(bytes, 40 + 2 * i, h.endian);
        h.pixdim[i] = detail::load<float>(bytes, 76 + 4 * i, h.endian);
    }
    if (h.dim[0] < 1 || h.dim[0] > 7) {
        throw Error(ErrorCode::BadHeader, "dim[0] = " + std::to_string(h.dim[0]) + " outside [1, 7]");
    }
    const auto code = detail::load<std::int16_t>(bytes, 70, h.endian);
    if (!detail::supported(code)) {
        throw Error(ErrorCode::UnsupportedDatatype, "datatype code " + std::to_string(code));
    }
    h.datatype = static_cast<Datatype>(code);
    h.bitpix = detail::load<std::int16_t>(bytes, 72, h.endian);
    h.vox_offset = detail::load<float>(bytes, 108, h.endian);
    h.scl_slope = detail::load<float>(bytes, 112, h.endian);
    h.scl_inter = detail::load<float>(bytes, 116, h.endian);
    return h;
}

/// Grid dims after squeezing trailing singleton axes; more than three real axes is an error.
inline Dims grid_dims(const Header& h)
{
    int ndim = h.dim[0];
    while (ndim > 3 && h.dim[static_cast<std::size_t>(ndim)] == 1) {
        --ndim;
    }
    if (ndim > 3) {
        throw Error(ErrorCode::DimOverflow, std::to_string(ndim) + "-D image, only 3-D supported");
    }
    std::array<std::size_t, 3> n{1, 1, 1};
    for (int i = 1; i <= ndim; ++i) {
        const auto d = h.dim[static_cast<std::size_t>(i)];
        if (d < 1) {
            throw Error(ErrorCode::BadHeader, "dim[" + std::to_string(i) + "] = " + std::to_string(d));
        }
        n[static_cast<std::size_t>(i - 1)] = static_cast<std::size_t>(d);
    }
    return {n[0], n[1], n[2]};
}

/// Decodes voxel payload `data` described by header `h`.
inline Volume decode_payload(const Header& h, std::span<const std::uint8_t> data, bool is_label = false)
{
    const Dims dims = grid_dims(h);
    const std::size_t width = detail::datatype_size(h.datatype);
    const std::size_t need = dims.count() * width;
    if (data.size() < need) {
        throw Error(ErrorCode::TruncatedFile,
                    "payload has " + std::to_string(data.size()) + " bytes, need " + std::to_string(need));
    }
    const bool scaled = h.scl_slope != 0.0F && std::isfinite(h.scl_slope) && std::isfinite(h.scl_inter);
    const double slope = scaled ? static_cast<double>(h.scl_slope) : 1.0;
    const double inter = scaled ? static_cast<double>(h.scl_inter) : 0.0;

    std::vector<double> values(dims.count());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t off = i * width;
        double raw = 0.0;
        switch (h.datatype) {
        case Datatype::UInt8: raw = data[off]; break;
        case Datatype::Int16: raw = detail::load<std::int16_t>(data, off, h.endian); break;
        case Datatype::UInt16: raw = detail::load<std::uint16_t>(data, off, h.endian); break;
        case Datatype::Int32: raw = detail::load<std::int32_t>(data, off, h.endian); break;
        case Datatype::Float32: raw = detail::load<float>(data, off, h.endian); break;
        case Datatype::Float64: raw = detail::load<double>(data, off, h.endian); break;
        }
        values[i] = scaled ? slope * raw + inter : raw;
    }
    auto spacing_of = [&](std::size_t axis) {
        const double s = std::fabs(static_cast<double>(h.pixdim[axis]));
        return s > 0.0 && std::isfinite(s) ? s : 1.0;
    };
    return Volume(dims, Spacing{spacing_of(1), spacing_of(2), spacing_of(3)}, std::move(values), is_label);
}

/// Parses a single-file NIfTI-1 image (".nii"), optionally gzip-wrapped.
inline Volume parse(std::span<const std::uint8_t> bytes, bool is_label = false)
{
    std::vector<std::uint8_t> inflated;
    if (detail::is_gzip(bytes)) {
        inflated = detail::gunzip(bytes);
        bytes = inflated;
    }
    if (bytes.size() < kSingleFileOffset) {
        throw Error(ErrorCode::TruncatedFile, "file needs at least 352 bytes, got " + std::to_string(bytes.size()));
    }
    const Header h = parse_header(bytes);
    if (!h.single_file()) {
        throw Error(ErrorCode::BadMagic, "ni1 header describes a .hdr/.img pair; use parse_pair");
    }
    const auto offset = static_cast<std::size_t>(h.vox_offset);
    if (offset < kHeaderSize || offset > bytes.size()) {
        throw Error(ErrorCode::TruncatedFile, "vox_offset " + std::to_string(offset) + " outside file");
    }
    return decode_payload(h, bytes.subspan(offset), is_label);
}

/// Parses a two-file image: `.hdr` bytes with magic "ni1" and the `.img` payload.
inline Volume parse_pair(std::span<const std::uint8_t> hdr, std::span<const std::uint8_t> img, bool is_label = false)
{
    std::vector<std::uint8_t> hdr_buf;
    std::vector<std::uint8_t> img_buf;
    if (detail::is_gzip(hdr)) {
        hdr_buf = detail::gunzip(hdr);
        hdr = hdr_buf;
    }
    if (detail::is_gzip(img)) {
        img_buf = detail::gunzip(img);
        img = img_buf;
    }
    const Header h = parse_header(hdr);
    const auto offset = static_cast<std::size_t>(h.vox_offset);
    if (offset > img.size()) {
        throw Error(ErrorCode::TruncatedFile, "vox_offset beyond image file");
    }
    return decode_payload(h, img.subspan(offset), is_label);
}

struct WriteOptions {
    Datatype datatype = Datatype::Float64;
    Endian endian = Endian::Little;
    bool gzip = false;
};

/// Serializes a volume as single-file NIfTI-1. Integer datatypes round to nearest.
inline std::vector<std::uint8_t> serialize(const Volume& v, const WriteOptions& opt = {})
{
    const std::size_t width = detail::datatype_size(opt.datatype);
    std::vector<std::uint8_t> out(kSingleFileOffset + v.size() * width, 0);
    detail::store<std::int32_t>(out, 0, 348, opt.endian);
    const Dims d = v.dims();
    const std::array<std::size_t, 3> n{d.nx, d.ny, d.nz};
    detail::store<std::int16_t>(out, 40, 3, opt.endian);
    for (std::size_t i = 0; i < 3; ++i) {
        if (n[i] > 32767) {
            throw Error(ErrorCode::DimOverflow, "axis length exceeds int16");
        }
        detail::store<std::int16_t>(out, 42 + 2 * i, static_cast<std::int16_t>(n[i]), opt.endian);
    }
    for (std::size_t i = 3; i < 7; ++i) {
        detail::store<std::int16_t>(out, 42 + 2 * i, 1, opt.endian);
    }
    detail::store<std::int16_t>(out, 70, static_cast<std::int16_t>(opt.datatype), opt.endian);
    detail::store<std::int16_t>(out, 72, static_cast<std::int16_t>(width * 8), opt.endian);
    detail::store<float>(out, 76, 1.0F, opt.endian);
    detail::store<float>(out, 80, static_cast<float>(v.spacing().sx), opt.endian);
    detail::store<float>(out, 84, static_cast<float>(v.spacing().sy), opt.endian);
    detail::store<float>(out, 88, static_cast<float>(v.spacing().sz), opt.endian);
    detail::store<float>(out, 108, static_cast<float>(kSingleFileOffset), opt.endian);
    detail::store<float>(out, 112, 0.0F, opt.endian);
    detail::store<float>(out, 116, 0.0F, opt.endian);
    std::memcpy(out.data() + 344, "n+1\0", 4);

    const auto values = v.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t off = kSingleFileOffset + i * width;
        const double x = values[i];
        switch (opt.datatype) {
        case Datatype::UInt8: out[off] = static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L)); break;
        case Datatype::Int16:
            detail::store<std::int16_t>(out, off, static_cast<std::int16_t>(std::clamp(std::lround(x), -32768L, 32767L)), opt.endian);
            break;
        case Datatype::UInt16:
            detail::store<std::uint16_t>(out, off, static_cast<std::uint16_t>(std::clamp(std::lround(x), 0L, 65535L)), opt.endian);
            break;
        case Datatype::Int32: detail::store<std::int32_t>(out, off, static_cast<std::int32_t>(std::lround(x)), opt.endian); break;
        case Datatype::Float32: detail::store<float>(out, off, static_cast<float>(x), opt.endian); break;
        case Datatype::Float64: detail::store<double>(out, off, x, opt.endian); break;
        }
    }
    return opt.gzip ? detail::gzip(out) : out;
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MissingInput, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

/// Loads `.nii`, `.nii.gz`, or a `.hdr` whose payload sits next to it as `.img`.
inline Volume read_file(const std::filesystem::path& path, bool is_label = false)
{
    const auto bytes = read_bytes(path);
    if (path.extension() == ".hdr") {
        auto img = path;
        img.replace_extension(".img");
        const auto payload = read_bytes(img);
        return parse_pair(bytes, payload, is_label);
    }
    return parse(bytes, is_label);
}

inline void write_file(const std::filesystem::path& path, const Volume& v, WriteOptions opt = {})
{
    const auto name = path.filename().string();
    opt.gzip = name.size() > 3 && name.ends_with(".gz");
    write_bytes(path, serialize(v, opt));
}

} // namespace gliofuse::nifti

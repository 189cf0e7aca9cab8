#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "gliofuse/nifti.hpp"

namespace gliofuse {

/// 64-bit FNV-1a, used for content-addressed stage caching.
class Fnv1a {
public:
    void update(std::span<const std::uint8_t> bytes) noexcept
    {
        for (auto b : bytes) {
            h_ ^= b;
            h_ *= 0x100000001B3ULL;
        }
    }

    void update(std::string_view s) noexcept
    {
        update(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    }

    [[nodiscard]] std::uint64_t value() const noexcept { return h_; }

    [[nodiscard]] std::string hex() const
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

inline std::string hash_hex(std::string_view s)
{
    Fnv1a h;
    h.update(s);
    return h.hex();
}

inline std::string hash_file(const std::filesystem::path& p)
{
    Fnv1a h;
    h.update(nifti::read_bytes(p));
    return h.hex();
}

} // namespace gliofuse

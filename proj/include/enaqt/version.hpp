#pragma once

#include <cstdint>
#include <string_view>

namespace enaqt {

inline constexpr std::string_view version = "1.0.0";

/// 64-bit FNV-1a; used for content hashes in run metadata.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace enaqt

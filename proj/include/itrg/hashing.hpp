#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace itrg {

/// 64-bit FNV-1a over raw bytes. Used for embedding buckets, prompt digests
/// in error messages, and the echo mock. Stable across platforms.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

/// Short digest used to reference a prompt without reproducing it.
inline std::string prompt_digest(std::string_view prompt) {
    return hex64(fnv1a64(prompt));
}

} // namespace itrg

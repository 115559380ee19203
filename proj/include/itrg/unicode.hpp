#pragma once

#include <algorithm>
#include <iterator>
#include <string>
#include <string_view>

#include "itrg/unicode_tables.hpp"

namespace itrg::detail {

template <size_t N>
inline bool in_ranges(const std::pair<char32_t, char32_t> (&ranges)[N], char32_t cp) {
    auto it = std::upper_bound(std::begin(ranges), std::end(ranges), cp,
                               [](char32_t v, const auto& r) { return v < r.first; });
    return it != std::begin(ranges) && cp <= std::prev(it)->second;
}

inline bool is_punct(char32_t cp) { return in_ranges(kPunctRanges, cp); }
inline bool is_space(char32_t cp) { return in_ranges(kSpaceRanges, cp); }

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

/// Decodes the code point starting at s[i] and advances i. An invalid byte is
/// consumed alone and reported as its own value, which keeps normalization
/// total (and idempotent) on arbitrary byte strings.
inline char32_t next_code_point(std::string_view s, size_t& i) {
    const auto byte = [&](size_t j) { return static_cast<unsigned char>(s[j]); };
    unsigned char b0 = byte(i);
    size_t len;
    char32_t cp;
    if (b0 < 0x80) {
        len = 1;
        cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return b0;
    }
    if (i + len > s.size()) {
        ++i;
        return b0;
    }
    for (size_t j = 1; j < len; ++j) {
        unsigned char bj = byte(i + j);
        if ((bj & 0xC0) != 0x80) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (bj & 0x3F);
    }
    // Reject overlong forms and out-of-range values the same way.
    static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return b0;
    }
    i += len;
    return cp;
}

/// Simple (non-contextual) lowercase. U+0130 is the single multi-code-point
/// mapping in the table's Unicode version.
inline void to_lower_append(std::string& out, char32_t cp) {
    if (cp == 0x130) {
        append_utf8(out, 0x69);
        append_utf8(out, 0x307);
        return;
    }
    auto it = std::lower_bound(std::begin(kLowerMap), std::end(kLowerMap), cp,
                               [](const auto& e, char32_t v) { return e.first < v; });
    if (it != std::end(kLowerMap) && it->first == cp) {
        append_utf8(out, it->second);
    } else {
        append_utf8(out, cp);
    }
}

} // namespace itrg::detail

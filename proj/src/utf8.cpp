/*
   Copyright 2026 The chaincarve Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "chaincarve/utf8.hpp"

namespace chaincarve {

namespace {

inline bool is_continuation(std::uint8_t b) {
    return (b & 0xC0) == 0x80;
}

}  // namespace

std::optional<DecodedScalar> decode_scalar(std::span<const std::uint8_t> data) {
    if (data.empty()) return std::nullopt;
    const std::uint8_t b0 = data[0];

    if (b0 <= 0x7F) {
        return DecodedScalar{b0, 1};
    }
    // Leads C0/C1 would only encode overlong two-byte forms.
    if (b0 >= 0xC2 && b0 <= 0xDF) {
        if (data.size() < 2 || !is_continuation(data[1])) return std::nullopt;
        const char32_t cp = (char32_t(b0 & 0x1F) << 6) | (data[1] & 0x3F);
        return DecodedScalar{cp, 2};
    }
    if (b0 >= 0xE0 && b0 <= 0xEF) {
        if (data.size() < 3 || !is_continuation(data[1]) || !is_continuation(data[2])) {
            return std::nullopt;
        }
        const char32_t cp =
            (char32_t(b0 & 0x0F) << 12) | (char32_t(data[1] & 0x3F) << 6) | (data[2] & 0x3F);
        if (cp < 0x800) return std::nullopt;                  // overlong
        if (cp >= 0xD800 && cp <= 0xDFFF) return std::nullopt;  // surrogate
        return DecodedScalar{cp, 3};
    }
    if (b0 >= 0xF0 && b0 <= 0xF4) {
        if (data.size() < 4 || !is_continuation(data[1]) || !is_continuation(data[2]) ||
            !is_continuation(data[3])) {
            return std::nullopt;
        }
        const char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(data[1] & 0x3F) << 12) |
                            (char32_t(data[2] & 0x3F) << 6) | (data[3] & 0x3F);
        if (cp < 0x10000) return std::nullopt;   // overlong
        if (cp > 0x10FFFF) return std::nullopt;  // beyond Unicode
        return DecodedScalar{cp, 4};
    }
    // 0x80..0xC1 (stray continuation / overlong lead) and 0xF5..0xFF.
    return std::nullopt;
}

std::vector<std::uint8_t> utf8_filter(std::span<const std::uint8_t> in) {
    std::vector<std::uint8_t> out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (auto sc = decode_scalar(in.subspan(i))) {
            out.insert(out.end(), in.begin() + static_cast<std::ptrdiff_t>(i),
                       in.begin() + static_cast<std::ptrdiff_t>(i + sc->size));
            i += sc->size;
        } else {
            ++i;  // drop a single byte and resynchronize
        }
    }
    return out;
}

BytePayload utf8_filter(const BytePayload& in) {
    return BytePayload{utf8_filter(std::span<const std::uint8_t>(in.bytes)), in.origin_tx};
}

std::string utf8_filter_to_string(std::span<const std::uint8_t> in) {
    auto bytes = utf8_filter(in);
    return std::string(bytes.begin(), bytes.end());
}

bool is_valid_utf8(std::string_view s) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
    std::size_t i = 0;
    while (i < s.size()) {
        auto sc = decode_scalar(std::span<const std::uint8_t>(p + i, s.size() - i));
        if (!sc) return false;
        i += sc->size;
    }
    return true;
}

std::size_t scalar_count(std::string_view s) {
    std::size_t n = 0;
    for_each_scalar(s, [&](char32_t) {
        ++n;
        return true;
    });
    return n;
}

}  // namespace chaincarve

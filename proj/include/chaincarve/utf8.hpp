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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chaincarve/hex.hpp"

namespace chaincarve {

struct DecodedScalar {
    char32_t cp;
    unsigned size;  // bytes consumed, 1..4
};

/// Strict scalar decode at the front of `data`: overlong forms, the surrogate
/// range U+D800-U+DFFF and anything above U+10FFFF are rejected. nullopt when
/// no well-formed scalar starts at data[0].
std::optional<DecodedScalar> decode_scalar(std::span<const std::uint8_t> data);

/// Gibberish filter: left-to-right greedy scan keeping every maximal run of
/// well-formed scalars. On success the scalar is kept whole and the scan
/// advances past it; on failure exactly one byte is dropped. The result is
/// always well-formed UTF-8 and the filter is idempotent.
std::vector<std::uint8_t> utf8_filter(std::span<const std::uint8_t> in);

/// Payload-level filter; origin_tx carries over.
BytePayload utf8_filter(const BytePayload& in);

/// Convenience overload returning a string.
std::string utf8_filter_to_string(std::span<const std::uint8_t> in);

bool is_valid_utf8(std::string_view s);

/// Number of scalars in a valid UTF-8 string.
std::size_t scalar_count(std::string_view s);

/// CJK Unified Ideographs block.
constexpr bool is_cjk(char32_t cp) {
    return cp >= 0x4E00 && cp <= 0x9FFF;
}

/// Calls fn(char32_t) for each scalar of a valid UTF-8 string; stops early when
/// fn returns false. Returns false if the string is not valid UTF-8.
template <typename Fn>
bool for_each_scalar(std::string_view s, Fn&& fn) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
    std::size_t i = 0;
    while (i < s.size()) {
        auto sc = decode_scalar(std::span<const std::uint8_t>(p + i, s.size() - i));
        if (!sc) return false;
        if (!fn(sc->cp)) return true;
        i += sc->size;
    }
    return true;
}

}  // namespace chaincarve

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

// Test-side oracle for the gibberish filter. Deliberately independent of the
// library implementation: instead of decoding code points and checking their
// value, it matches the well-formed byte-range rows of the Unicode standard's
// "Well-Formed UTF-8 Byte Sequences" table directly.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace oracle {

// Length (1..4) of the well-formed sequence starting at p, or 0.
//
//   U+0000..U+007F     00..7F
//   U+0080..U+07FF     C2..DF 80..BF
//   U+0800..U+0FFF     E0     A0..BF 80..BF
//   U+1000..U+CFFF     E1..EC 80..BF 80..BF
//   U+D000..U+D7FF     ED     80..9F 80..BF
//   U+E000..U+FFFF     EE..EF 80..BF 80..BF
//   U+10000..U+3FFFF   F0     90..BF 80..BF 80..BF
//   U+40000..U+FFFFF   F1..F3 80..BF 80..BF 80..BF
//   U+100000..U+10FFFF F4     80..8F 80..BF 80..BF
inline std::size_t well_formed_length(const std::uint8_t* p, std::size_t n) {
    if (n == 0) return 0;
    const std::uint8_t b0 = p[0];
    const auto in = [](std::uint8_t b, std::uint8_t lo, std::uint8_t hi) {
        return b >= lo && b <= hi;
    };
    if (b0 <= 0x7F) return 1;
    if (n >= 2 && in(b0, 0xC2, 0xDF) && in(p[1], 0x80, 0xBF)) return 2;
    if (n >= 3) {
        if (b0 == 0xE0 && in(p[1], 0xA0, 0xBF) && in(p[2], 0x80, 0xBF)) return 3;
        if (in(b0, 0xE1, 0xEC) && in(p[1], 0x80, 0xBF) && in(p[2], 0x80, 0xBF)) return 3;
        if (b0 == 0xED && in(p[1], 0x80, 0x9F) && in(p[2], 0x80, 0xBF)) return 3;
        if (in(b0, 0xEE, 0xEF) && in(p[1], 0x80, 0xBF) && in(p[2], 0x80, 0xBF)) return 3;
    }
    if (n >= 4) {
        if (b0 == 0xF0 && in(p[1], 0x90, 0xBF) && in(p[2], 0x80, 0xBF) && in(p[3], 0x80, 0xBF)) {
            return 4;
        }
        if (in(b0, 0xF1, 0xF3) && in(p[1], 0x80, 0xBF) && in(p[2], 0x80, 0xBF) &&
            in(p[3], 0x80, 0xBF)) {
            return 4;
        }
        if (b0 == 0xF4 && in(p[1], 0x80, 0x8F) && in(p[2], 0x80, 0xBF) && in(p[3], 0x80, 0xBF)) {
            return 4;
        }
    }
    return 0;
}

// Greedy maximal-valid-scalar filter: keep a well-formed sequence whole,
// otherwise drop one byte and continue.
inline std::vector<std::uint8_t> greedy_filter(std::span<const std::uint8_t> in) {
    std::vector<std::uint8_t> out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        const std::size_t len = well_formed_length(in.data() + i, in.size() - i);
        if (len == 0) {
            ++i;
        } else {
            out.insert(out.end(), in.begin() + static_cast<std::ptrdiff_t>(i),
                       in.begin() + static_cast<std::ptrdiff_t>(i + len));
            i += len;
        }
    }
    return out;
}

inline bool valid(std::span<const std::uint8_t> in) {
    std::size_t i = 0;
    while (i < in.size()) {
        const std::size_t len = well_formed_length(in.data() + i, in.size() - i);
        if (len == 0) return false;
        i += len;
    }
    return true;
}

}  // namespace oracle

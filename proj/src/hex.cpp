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

#include "chaincarve/hex.hpp"

#include <array>

#include "chaincarve/errors.hpp"

namespace chaincarve {

namespace {

constexpr std::array<std::int8_t, 256> build_nibble_table() {
    std::array<std::int8_t, 256> t{};
    for (auto& v : t) v = -1;
    for (int c = '0'; c <= '9'; ++c) t[static_cast<std::size_t>(c)] = static_cast<std::int8_t>(c - '0');
    for (int c = 'a'; c <= 'f'; ++c) t[static_cast<std::size_t>(c)] = static_cast<std::int8_t>(c - 'a' + 10);
    for (int c = 'A'; c <= 'F'; ++c) t[static_cast<std::size_t>(c)] = static_cast<std::int8_t>(c - 'A' + 10);
    return t;
}

constexpr auto kNibble = build_nibble_table();
constexpr char kHexDigits[] = "0123456789abcdef";

}  // namespace

std::string_view strip_hex_prefix(std::string_view s) {
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
    }
    return s;
}

std::vector<std::uint8_t> hex_decode(std::string_view s) {
    s = strip_hex_prefix(s);
    if (s.size() % 2 != 0) {
        throw OddLengthError{};
    }
    std::vector<std::uint8_t> out;
    out.reserve(s.size() / 2);
    for (std::size_t i = 0; i < s.size(); i += 2) {
        const std::int8_t hi = kNibble[static_cast<std::uint8_t>(s[i])];
        const std::int8_t lo = kNibble[static_cast<std::uint8_t>(s[i + 1])];
        if (hi < 0) throw NonHexCharacterError{i};
        if (lo < 0) throw NonHexCharacterError{i + 1};
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string hex_encode(std::span<const std::uint8_t> bytes, bool with_prefix) {
    std::string out;
    out.reserve(bytes.size() * 2 + (with_prefix ? 2 : 0));
    if (with_prefix) out += "0x";
    for (std::uint8_t b : bytes) {
        out += kHexDigits[b >> 4];
        out += kHexDigits[b & 0x0f];
    }
    return out;
}

}  // namespace chaincarve

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

#include <doctest.h>

#include <string>
#include <vector>

#include "chaincarve/errors.hpp"
#include "chaincarve/hex.hpp"
#include "chaincarve/utf8.hpp"
#include "support/fixtures.hpp"
#include "support/utf8_oracle.hpp"

using namespace chaincarve;

namespace {

std::vector<std::uint8_t> bytes(std::initializer_list<int> values) {
    std::vector<std::uint8_t> out;
    for (int v : values) out.push_back(static_cast<std::uint8_t>(v));
    return out;
}

}  // namespace

TEST_CASE("hex_decode basics") {
    CHECK(hex_decode("0x48656c6c6f") == bytes({0x48, 0x65, 0x6c, 0x6c, 0x6f}));
    CHECK(hex_decode("48656C6C6F") == bytes({0x48, 0x65, 0x6c, 0x6c, 0x6f}));  // case-insensitive
    CHECK(hex_decode("0x").empty());
    CHECK(hex_decode("").empty());
    CHECK_THROWS_AS(hex_decode("0xABC"), OddLengthError);
    CHECK_THROWS_AS(hex_decode("0xZZ"), NonHexCharacterError);
    try {
        hex_decode("0x41g1");
    } catch (const NonHexCharacterError& e) {
        CHECK(e.offset() == 2);
    }
}

TEST_CASE("hex round-trip") {
    fixtures::Rng rng(101);
    for (int i = 0; i < 200; ++i) {
        const auto data = fixtures::random_bytes(rng, rng.below(300));
        CHECK(hex_decode(hex_encode(data)) == data);
        CHECK(hex_decode(hex_encode(data, false)) == data);
    }
}

TEST_CASE("utf8_filter keeps ASCII unchanged") {
    const std::string ascii = "Hello world, have a nice day";
    const std::vector<std::uint8_t> in(ascii.begin(), ascii.end());
    CHECK(utf8_filter(in) == in);
}

TEST_CASE("utf8_filter drops lone invalid bytes") {
    CHECK(utf8_filter(bytes({0x48, 0xFF, 0x69})) == bytes({0x48, 0x69}));  // "Hi"
}

TEST_CASE("utf8_filter rejects overlongs and surrogates") {
    CHECK(utf8_filter(bytes({0xC0, 0xAF})).empty());        // overlong '/'
    CHECK(utf8_filter(bytes({0xED, 0xA0, 0x80})).empty());  // U+D800
    CHECK(utf8_filter(bytes({0xF4, 0x90, 0x80, 0x80})).empty());  // beyond U+10FFFF
    // boundary scalars survive
    CHECK(utf8_filter(bytes({0xF4, 0x8F, 0xBF, 0xBF})) == bytes({0xF4, 0x8F, 0xBF, 0xBF}));
    CHECK(utf8_filter(bytes({0xED, 0x9F, 0xBF})) == bytes({0xED, 0x9F, 0xBF}));  // U+D7FF
    CHECK(utf8_filter(bytes({0xEE, 0x80, 0x80})) == bytes({0xEE, 0x80, 0x80}));  // U+E000
}

TEST_CASE("utf8_filter truncated sequence at end") {
    CHECK(utf8_filter(bytes({0x41, 0xE4, 0xB8})) == bytes({0x41}));
}

TEST_CASE("utf8_filter matches the table-driven oracle on random inputs") {
    fixtures::Rng rng(7);
    for (int i = 0; i < 20000; ++i) {
        const auto data = fixtures::random_bytes(rng, rng.below(257));
        const auto filtered = utf8_filter(data);
        REQUIRE(filtered == oracle::greedy_filter(data));
        REQUIRE(oracle::valid(filtered));
        REQUIRE(utf8_filter(filtered) == filtered);  // idempotent
    }
}

TEST_CASE("utf8_filter is identity on well-formed input") {
    // mixed-width scalars biased toward valid sequences
    fixtures::Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const std::size_t n = rng.below(40);
        for (std::size_t k = 0; k < n; ++k) {
            switch (rng.below(4)) {
                case 0: s += static_cast<char>('a' + rng.below(26)); break;
                case 1: s += "é"; break;       // 2-byte
                case 2: s += "中"; break;       // 3-byte CJK
                default: s += "\U0001F600"; break;  // 4-byte
            }
        }
        const std::vector<std::uint8_t> in(s.begin(), s.end());
        CHECK(utf8_filter(in) == in);
        CHECK(is_valid_utf8(s));
    }
}

TEST_CASE("decode_scalar classifies CJK range") {
    const std::string zhong = "中";
    auto sc = decode_scalar(
        std::span(reinterpret_cast<const std::uint8_t*>(zhong.data()), zhong.size()));
    REQUIRE(sc.has_value());
    CHECK(sc->cp == 0x4E2D);
    CHECK(is_cjk(sc->cp));
    CHECK(!is_cjk(U'a'));
    CHECK(is_cjk(0x4E00));
    CHECK(is_cjk(0x9FFF));
    CHECK(!is_cjk(0x4DFF));
    CHECK(!is_cjk(0xA000));
}

TEST_CASE("scalar_count counts scalars, not bytes") {
    CHECK(scalar_count("abc") == 3);
    CHECK(scalar_count("中文") == 2);
    CHECK(scalar_count("") == 0);
}

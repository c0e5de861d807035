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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chaincarve {

/// Decoded transaction payload together with the transaction it came from.
struct BytePayload {
    std::vector<std::uint8_t> bytes;
    std::string origin_tx;
};

/// Strip a leading "0x"/"0X" if present.
std::string_view strip_hex_prefix(std::string_view s);

/// Nibble-pair decode, case-insensitive, optional "0x" prefix. "" and "0x"
/// yield an empty vector. Throws OddLengthError / NonHexCharacterError; the
/// character offset refers to the string after prefix stripping.
std::vector<std::uint8_t> hex_decode(std::string_view s);

/// Lowercase hex, "0x"-prefixed by default.
std::string hex_encode(std::span<const std::uint8_t> bytes, bool with_prefix = true);

inline BytePayload decode_payload(std::string_view input_hex, std::string origin_tx = {}) {
    return BytePayload{hex_decode(input_hex), std::move(origin_tx)};
}

}  // namespace chaincarve

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
#include <string>
#include <string_view>
#include <vector>

namespace chaincarve {

/// Wei amounts overflow 64 bits (1 ETH = 1e18 wei), so values are carried as
/// unsigned 128-bit integers and serialized as "0x" hex quantities.
using Wei = unsigned __int128;

/// One transaction's embedding-relevant fields. Hex fields are stored
/// normalized: "0x" prefix, lowercase.
struct TxRecord {
    std::uint64_t block_number{0};
    std::uint32_t tx_index{0};
    std::string tx_hash;                  // 0x + 64 hex chars
    std::string from_addr;                // 0x + 40 hex chars
    std::optional<std::string> to_addr;   // absent => contract creation
    Wei value{0};
    std::string input_hex;                // 0x + even number of hex chars
    std::uint64_t block_timestamp{0};

    bool operator==(const TxRecord&) const = default;
    bool has_input() const { return input_hex.size() > 2; }
};

struct BlockRecord {
    std::uint64_t block_number{0};
    std::uint64_t timestamp{0};
    std::vector<TxRecord> txs;  // ordered by tx_index, contiguous from 0
};

/// Normalizes a hex field to "0x" + lowercase digits. When exact_digits is
/// non-zero the digit count must match; otherwise any even count is accepted.
/// Throws FormatError naming `field`.
std::string normalize_hex_field(std::string_view s, std::size_t exact_digits, std::string_view field);

/// Parses a JSON-RPC quantity ("0x0", "0x1a4", ...). Throws FormatError.
Wei wei_from_hex(std::string_view s);
std::uint64_t quantity_from_hex(std::string_view s);

/// Minimal quantity form: "0x0", "0x1a4", lowercase, no leading zeros.
std::string wei_to_hex(Wei v);
std::string wei_to_dec(Wei v);

/// Enforces the TxRecord field invariants; throws FormatError on violation.
void validate(const TxRecord& tx);

/// Enforces BlockRecord invariants (txs ordered by tx_index, contiguous
/// from 0) on top of per-tx validation.
void validate(const BlockRecord& block);

}  // namespace chaincarve

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

#include "chaincarve/tx_record.hpp"

#include <algorithm>
#include <cctype>

#include "chaincarve/errors.hpp"
#include "chaincarve/hex.hpp"

namespace chaincarve {

namespace {

int nibble_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string normalize_hex_field(std::string_view s, std::size_t exact_digits, std::string_view field) {
    const std::string_view digits = strip_hex_prefix(s);
    if (exact_digits != 0 && digits.size() != exact_digits) {
        throw FormatError(std::string(field) + ": expected " + std::to_string(exact_digits) +
                          " hex chars, got " + std::to_string(digits.size()));
    }
    if (exact_digits == 0 && digits.size() % 2 != 0) {
        throw FormatError(std::string(field) + ": odd hex length");
    }
    std::string out;
    out.reserve(digits.size() + 2);
    out += "0x";
    for (std::size_t i = 0; i < digits.size(); ++i) {
        const char c = digits[i];
        if (nibble_value(c) < 0) {
            throw FormatError(std::string(field) + ": non-hex character at offset " + std::to_string(i));
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

Wei wei_from_hex(std::string_view s) {
    const std::string_view digits = strip_hex_prefix(s);
    if (digits.empty()) throw FormatError("empty hex quantity");
    if (digits.size() > 32) throw FormatError("hex quantity wider than 128 bits");
    Wei v = 0;
    for (char c : digits) {
        const int n = nibble_value(c);
        if (n < 0) throw FormatError("non-hex character in quantity");
        v = (v << 4) | static_cast<unsigned>(n);
    }
    return v;
}

std::uint64_t quantity_from_hex(std::string_view s) {
    const Wei v = wei_from_hex(s);
    if (v > Wei(UINT64_MAX)) throw FormatError("quantity does not fit 64 bits");
    return static_cast<std::uint64_t>(v);
}

std::string wei_to_hex(Wei v) {
    if (v == 0) return "0x0";
    char buf[32];
    int i = 32;
    while (v != 0) {
        buf[--i] = "0123456789abcdef"[static_cast<unsigned>(v & 0xF)];
        v >>= 4;
    }
    return "0x" + std::string(buf + i, buf + 32);
}

std::string wei_to_dec(Wei v) {
    if (v == 0) return "0";
    std::string out;
    while (v != 0) {
        out += static_cast<char>('0' + static_cast<unsigned>(v % 10));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

namespace {

void check_normalized(const std::string& s, std::size_t exact_digits, std::string_view field) {
    if (s.size() < 2 || s[0] != '0' || s[1] != 'x') {
        throw FormatError(std::string(field) + ": missing 0x prefix");
    }
    const std::string_view digits(s.data() + 2, s.size() - 2);
    if (exact_digits != 0 && digits.size() != exact_digits) {
        throw FormatError(std::string(field) + ": expected " + std::to_string(exact_digits) +
                          " hex chars, got " + std::to_string(digits.size()));
    }
    if (exact_digits == 0 && digits.size() % 2 != 0) {
        throw FormatError(std::string(field) + ": odd hex length");
    }
    for (std::size_t i = 0; i < digits.size(); ++i) {
        const char c = digits[i];
        const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
        if (!ok) {
            throw FormatError(std::string(field) + ": expected lowercase hex, bad character at offset " +
                              std::to_string(i));
        }
    }
}

}  // namespace

void validate(const TxRecord& tx) {
    check_normalized(tx.tx_hash, 64, "tx_hash");
    check_normalized(tx.from_addr, 40, "from_addr");
    if (tx.to_addr) check_normalized(*tx.to_addr, 40, "to_addr");
    check_normalized(tx.input_hex, 0, "input_hex");
}

void validate(const BlockRecord& block) {
    for (std::size_t i = 0; i < block.txs.size(); ++i) {
        const TxRecord& tx = block.txs[i];
        validate(tx);
        if (tx.block_number != block.block_number) {
            throw FormatError("tx block_number mismatch at index " + std::to_string(i));
        }
        if (tx.tx_index != i) {
            throw FormatError("tx_index not contiguous: expected " + std::to_string(i) + ", got " +
                              std::to_string(tx.tx_index));
        }
    }
}

}  // namespace chaincarve

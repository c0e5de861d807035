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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chaincarve/tx_record.hpp"

namespace chaincarve {

enum class TextKind : std::uint8_t { chinese, english, email, link };

std::string_view to_string(TextKind kind);
std::optional<TextKind> text_kind_from_string(std::string_view s);

struct RestorePolicy {
    unsigned min_chars{8};
    double min_keep_ratio{0.25};
    unsigned chinese_char_threshold{2};
    bool dedupe{false};
    /// TLDs that make a dotted hostname token count as a link.
    std::vector<std::string> link_tlds{"com", "io", "app", "org", "net", "onion"};
};

struct RestoredText {
    std::string origin_tx;
    std::string text;  // well-formed UTF-8
    TextKind kind{TextKind::english};
    std::uint64_t char_count{0};  // Unicode scalars
    double keep_ratio{0.0};       // kept bytes / payload bytes
    std::uint64_t block_number{0};
    std::string from_addr;
    std::optional<std::string> to_addr;
};

enum class RejectReason : std::uint8_t { none, empty_input, too_short, low_keep_ratio, unclassifiable };

std::string_view to_string(RejectReason reason);

/// Kind classification with priority email > link > chinese > english.
/// nullopt means none of the four kinds fit (the caller counts and drops).
std::optional<TextKind> classify_kind(std::string_view text, const RestorePolicy& policy);

/// Decode + gibberish-filter + policy gates + kind classification. Returns
/// nothing when a gate rejects or the text is unclassifiable; `reason`, when
/// given, says which. Codec errors propagate.
std::optional<RestoredText> restore_text(std::string_view input_hex, const RestorePolicy& policy,
                                         RejectReason* reason = nullptr);

/// restore_text plus provenance fields copied from the record.
std::optional<RestoredText> restore_from_record(const TxRecord& tx, const RestorePolicy& policy,
                                                RejectReason* reason = nullptr);

/// Exact-duplicate folding keyed by a 64-bit content hash of the text.
class Deduper {
  public:
    explicit Deduper(bool enabled) : enabled_(enabled) {}

    /// True when the text should be emitted; duplicates beyond the first are
    /// folded into the per-content counts when folding is enabled.
    bool admit(const RestoredText& text);

    /// content hash -> number of occurrences seen (including the first).
    const std::unordered_map<std::uint64_t, std::uint64_t>& counts() const { return counts_; }
    std::uint64_t duplicates_folded() const { return folded_; }

  private:
    bool enabled_;
    std::unordered_map<std::uint64_t, std::uint64_t> counts_;
    std::uint64_t folded_{0};
};

// NDJSON export/import of restored texts: {tx, block, from, to, kind, text, keep_ratio}
std::string restored_text_to_json_line(const RestoredText& text);
RestoredText restored_text_from_json_line(std::string_view line, std::size_t line_number);
std::size_t write_texts(const std::vector<RestoredText>& texts, const std::filesystem::path& path);
std::vector<RestoredText> read_texts(const std::filesystem::path& path);

}  // namespace chaincarve

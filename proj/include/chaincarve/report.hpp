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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chaincarve/file_carve.hpp"
#include "chaincarve/text_restore.hpp"

namespace chaincarve {

struct ScanReport {
    /// keys: common_files, images, english, chinese, mail, link
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t blocks_scanned{0};
    std::uint64_t txs_scanned{0};
    std::map<std::string, std::uint64_t> skipped;

    std::uint64_t total_items() const;
};

/// images = carved png/jpg/gif; common_files = every other carved type;
/// texts count under their primary kind (email -> mail).
ScanReport category_counts(const std::vector<RestoredText>& texts,
                           const std::vector<std::string>& carved_types,
                           const SignatureRegistry& registry);

std::string scan_report_to_json(const ScanReport& report);

enum class BucketMode : std::uint8_t { quarter, per_million_blocks };

std::string_view to_string(BucketMode mode);

struct CountedItem {
    std::string category;
    std::uint64_t block_number{0};
    std::optional<std::uint64_t> timestamp;  // unix seconds, UTC
};

struct BucketRow {
    std::string key;  // "YYYY-Qn" or the million-block index
    std::string category;
    std::uint64_t count{0};
};

struct TemporalBuckets {
    BucketMode mode{BucketMode::per_million_blocks};
    std::vector<BucketRow> buckets;  // ascending by (bucket, category)
};

/// Quarter keys derive from the UTC timestamp; throws MissingTimestampError
/// when quarter mode meets an item without one.
TemporalBuckets temporal_buckets(const std::vector<CountedItem>& items, BucketMode mode);

std::string quarter_key(std::uint64_t unix_ts);

void write_buckets_csv(const TemporalBuckets& buckets, const std::filesystem::path& path);

/// Tokenizes (auto mode), drops stopwords, ranks by count descending then
/// token ascending, returns at most top_k entries.
std::vector<std::pair<std::string, std::uint64_t>> word_frequency(
    const std::vector<std::string>& texts, const std::set<std::string>& stopwords,
    std::size_t top_k);

void write_wordfreq_csv(const std::vector<std::pair<std::string, std::uint64_t>>& ranked,
                        const std::filesystem::path& path);

const std::set<std::string>& default_stopwords();
std::set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace chaincarve

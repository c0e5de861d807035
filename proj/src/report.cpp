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

#include "chaincarve/report.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "chaincarve/errors.hpp"
#include "chaincarve/record_io.hpp"
#include "chaincarve/sentiment.hpp"

namespace chaincarve {

using nlohmann::json;

namespace {

const char* kCountKeys[] = {"common_files", "images", "english", "chinese", "mail", "link"};

std::string text_count_key(TextKind kind) {
    switch (kind) {
        case TextKind::chinese: return "chinese";
        case TextKind::english: return "english";
        case TextKind::email: return "mail";
        case TextKind::link: return "link";
    }
    return "english";
}

}  // namespace

std::uint64_t ScanReport::total_items() const {
    std::uint64_t total = 0;
    for (const auto& [key, value] : counts) total += value;
    return total;
}

ScanReport category_counts(const std::vector<RestoredText>& texts,
                           const std::vector<std::string>& carved_types,
                           const SignatureRegistry& registry) {
    ScanReport report;
    for (const char* key : kCountKeys) report.counts[key] = 0;
    for (const auto& text : texts) report.counts[text_count_key(text.kind)]++;
    for (const auto& type : carved_types) {
        report.counts[registry.is_image_type(type) ? "images" : "common_files"]++;
    }
    return report;
}

std::string scan_report_to_json(const ScanReport& report) {
    json j;
    j["counts"] = report.counts;
    j["total_items"] = report.total_items();
    j["blocks_scanned"] = report.blocks_scanned;
    j["txs_scanned"] = report.txs_scanned;
    j["skipped"] = report.skipped;
    return j.dump(2);
}

std::string_view to_string(BucketMode mode) {
    return mode == BucketMode::quarter ? "quarter" : "per_million_blocks";
}

std::string quarter_key(std::uint64_t unix_ts) {
    const auto t = static_cast<std::time_t>(unix_ts);
    std::tm tm{};
    gmtime_r(&t, &tm);
    const int year = tm.tm_year + 1900;
    const int quarter = tm.tm_mon / 3 + 1;
    return std::to_string(year) + "-Q" + std::to_string(quarter);
}

TemporalBuckets temporal_buckets(const std::vector<CountedItem>& items, BucketMode mode) {
    TemporalBuckets out;
    out.mode = mode;
    // (sortable numeric key, display key, category) -> count
    std::map<std::pair<std::uint64_t, std::string>, std::uint64_t> counts;
    for (const auto& item : items) {
        std::uint64_t ordinal;
        std::string key;
        if (mode == BucketMode::per_million_blocks) {
            ordinal = item.block_number / 1'000'000;
            key = std::to_string(ordinal);
        } else {
            if (!item.timestamp) {
                throw MissingTimestampError("quarter bucketing needs block timestamps");
            }
            key = quarter_key(*item.timestamp);
            // year * 4 + quarter keeps quarters in calendar order
            ordinal = static_cast<std::uint64_t>((key[0] - '0') * 1000 + (key[1] - '0') * 100 +
                                                 (key[2] - '0') * 10 + (key[3] - '0')) *
                          4 +
                      static_cast<std::uint64_t>(key[6] - '0');
        }
        counts[{ordinal, key + "\x1f" + item.category}]++;
    }
    for (const auto& [key, count] : counts) {
        const auto sep = key.second.find('\x1f');
        out.buckets.push_back({key.second.substr(0, sep), key.second.substr(sep + 1), count});
    }
    return out;
}

void write_buckets_csv(const TemporalBuckets& buckets, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "bucket,category,count\n";
    for (const auto& row : buckets.buckets) {
        out << row.key << ',' << row.category << ',' << row.count << '\n';
    }
    out.close();
    if (out.fail()) throw IoError("write error on " + path.string());
}

std::vector<std::pair<std::string, std::uint64_t>> word_frequency(
    const std::vector<std::string>& texts, const std::set<std::string>& stopwords,
    std::size_t top_k) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& text : texts) {
        if (text.empty()) continue;
        for (auto& token : tokenize(text)) {
            if (stopwords.count(token)) continue;
            ++counts[token];
        }
    }
    std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    return ranked;
}

void write_wordfreq_csv(const std::vector<std::pair<std::string, std::uint64_t>>& ranked,
                        const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "token,count\n";
    for (const auto& [token, count] : ranked) out << token << ',' << count << '\n';
    out.close();
    if (out.fail()) throw IoError("write error on " + path.string());
}

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> kStopwords = [] {
        std::set<std::string> s;
        for (const char* w :
             {"a",    "an",   "and",  "are", "as",   "at",   "be",   "but",  "by",   "for",
              "from", "had",  "has",  "have", "he",  "her",  "his",  "i",    "if",   "in",
              "is",   "it",   "its",  "me",  "my",   "no",   "not",  "of",   "on",   "or",
              "our",  "s",    "she",  "so",  "t",    "that", "the",  "their", "them", "they",
              "this", "to",   "us",   "was", "we",   "were", "will", "with", "you",  "your"}) {
            s.insert(w);
        }
        for (const char* w : {"的", "一", "是", "了", "我", "不", "人", "在", "他", "有",
                              "这", "个", "上", "们", "来", "到", "时", "大", "地", "为",
                              "中", "你", "说", "就", "和", "要", "也", "以", "于", "之"}) {
            s.insert(w);
        }
        return s;
    }();
    return kStopwords;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
    LineReader reader(path);
    std::set<std::string> out;
    while (auto line = reader.next_line()) {
        if (line->empty() || (*line)[0] == '#') continue;
        out.insert(*line);
    }
    return out;
}

}  // namespace chaincarve

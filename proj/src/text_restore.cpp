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

#include "chaincarve/text_restore.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "chaincarve/errors.hpp"
#include "chaincarve/fnv.hpp"
#include "chaincarve/hex.hpp"
#include "chaincarve/record_io.hpp"
#include "chaincarve/utf8.hpp"

namespace chaincarve {

using nlohmann::json;

std::string_view to_string(TextKind kind) {
    switch (kind) {
        case TextKind::chinese: return "chinese";
        case TextKind::english: return "english";
        case TextKind::email: return "email";
        case TextKind::link: return "link";
    }
    return "english";
}

std::optional<TextKind> text_kind_from_string(std::string_view s) {
    if (s == "chinese") return TextKind::chinese;
    if (s == "english") return TextKind::english;
    if (s == "email") return TextKind::email;
    if (s == "link") return TextKind::link;
    return std::nullopt;
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::none: return "none";
        case RejectReason::empty_input: return "empty_input";
        case RejectReason::too_short: return "too_short";
        case RejectReason::low_keep_ratio: return "low_keep_ratio";
        case RejectReason::unclassifiable: return "unclassifiable";
    }
    return "none";
}

namespace {

bool is_local_part_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '%' ||
           c == '+' || c == '-';
}

bool is_domain_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
}

bool all_alpha(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c));
    });
}

// domain with at least two non-empty dot-separated labels and an alphabetic
// TLD of >= 2 chars
bool valid_email_domain(std::string_view domain) {
    while (!domain.empty() && (domain.back() == '.' || domain.back() == '-')) {
        domain.remove_suffix(1);
    }
    if (domain.empty()) return false;
    std::size_t label_count = 0;
    std::string_view rest = domain;
    std::string_view last_label;
    while (!rest.empty()) {
        const auto dot = rest.find('.');
        const std::string_view label = rest.substr(0, dot);
        if (label.empty()) return false;
        last_label = label;
        ++label_count;
        if (dot == std::string_view::npos) break;
        rest.remove_prefix(dot + 1);
        if (rest.empty()) return false;  // trailing dot survived stripping
    }
    return label_count >= 2 && last_label.size() >= 2 && all_alpha(last_label);
}

bool contains_email(std::string_view text) {
    for (std::size_t at = text.find('@'); at != std::string_view::npos; at = text.find('@', at + 1)) {
        std::size_t lo = at;
        while (lo > 0 && is_local_part_char(text[lo - 1])) --lo;
        if (lo == at) continue;  // empty local part
        std::size_t hi = at + 1;
        while (hi < text.size() && is_domain_char(text[hi])) ++hi;
        if (hi == at + 1) continue;
        if (valid_email_domain(text.substr(at + 1, hi - at - 1))) return true;
    }
    return false;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                          [](char a, char b) {
                              return std::tolower(static_cast<unsigned char>(a)) ==
                                     std::tolower(static_cast<unsigned char>(b));
                          });
    return it != haystack.end();
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool hostname_token_is_link(std::string_view token, const std::vector<std::string>& tlds) {
    if (token.size() < 4) return false;  // shortest useful form: a.io
    if (token.front() == '.' || token.front() == '-' || token.back() == '.' || token.back() == '-') {
        return false;
    }
    const auto last_dot = token.rfind('.');
    if (last_dot == std::string_view::npos || last_dot == 0) return false;
    const std::string tld = to_lower(token.substr(last_dot + 1));
    return std::find(tlds.begin(), tlds.end(), tld) != tlds.end();
}

bool contains_link(std::string_view text, const std::vector<std::string>& tlds) {
    if (contains_ci(text, "http://") || contains_ci(text, "https://")) return true;
    // scan dotted hostname tokens: runs of [A-Za-z0-9.-]
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_domain_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_domain_char(text[j])) ++j;
        if (hostname_token_is_link(text.substr(i, j - i), tlds)) return true;
        i = j;
    }
    return false;
}

bool is_english_char(char32_t cp) {
    if (cp > 0x7F) return false;
    const auto c = static_cast<unsigned char>(cp);
    return std::isalnum(c) || c == ' ' || std::ispunct(c);
}

}  // namespace

std::optional<TextKind> classify_kind(std::string_view text, const RestorePolicy& policy) {
    if (text.empty()) return std::nullopt;
    if (contains_email(text)) return TextKind::email;
    if (contains_link(text, policy.link_tlds)) return TextKind::link;

    std::uint64_t cjk = 0;
    std::uint64_t english_like = 0;
    std::uint64_t total = 0;
    for_each_scalar(text, [&](char32_t cp) {
        ++total;
        if (is_cjk(cp)) ++cjk;
        if (is_english_char(cp)) ++english_like;
        return true;
    });
    if (total == 0) return std::nullopt;
    if (cjk >= policy.chinese_char_threshold) return TextKind::chinese;
    if (english_like * 2 >= total) return TextKind::english;
    return std::nullopt;
}

std::optional<RestoredText> restore_text(std::string_view input_hex, const RestorePolicy& policy,
                                         RejectReason* reason) {
    if (reason) *reason = RejectReason::none;
    const auto payload = hex_decode(input_hex);
    if (payload.empty()) {
        if (reason) *reason = RejectReason::empty_input;
        return std::nullopt;
    }
    std::string text = utf8_filter_to_string(payload);
    const std::uint64_t chars = scalar_count(text);
    if (chars < policy.min_chars) {
        if (reason) *reason = RejectReason::too_short;
        return std::nullopt;
    }
    const double keep_ratio = static_cast<double>(text.size()) / static_cast<double>(payload.size());
    if (keep_ratio < policy.min_keep_ratio) {
        if (reason) *reason = RejectReason::low_keep_ratio;
        return std::nullopt;
    }
    const auto kind = classify_kind(text, policy);
    if (!kind) {
        if (reason) *reason = RejectReason::unclassifiable;
        return std::nullopt;
    }
    RestoredText out;
    out.text = std::move(text);
    out.kind = *kind;
    out.char_count = chars;
    out.keep_ratio = keep_ratio;
    return out;
}

std::optional<RestoredText> restore_from_record(const TxRecord& tx, const RestorePolicy& policy,
                                                RejectReason* reason) {
    auto restored = restore_text(tx.input_hex, policy, reason);
    if (!restored) return std::nullopt;
    restored->origin_tx = tx.tx_hash;
    restored->block_number = tx.block_number;
    restored->from_addr = tx.from_addr;
    restored->to_addr = tx.to_addr;
    return restored;
}

bool Deduper::admit(const RestoredText& text) {
    if (!enabled_) return true;
    const std::uint64_t key = fnv1a64(text.text);
    const auto n = ++counts_[key];
    if (n > 1) {
        ++folded_;
        return false;
    }
    return true;
}

std::string restored_text_to_json_line(const RestoredText& text) {
    json j;
    j["tx"] = text.origin_tx;
    j["block"] = text.block_number;
    j["from"] = text.from_addr;
    if (text.to_addr) {
        j["to"] = *text.to_addr;
    } else {
        j["to"] = nullptr;
    }
    j["kind"] = std::string(to_string(text.kind));
    j["text"] = text.text;
    j["keep_ratio"] = text.keep_ratio;
    return j.dump();
}

RestoredText restored_text_from_json_line(std::string_view line, std::size_t line_number) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what(), line_number);
    }
    try {
        RestoredText t;
        t.origin_tx = j.at("tx").get<std::string>();
        t.block_number = j.at("block").get<std::uint64_t>();
        t.from_addr = j.at("from").get<std::string>();
        if (!j.at("to").is_null()) t.to_addr = j["to"].get<std::string>();
        const auto kind = text_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) throw FormatError("unknown kind", line_number);
        t.kind = *kind;
        t.text = j.at("text").get<std::string>();
        t.keep_ratio = j.at("keep_ratio").get<double>();
        t.char_count = scalar_count(t.text);
        return t;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad text row: ") + e.what(), line_number);
    }
}

std::size_t write_texts(const std::vector<RestoredText>& texts, const std::filesystem::path& path) {
    LineWriter writer(path);
    for (const auto& t : texts) writer.write_line(restored_text_to_json_line(t));
    writer.close();
    return texts.size();
}

std::vector<RestoredText> read_texts(const std::filesystem::path& path) {
    LineReader reader(path);
    std::vector<RestoredText> out;
    while (auto line = reader.next_line()) {
        if (line->empty()) continue;
        out.push_back(restored_text_from_json_line(*line, reader.line_number()));
    }
    return out;
}

}  // namespace chaincarve

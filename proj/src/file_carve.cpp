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

#include "chaincarve/file_carve.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "chaincarve/errors.hpp"
#include "chaincarve/hex.hpp"

namespace chaincarve {

using nlohmann::json;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) {
    return {s.begin(), s.end()};
}

constexpr std::string_view kHtmlOpenTag = "<html";
constexpr std::size_t kHtmlBackscan = 16;

}  // namespace

SignatureRegistry SignatureRegistry::builtin() {
    SignatureRegistry reg;
    reg.entries_ = {
        {"png",
         {{0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A}},
         {{0x49, 0x45, 0x4E, 0x44, 0xAE, 0x42, 0x60, 0x82}}},  // IEND + its CRC
        {"jpg",
         {{0xFF, 0xD8, 0xFF, 0xE0}, {0xFF, 0xD8, 0xFF, 0xE1}, {0xFF, 0xD8, 0xFF, 0xE8}},
         {{0xFF, 0xD9}}},
        {"gif",
         {bytes_of("GIF87a"), bytes_of("GIF89a")},
         {{0x00, 0x3B}}},
        {"html",
         {bytes_of("html>")},  // mid-tag marker; carve backs up to "<html"
         {bytes_of("</html>")}},
        {"zip",
         // 50 4B 03 04 is the ZIP local-file-header magic ("PK\x03\x04");
         // the other two cover PKLITE and WinZip self-extractor payloads.
         {{0x50, 0x4B, 0x03, 0x04}, bytes_of("PKLITE"), bytes_of("WinZip")},
         {}},
        {"pdf",
         {bytes_of("%PDF")},
         {bytes_of("%%EOF")}},
    };
    return reg;
}

void SignatureRegistry::merge_entry(SignatureEntry entry) {
    for (const auto& h : entry.header_variants) {
        if (h.size() < 2) {
            throw RegistryFormatError("header variant for \"" + entry.file_type +
                                      "\" is shorter than 2 bytes");
        }
    }
    for (auto& existing : entries_) {
        if (existing.file_type == entry.file_type) {
            for (auto& h : entry.header_variants) {
                if (std::find(existing.header_variants.begin(), existing.header_variants.end(), h) ==
                    existing.header_variants.end()) {
                    existing.header_variants.push_back(std::move(h));
                }
            }
            for (auto& t : entry.trailer_variants) {
                if (std::find(existing.trailer_variants.begin(), existing.trailer_variants.end(),
                              t) == existing.trailer_variants.end()) {
                    existing.trailer_variants.push_back(std::move(t));
                }
            }
            return;
        }
    }
    if (entry.header_variants.empty()) {
        throw RegistryFormatError("new type \"" + entry.file_type + "\" has no header variants");
    }
    entries_.push_back(std::move(entry));
}

void SignatureRegistry::merge_extension_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open registry file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw RegistryFormatError("registry file " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw RegistryFormatError("registry file must be a JSON list");
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("type") || !item["type"].is_string()) {
            throw RegistryFormatError("registry entries need a string \"type\"");
        }
        SignatureEntry entry;
        entry.file_type = item["type"].get<std::string>();
        try {
            for (const auto& h : item.value("headers", json::array())) {
                entry.header_variants.push_back(hex_decode(h.get<std::string>()));
            }
            for (const auto& t : item.value("trailers", json::array())) {
                entry.trailer_variants.push_back(hex_decode(t.get<std::string>()));
            }
        } catch (const json::exception& e) {
            throw RegistryFormatError("registry entry \"" + entry.file_type + "\": " + e.what());
        } catch (const FormatError& e) {
            throw RegistryFormatError("registry entry \"" + entry.file_type + "\": " + e.what());
        }
        merge_entry(std::move(entry));
    }
}

const SignatureEntry* SignatureRegistry::find(std::string_view file_type) const {
    for (const auto& e : entries_) {
        if (e.file_type == file_type) return &e;
    }
    return nullptr;
}

bool SignatureRegistry::is_image_type(std::string_view file_type) const {
    return file_type == "png" || file_type == "jpg" || file_type == "gif";
}

namespace {

void find_all(std::span<const std::uint8_t> haystack, const std::vector<std::uint8_t>& needle,
              const std::string& type, MatchWhich which, std::vector<SignatureMatch>& out) {
    if (needle.empty() || haystack.size() < needle.size()) return;
    auto begin = haystack.begin();
    for (;;) {
        auto it = std::search(begin, haystack.end(), needle.begin(), needle.end());
        if (it == haystack.end()) break;
        out.push_back({type, static_cast<std::size_t>(it - haystack.begin()), which, needle.size()});
        begin = it + 1;
    }
}

std::vector<SignatureMatch> all_matches(std::span<const std::uint8_t> payload,
                                        const SignatureRegistry& registry) {
    std::vector<SignatureMatch> matches;
    for (const auto& entry : registry.entries()) {
        for (const auto& h : entry.header_variants) {
            find_all(payload, h, entry.file_type, MatchWhich::header, matches);
        }
        for (const auto& t : entry.trailer_variants) {
            find_all(payload, t, entry.file_type, MatchWhich::trailer, matches);
        }
    }
    std::sort(matches.begin(), matches.end(), [](const SignatureMatch& a, const SignatureMatch& b) {
        if (a.offset != b.offset) return a.offset < b.offset;
        if (a.length != b.length) return a.length > b.length;  // longest first
        if (a.file_type != b.file_type) return a.file_type < b.file_type;
        return a.which < b.which;
    });
    return matches;
}

}  // namespace

std::vector<SignatureMatch> scan_payload(std::span<const std::uint8_t> payload,
                                         const SignatureRegistry& registry) {
    std::vector<SignatureMatch> out;
    std::size_t watermark = 0;
    bool first = true;
    for (auto& m : all_matches(payload, registry)) {
        if (!first && m.offset < watermark) continue;
        watermark = m.offset + m.length;
        first = false;
        out.push_back(std::move(m));
    }
    return out;
}

namespace {

// (offset, length) of the first occurrence of any variant at or after `from`
std::optional<std::pair<std::size_t, std::size_t>> earliest_occurrence(
    std::span<const std::uint8_t> payload, const std::vector<std::vector<std::uint8_t>>& variants,
    std::size_t from) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    if (from > payload.size()) return best;
    for (const auto& v : variants) {
        if (v.empty() || payload.size() - from < v.size()) continue;
        auto it = std::search(payload.begin() + static_cast<std::ptrdiff_t>(from), payload.end(),
                              v.begin(), v.end());
        if (it == payload.end()) continue;
        const auto off = static_cast<std::size_t>(it - payload.begin());
        if (!best || off < best->first || (off == best->first && v.size() > best->second)) {
            best = {off, v.size()};
        }
    }
    return best;
}

std::size_t adjust_carve_start(std::span<const std::uint8_t> payload, const HeaderHit& hit) {
    if (hit.entry->file_type != "html") return hit.offset;
    const std::size_t lo = hit.offset > kHtmlBackscan ? hit.offset - kHtmlBackscan : 0;
    for (std::size_t pos = hit.offset; pos-- > lo;) {
        if (payload.size() - pos >= kHtmlOpenTag.size() &&
            std::equal(kHtmlOpenTag.begin(), kHtmlOpenTag.end(), payload.begin() + static_cast<std::ptrdiff_t>(pos))) {
            return pos;
        }
    }
    return hit.offset;
}

}  // namespace

std::optional<HeaderHit> find_earliest_header(std::span<const std::uint8_t> payload,
                                              const SignatureRegistry& registry) {
    std::optional<HeaderHit> best;
    for (const auto& entry : registry.entries()) {
        auto hit = earliest_occurrence(payload, entry.header_variants, 0);
        if (!hit) continue;
        if (!best || hit->first < best->offset ||
            (hit->first == best->offset && hit->second > best->length)) {
            best = HeaderHit{&entry, hit->first, hit->second};
        }
    }
    return best;
}

std::optional<CarvedFile> carve_payload(std::span<const std::uint8_t> payload,
                                        const SignatureRegistry& registry, std::string origin_tx) {
    const auto hit = find_earliest_header(payload, registry);
    if (!hit) return std::nullopt;

    CarvedFile out;
    out.file_type = hit->entry->file_type;
    out.header_offset = adjust_carve_start(payload, *hit);
    if (!origin_tx.empty()) out.source_txs.push_back(std::move(origin_tx));

    const auto trailer =
        earliest_occurrence(payload, hit->entry->trailer_variants, hit->offset + hit->length);
    std::size_t end = payload.size();
    if (trailer) {
        end = trailer->first + trailer->second;
        out.completeness = Completeness::complete;
    } else {
        out.completeness = hit->entry->trailer_variants.empty() ? Completeness::unknown
                                                                : Completeness::truncated;
    }
    out.data.assign(payload.begin() + static_cast<std::ptrdiff_t>(out.header_offset),
                    payload.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

std::vector<SignatureMatch> scan_payload(const BytePayload& payload,
                                         const SignatureRegistry& registry) {
    return scan_payload(std::span<const std::uint8_t>(payload.bytes), registry);
}

std::optional<CarvedFile> carve_payload(const BytePayload& payload, const SignatureRegistry& registry) {
    return carve_payload(std::span<const std::uint8_t>(payload.bytes), registry, payload.origin_tx);
}

std::optional<CarvedFile> carve_file(std::string_view input_hex, const SignatureRegistry& registry,
                                     std::string origin_tx) {
    const auto payload = hex_decode(input_hex);
    return carve_payload(payload, registry, std::move(origin_tx));
}

std::string_view to_string(Completeness c) {
    switch (c) {
        case Completeness::complete: return "complete";
        case Completeness::truncated: return "truncated";
        case Completeness::unknown: return "unknown";
    }
    return "unknown";
}

std::optional<Completeness> completeness_from_string(std::string_view s) {
    if (s == "complete") return Completeness::complete;
    if (s == "truncated") return Completeness::truncated;
    if (s == "unknown") return Completeness::unknown;
    return std::nullopt;
}

std::optional<ClassifierResult> run_image_classifier(const std::string& command,
                                                     const std::filesystem::path& image_path) {
    // single-quote the path for the shell
    std::string quoted = "'";
    for (char c : image_path.string()) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    quoted += "'";
    const std::string full = command + " " + quoted;
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) return std::nullopt;
    std::string output;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
    const int status = pclose(pipe);
    if (status != 0) return std::nullopt;
    try {
        const json j = json::parse(output);
        ClassifierResult result;
        result.label = j.at("label").get<std::string>();
        result.score = j.at("score").get<double>();
        if (result.score < 0.0 || result.score > 1.0) return std::nullopt;
        return result;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

std::filesystem::path write_carved(const CarvedFile& file, const std::filesystem::path& out_dir,
                                   const SidecarExtras& extras) {
    if (file.source_txs.empty()) throw Error("carved file has no source transactions");
    const auto dir = out_dir / file.file_type;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const std::string stem = file.source_txs.front();
    std::filesystem::path data_path;
    std::filesystem::path meta_path;
    for (int suffix = 0;; ++suffix) {
        std::string name = stem;
        if (suffix > 0) name += "-" + std::to_string(suffix);
        data_path = dir / (name + "." + file.file_type);
        meta_path = dir / (name + ".json");
        if (!std::filesystem::exists(data_path) && !std::filesystem::exists(meta_path)) break;
    }

    {
        std::ofstream out(data_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + data_path.string());
        out.write(reinterpret_cast<const char*>(file.data.data()),
                  static_cast<std::streamsize>(file.data.size()));
        if (!out) throw IoError("write error on " + data_path.string());
    }

    json meta;
    meta["file_type"] = file.file_type;
    meta["completeness"] = std::string(to_string(file.completeness));
    meta["sources"] = file.source_txs;
    meta["header_offset"] = file.header_offset;
    meta["size"] = file.data.size();
    if (extras.block_number) meta["block_number"] = *extras.block_number;
    if (extras.classifier) {
        meta["classifier"] = {{"label", extras.classifier->label}, {"score", extras.classifier->score}};
    }
    if (!extras.chunks.empty()) {
        json chunks = json::array();
        for (const auto& c : extras.chunks) {
            chunks.push_back({{"tx", c.tx_hash},
                              {"offset", c.offset},
                              {"size", c.size},
                              {"abi_fallback", c.abi_fallback}});
        }
        meta["chunks"] = std::move(chunks);
    }
    std::ofstream meta_out(meta_path, std::ios::binary | std::ios::trunc);
    if (!meta_out) throw IoError("cannot write " + meta_path.string());
    meta_out << meta.dump(2) << "\n";
    if (!meta_out) throw IoError("write error on " + meta_path.string());
    return data_path;
}

}  // namespace chaincarve

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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chaincarve/hex.hpp"

namespace chaincarve {

struct SignatureEntry {
    std::string file_type;  // short label: png, jpg, gif, ...
    std::vector<std::vector<std::uint8_t>> header_variants;   // each >= 2 bytes
    std::vector<std::vector<std::uint8_t>> trailer_variants;  // may be empty
};

/// Immutable after construction; labels are unique.
class SignatureRegistry {
  public:
    /// Core signature set: png, jpg, gif, html, zip, pdf.
    static SignatureRegistry builtin();

    /// Merges a JSON extension file: a list of {"type", "headers": [hex],
    /// "trailers": [hex]}. New labels are appended; existing labels gain the
    /// extra variants. Throws RegistryFormatError.
    void merge_extension_file(const std::filesystem::path& path);
    void merge_entry(SignatureEntry entry);

    const SignatureEntry* find(std::string_view file_type) const;
    const std::vector<SignatureEntry>& entries() const { return entries_; }
    bool is_image_type(std::string_view file_type) const;

  private:
    std::vector<SignatureEntry> entries_;
};

enum class MatchWhich : std::uint8_t { header, trailer };

struct SignatureMatch {
    std::string file_type;
    std::size_t offset;
    MatchWhich which;
    std::size_t length;
};

/// All non-overlapping registry pattern occurrences anywhere in the payload,
/// in ascending offset order. Overlaps resolve earliest-first, longest-first
/// at equal offsets.
std::vector<SignatureMatch> scan_payload(std::span<const std::uint8_t> payload,
                                         const SignatureRegistry& registry);
std::vector<SignatureMatch> scan_payload(const BytePayload& payload,
                                         const SignatureRegistry& registry);

struct HeaderHit {
    const SignatureEntry* entry;
    std::size_t offset;
    std::size_t length;  // of the matched variant
};

/// Earliest header match of any registered type; position-first, longest
/// variant at equal positions.
std::optional<HeaderHit> find_earliest_header(std::span<const std::uint8_t> payload,
                                              const SignatureRegistry& registry);

enum class Completeness : std::uint8_t { complete, truncated, unknown };

std::string_view to_string(Completeness c);
std::optional<Completeness> completeness_from_string(std::string_view s);

struct CarvedFile {
    std::string file_type;
    std::vector<std::uint8_t> data;
    Completeness completeness{Completeness::unknown};
    std::vector<std::string> source_txs;
    std::size_t header_offset{0};  // where the carved data starts in the first payload
};

/// Single carving per payload: earliest header wins; data runs through the
/// first same-type trailer (completeness=complete), else to payload end
/// (truncated when the type defines a trailer, unknown otherwise). For html
/// the carve start backs up to a "<html" within 16 bytes before the marker.
std::optional<CarvedFile> carve_payload(std::span<const std::uint8_t> payload,
                                        const SignatureRegistry& registry,
                                        std::string origin_tx = {});
std::optional<CarvedFile> carve_payload(const BytePayload& payload, const SignatureRegistry& registry);
std::optional<CarvedFile> carve_file(std::string_view input_hex, const SignatureRegistry& registry,
                                     std::string origin_tx = {});

/// Output of the optional external image-classifier command.
struct ClassifierResult {
    std::string label;
    double score{0.0};
};

/// Runs `command <image_path>` and parses {"label": ..., "score": ...} from
/// its stdout. nullopt when the command fails or prints something else.
std::optional<ClassifierResult> run_image_classifier(const std::string& command,
                                                     const std::filesystem::path& image_path);

/// Extra sidecar fields recorded for reassembled files.
struct ChunkInfo {
    std::string tx_hash;
    std::size_t offset{0};  // position within the accumulated stream
    std::size_t size{0};
    bool abi_fallback{false};
};

struct SidecarExtras {
    std::optional<std::uint64_t> block_number;
    std::optional<ClassifierResult> classifier;
    std::vector<ChunkInfo> chunks;  // reassembled files only
};

/// Writes <out_dir>/<type>/<first_source_tx>.<type> plus a sidecar metadata
/// JSON next to it; name collisions get "-1", "-2", ... suffixes. Returns the
/// data file path.
std::filesystem::path write_carved(const CarvedFile& file, const std::filesystem::path& out_dir,
                                   const SidecarExtras& extras = {});

}  // namespace chaincarve

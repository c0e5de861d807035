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
#include <vector>

#include "chaincarve/file_carve.hpp"
#include "chaincarve/ien_graph.hpp"
#include "chaincarve/report.hpp"
#include "chaincarve/text_restore.hpp"
#include "chaincarve/tx_record.hpp"

namespace chaincarve {

struct ScanOptions {
    RestorePolicy policy;
    SignatureRegistry registry{SignatureRegistry::builtin()};
    unsigned threads{1};
    /// When set, carved files land under files_dir with sidecars.
    std::optional<std::filesystem::path> files_dir;
    /// External classifier run on each written image (requires files_dir).
    std::string image_classifier_cmd;
};

struct ScannedFile {
    CarvedFile file;
    std::uint64_t block_number{0};
    std::uint64_t timestamp{0};
    std::filesystem::path written_path;  // empty unless files_dir was set
};

struct ScanOutcome {
    std::vector<RestoredText> texts;        // record order (block, tx_index)
    std::vector<ScannedFile> files;         // record order
    ScanReport report;
    std::vector<CountedItem> counted_items;  // for temporal bucketing
    std::vector<EmbedRecord> embed_records;  // for graph building
};

/// Runs text restoration and file carving over every record. Parallel across
/// records with a deterministic merge: outputs are ordered by
/// (block_number, tx_index) and identical for any thread count.
ScanOutcome scan_records(const std::vector<TxRecord>& records, const ScanOptions& options);

/// Graph category of a text kind; emails count toward the link network.
Category category_of(TextKind kind);

}  // namespace chaincarve

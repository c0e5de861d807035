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

#include "chaincarve/pipeline.hpp"

#include <algorithm>
#include <set>
#include <thread>

namespace chaincarve {

Category category_of(TextKind kind) {
    switch (kind) {
        case TextKind::chinese: return Category::chinese;
        case TextKind::english: return Category::english;
        case TextKind::email: return Category::link;
        case TextKind::link: return Category::link;
    }
    return Category::english;
}

namespace {

struct RecordOutcome {
    std::optional<RestoredText> text;
    RejectReason text_reject{RejectReason::none};
    std::optional<CarvedFile> file;
};

// Signature detection takes precedence: a payload that carves as a file is
// not also fed through text restoration (its byte soup would often pass the
// gates as junk "english" and double-count the transaction).
RecordOutcome process_record(const TxRecord& tx, const RestorePolicy& policy,
                             const SignatureRegistry& registry) {
    RecordOutcome out;
    if (!tx.has_input()) {
        out.text_reject = RejectReason::empty_input;
        return out;
    }
    out.file = carve_file(tx.input_hex, registry, tx.tx_hash);
    if (!out.file) {
        out.text = restore_from_record(tx, policy, &out.text_reject);
    }
    return out;
}

}  // namespace

ScanOutcome scan_records(const std::vector<TxRecord>& records, const ScanOptions& options) {
    const SignatureRegistry& registry = options.registry;

    std::vector<const TxRecord*> ordered;
    ordered.reserve(records.size());
    for (const auto& tx : records) ordered.push_back(&tx);
    std::sort(ordered.begin(), ordered.end(), [](const TxRecord* a, const TxRecord* b) {
        return std::tie(a->block_number, a->tx_index) < std::tie(b->block_number, b->tx_index);
    });

    std::vector<RecordOutcome> outcomes(ordered.size());
    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1 || ordered.size() < 2 * threads) {
        for (std::size_t i = 0; i < ordered.size(); ++i) {
            outcomes[i] = process_record(*ordered[i], options.policy, registry);
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t]() {
                for (std::size_t i = t; i < ordered.size(); i += threads) {
                    outcomes[i] = process_record(*ordered[i], options.policy, registry);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // deterministic single-threaded merge in (block, tx_index) order
    ScanOutcome out;
    Deduper deduper(options.policy.dedupe);
    std::set<std::uint64_t> blocks;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const TxRecord& tx = *ordered[i];
        blocks.insert(tx.block_number);
        RecordOutcome& oc = outcomes[i];
        if (oc.text_reject != RejectReason::none) {
            out.report.skipped[std::string(to_string(oc.text_reject))]++;
        }
        if (oc.text) {
            if (deduper.admit(*oc.text)) {
                out.counted_items.push_back(
                    {std::string(to_string(oc.text->kind)), tx.block_number, tx.block_timestamp});
                out.embed_records.push_back(
                    {oc.text->from_addr, oc.text->to_addr, category_of(oc.text->kind)});
                out.texts.push_back(std::move(*oc.text));
            } else {
                out.report.skipped["duplicate_text"]++;
            }
        }
        if (oc.file) {
            ScannedFile sf;
            sf.file = std::move(*oc.file);
            sf.block_number = tx.block_number;
            sf.timestamp = tx.block_timestamp;
            out.counted_items.push_back({sf.file.file_type, tx.block_number, tx.block_timestamp});
            out.embed_records.push_back({tx.from_addr, tx.to_addr, Category::file});
            out.files.push_back(std::move(sf));
        }
    }

    if (options.files_dir) {
        for (auto& sf : out.files) {
            SidecarExtras extras;
            extras.block_number = sf.block_number;
            sf.written_path = write_carved(sf.file, *options.files_dir, extras);
            if (!options.image_classifier_cmd.empty() &&
                registry.is_image_type(sf.file.file_type)) {
                if (auto verdict = run_image_classifier(options.image_classifier_cmd, sf.written_path)) {
                    // rewrite the sidecar with the verdict attached
                    extras.classifier = verdict;
                    std::filesystem::remove(sf.written_path);
                    auto meta = sf.written_path.parent_path() / sf.written_path.stem();
                    meta += ".json";
                    std::filesystem::remove(meta);
                    sf.written_path = write_carved(sf.file, *options.files_dir, extras);
                } else {
                    out.report.skipped["classifier_failed"]++;
                }
            }
        }
    }

    std::vector<std::string> carved_types;
    carved_types.reserve(out.files.size());
    for (const auto& sf : out.files) carved_types.push_back(sf.file.file_type);
    auto counted = category_counts(out.texts, carved_types, registry);
    counted.skipped = std::move(out.report.skipped);
    out.report = std::move(counted);
    out.report.blocks_scanned = blocks.size();
    out.report.txs_scanned = records.size();
    return out;
}

}  // namespace chaincarve

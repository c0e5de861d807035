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

#include "chaincarve/reassembly.hpp"

#include <algorithm>

#include "chaincarve/hex.hpp"

namespace chaincarve {

std::string_view to_string(ChunkMode mode) {
    return mode == ChunkMode::raw ? "raw" : "abi_bytes";
}

CandidateSet find_candidates(const ReassemblyJob& job, const RecordStore& store) {
    CandidateSet out;
    const std::uint64_t first = job.start.block_number + 1;
    const std::uint64_t last = job.start.block_number + job.window_blocks;
    for (const TxRecord* tx : store.sender_range(job.start.from_addr, first, last)) {
        if (tx->tx_hash == job.start.tx_hash) continue;
        out.txs.push_back(*tx);
    }
    out.window_incomplete = store.max_block() < last;
    return out;
}

namespace {

constexpr std::size_t kSelectorSize = 4;
constexpr std::size_t kWordSize = 32;
constexpr std::size_t kMinAbiSize = kSelectorSize + 2 * kWordSize;

bool word_is(std::span<const std::uint8_t> word, std::uint64_t value) {
    for (std::size_t i = 0; i < kWordSize - 8; ++i) {
        if (word[i] != 0) return false;
    }
    std::uint64_t v = 0;
    for (std::size_t i = kWordSize - 8; i < kWordSize; ++i) v = (v << 8) | word[i];
    return v == value;
}

std::optional<std::uint64_t> word_as_u64(std::span<const std::uint8_t> word) {
    for (std::size_t i = 0; i < kWordSize - 8; ++i) {
        if (word[i] != 0) return std::nullopt;
    }
    std::uint64_t v = 0;
    for (std::size_t i = kWordSize - 8; i < kWordSize; ++i) v = (v << 8) | word[i];
    return v;
}

}  // namespace

ChunkData extract_chunk(std::span<const std::uint8_t> payload, ChunkMode mode) {
    ChunkData out;
    if (mode == ChunkMode::raw) {
        out.bytes.assign(payload.begin(), payload.end());
        return out;
    }
    // selector(4) ++ offset word (must be 0x20) ++ length word ++ data,
    // zero-padded to a 32-byte multiple
    const auto fallback = [&]() {
        out.bytes.assign(payload.begin(), payload.end());
        out.abi_fallback = true;
        return out;
    };
    if (payload.size() < kMinAbiSize) return fallback();
    if (!word_is(payload.subspan(kSelectorSize, kWordSize), kWordSize)) return fallback();
    const auto length = word_as_u64(payload.subspan(kSelectorSize + kWordSize, kWordSize));
    if (!length) return fallback();
    const std::size_t data_area = payload.size() - kMinAbiSize;
    const std::size_t padded = (*length + kWordSize - 1) / kWordSize * kWordSize;
    if (data_area != padded) return fallback();
    const auto data = payload.subspan(kMinAbiSize, static_cast<std::size_t>(*length));
    out.bytes.assign(data.begin(), data.end());
    return out;
}

namespace {

// first occurrence of any trailer variant at or after `from`
std::optional<std::pair<std::size_t, std::size_t>> find_trailer(
    const std::vector<std::uint8_t>& data, const std::vector<std::vector<std::uint8_t>>& trailers,
    std::size_t from) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (const auto& t : trailers) {
        if (t.empty() || data.size() < from + t.size()) continue;
        auto it = std::search(data.begin() + static_cast<std::ptrdiff_t>(from), data.end(),
                              t.begin(), t.end());
        if (it == data.end()) continue;
        const auto off = static_cast<std::size_t>(it - data.begin());
        if (!best || off < best->first || (off == best->first && t.size() > best->second)) {
            best = {off, t.size()};
        }
    }
    return best;
}

}  // namespace

std::optional<CarvedFile> reassemble(const ReassemblyJob& job, const std::vector<TxRecord>& candidates,
                                     const SignatureRegistry& registry,
                                     std::vector<ChunkInfo>* chunks) {
    std::vector<std::uint8_t> acc;
    std::vector<std::string> sources;
    std::vector<ChunkInfo> trace;

    const auto append = [&](const TxRecord& tx) {
        const auto payload = hex_decode(tx.input_hex);
        ChunkData chunk = extract_chunk(payload, job.chunk_mode);
        trace.push_back({tx.tx_hash, acc.size(), chunk.bytes.size(), chunk.abi_fallback});
        acc.insert(acc.end(), chunk.bytes.begin(), chunk.bytes.end());
        sources.push_back(tx.tx_hash);
    };

    append(job.start);

    // The start chunk tells us which type (and trailer set) we are chasing.
    const auto hit = find_earliest_header(acc, registry);
    if (!hit) return std::nullopt;
    auto carved = carve_payload(acc, registry);
    if (!carved) return std::nullopt;
    const SignatureEntry* entry = hit->entry;
    const std::size_t search_from = hit->offset + hit->length;

    if (carved->completeness != Completeness::complete && entry &&
        !entry->trailer_variants.empty()) {
        for (const TxRecord& tx : candidates) {
            append(tx);
            if (auto hit = find_trailer(acc, entry->trailer_variants, search_from)) {
                acc.resize(hit->first + hit->second);
                break;
            }
        }
    } else if (carved->completeness != Completeness::complete) {
        // no trailer defined: everything in the window contributes
        for (const TxRecord& tx : candidates) {
            append(tx);
        }
    }

    auto result = carve_payload(acc, registry);
    if (!result) return std::nullopt;
    result->source_txs = std::move(sources);
    if (chunks) *chunks = std::move(trace);
    return result;
}

}  // namespace chaincarve

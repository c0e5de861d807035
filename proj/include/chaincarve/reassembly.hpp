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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaincarve/file_carve.hpp"
#include "chaincarve/record_io.hpp"
#include "chaincarve/tx_record.hpp"

namespace chaincarve {

enum class ChunkMode : std::uint8_t { raw, abi_bytes };

std::string_view to_string(ChunkMode mode);

/// Default same-sender search window: roughly 24 hours of blocks at one
/// block every ~13 seconds.
inline constexpr std::uint64_t kDefaultWindowBlocks = 6700;

struct ReassemblyJob {
    TxRecord start;  // payload carves as truncated
    std::uint64_t window_blocks{kDefaultWindowBlocks};
    ChunkMode chunk_mode{ChunkMode::raw};
};

struct CandidateSet {
    std::vector<TxRecord> txs;  // ordered by (block_number, tx_index)
    /// The store does not cover start.block_number + window_blocks.
    bool window_incomplete{false};
};

/// Same-sender follow-ups with non-empty input in blocks
/// (start.block_number, start.block_number + window_blocks].
CandidateSet find_candidates(const ReassemblyJob& job, const RecordStore& store);

struct ChunkData {
    std::vector<std::uint8_t> bytes;
    bool abi_fallback{false};  // abi_bytes layout check failed, raw used
};

/// raw: identity. abi_bytes: unwraps selector ++ offset-word(0x20) ++
/// length-word ++ data ++ zero padding, returning the data bytes; anything
/// that does not match that single-dynamic-bytes-argument layout falls back
/// to raw with the flag set.
ChunkData extract_chunk(std::span<const std::uint8_t> payload, ChunkMode mode);

/// Concatenates the start chunk and candidate chunks in order, stopping at
/// the first same-type trailer; the final result goes through the regular
/// carve. completeness=complete only when a trailer terminated the stream.
/// `chunks`, when given, receives the per-chunk provenance for sidecars.
std::optional<CarvedFile> reassemble(const ReassemblyJob& job, const std::vector<TxRecord>& candidates,
                                     const SignatureRegistry& registry,
                                     std::vector<ChunkInfo>* chunks = nullptr);

}  // namespace chaincarve

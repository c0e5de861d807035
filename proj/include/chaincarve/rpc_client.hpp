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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "chaincarve/tx_record.hpp"

namespace chaincarve {

struct RpcOptions {
    std::string url;  // http(s)://host[:port][/path]
    int max_attempts{3};
    std::chrono::milliseconds initial_backoff{500};  // doubles per attempt
    std::chrono::seconds timeout{30};
    /// Fall back to trace_block instead of eth_getBlockByNumber. The block
    /// header is still fetched separately for its timestamp.
    bool use_trace_block{false};
};

/// Thin JSON-RPC 2.0 client. Single attempt per call; retrying lives in
/// fetch_range. Not thread-safe; use one instance per thread.
class RpcClient {
  public:
    explicit RpcClient(RpcOptions options);
    ~RpcClient();
    RpcClient(RpcClient&&) noexcept;
    RpcClient& operator=(RpcClient&&) noexcept;

    /// Full block with validated TxRecords, block_timestamp copied onto each.
    /// Throws TransportError / AuthError / RpcError / MissingBlockError /
    /// FormatError.
    BlockRecord fetch_block(std::uint64_t block_number);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RangeReport {
    std::uint64_t blocks_fetched{0};
    std::uint64_t total_retries{0};
    std::map<std::uint64_t, unsigned> retries_by_block;         // non-zero entries only
    std::vector<std::pair<std::uint64_t, std::string>> failures;  // block -> final error
    bool ok() const { return failures.empty(); }
};

using BlockSink = std::function<void(BlockRecord&&)>;

/// Fetches [first, last], emitting blocks to `sink` in ascending block order
/// on the calling thread regardless of internal parallelism. Failed blocks
/// are retried max_attempts times with exponential backoff, then recorded in
/// the report; AuthError aborts the whole range.
RangeReport fetch_range(const RpcOptions& options, std::uint64_t first, std::uint64_t last,
                        unsigned parallelism, const BlockSink& sink);

}  // namespace chaincarve

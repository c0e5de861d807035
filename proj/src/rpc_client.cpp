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

#include "chaincarve/rpc_client.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>  // CPPHTTPLIB_OPENSSL_SUPPORT comes from the build

#include <nlohmann/json.hpp>

#include "chaincarve/errors.hpp"

namespace chaincarve {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // starts with '/'
};

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError("invalid endpoint url: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return ParsedUrl{url, "/"};
    }
    return ParsedUrl{url.substr(0, path_start), url.substr(path_start)};
}

std::string to_quantity(std::uint64_t v) {
    return wei_to_hex(Wei(v));
}

}  // namespace

struct RpcClient::Impl {
    RpcOptions options;
    ParsedUrl url;
    httplib::Client http;
    std::uint64_t next_id{1};

    explicit Impl(RpcOptions opts)
        : options(std::move(opts)), url(parse_url(options.url)), http(url.base) {
        http.set_connection_timeout(options.timeout);
        http.set_read_timeout(options.timeout);
        http.set_write_timeout(options.timeout);
    }

    json call(const std::string& method, json params) {
        json req{{"jsonrpc", "2.0"}, {"id", next_id++}, {"method", method}, {"params", std::move(params)}};
        auto res = http.Post(url.path, req.dump(), "application/json");
        if (!res) {
            throw TransportError("request to " + options.url + " failed: " +
                                 httplib::to_string(res.error()));
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
        }
        if (res->status != 200) {
            throw TransportError("HTTP " + std::to_string(res->status) + " from " + options.url);
        }
        json body;
        try {
            body = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw RpcError(-32700, std::string("unparseable response: ") + e.what());
        }
        if (body.contains("error") && !body["error"].is_null()) {
            const auto& err = body["error"];
            const int code = err.value("code", 0);
            const std::string message = err.value("message", "unknown error");
            throw RpcError(code, message);
        }
        if (!body.contains("result")) {
            throw RpcError(-32700, "response carries neither result nor error");
        }
        return body["result"];
    }
};

RpcClient::RpcClient(RpcOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
RpcClient::~RpcClient() = default;
RpcClient::RpcClient(RpcClient&&) noexcept = default;
RpcClient& RpcClient::operator=(RpcClient&&) noexcept = default;

namespace {

std::string get_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw FormatError(std::string("missing string field \"") + key + "\" in RPC object");
    }
    return j[key].get<std::string>();
}

TxRecord parse_rpc_transaction(const json& jtx, std::uint64_t block_number, std::uint64_t timestamp) {
    TxRecord tx;
    tx.block_number = block_number;
    tx.block_timestamp = timestamp;
    tx.tx_index = static_cast<std::uint32_t>(quantity_from_hex(get_string(jtx, "transactionIndex")));
    tx.tx_hash = normalize_hex_field(get_string(jtx, "hash"), 64, "tx_hash");
    tx.from_addr = normalize_hex_field(get_string(jtx, "from"), 40, "from_addr");
    if (jtx.contains("to") && !jtx["to"].is_null()) {
        tx.to_addr = normalize_hex_field(jtx["to"].get<std::string>(), 40, "to_addr");
    }
    tx.value = wei_from_hex(get_string(jtx, "value"));
    tx.input_hex = normalize_hex_field(get_string(jtx, "input"), 0, "input_hex");
    return tx;
}

BlockRecord parse_block_result(const json& result, std::uint64_t requested) {
    BlockRecord block;
    block.block_number = quantity_from_hex(get_string(result, "number"));
    if (block.block_number != requested) {
        throw FormatError("node returned block " + std::to_string(block.block_number) +
                          " for request " + std::to_string(requested));
    }
    block.timestamp = quantity_from_hex(get_string(result, "timestamp"));
    if (!result.contains("transactions") || !result["transactions"].is_array()) {
        throw FormatError("block result lacks a transactions array");
    }
    for (const auto& jtx : result["transactions"]) {
        block.txs.push_back(parse_rpc_transaction(jtx, block.block_number, block.timestamp));
    }
    std::sort(block.txs.begin(), block.txs.end(),
              [](const TxRecord& a, const TxRecord& b) { return a.tx_index < b.tx_index; });
    validate(block);
    return block;
}

// trace_block entries carry no timestamp, so the caller supplies it.
BlockRecord parse_trace_result(const json& result, std::uint64_t requested, std::uint64_t timestamp) {
    if (!result.is_array()) throw FormatError("trace_block result is not an array");
    BlockRecord block;
    block.block_number = requested;
    block.timestamp = timestamp;
    for (const auto& trace : result) {
        // Only top-level traces correspond to transactions.
        if (trace.contains("traceAddress") && trace["traceAddress"].is_array() &&
            !trace["traceAddress"].empty()) {
            continue;
        }
        const std::string type = trace.value("type", "");
        if (type != "call" && type != "create") continue;
        if (!trace.contains("action") || !trace["action"].is_object()) {
            throw FormatError("trace lacks an action object");
        }
        const auto& action = trace["action"];
        TxRecord tx;
        tx.block_number = requested;
        tx.block_timestamp = timestamp;
        tx.tx_index =
            static_cast<std::uint32_t>(quantity_from_hex(get_string(trace, "transactionPosition")));
        tx.tx_hash = normalize_hex_field(get_string(trace, "transactionHash"), 64, "tx_hash");
        tx.from_addr = normalize_hex_field(get_string(action, "from"), 40, "from_addr");
        if (type == "call") {
            tx.to_addr = normalize_hex_field(get_string(action, "to"), 40, "to_addr");
            tx.input_hex = normalize_hex_field(get_string(action, "input"), 0, "input_hex");
        } else {
            tx.input_hex = normalize_hex_field(get_string(action, "init"), 0, "input_hex");
        }
        tx.value = wei_from_hex(get_string(action, "value"));
        block.txs.push_back(std::move(tx));
    }
    std::sort(block.txs.begin(), block.txs.end(),
              [](const TxRecord& a, const TxRecord& b) { return a.tx_index < b.tx_index; });
    validate(block);
    return block;
}

}  // namespace

BlockRecord RpcClient::fetch_block(std::uint64_t block_number) {
    const std::string quantity = to_quantity(block_number);
    if (!impl_->options.use_trace_block) {
        json result = impl_->call("eth_getBlockByNumber", json::array({quantity, true}));
        if (result.is_null()) {
            throw MissingBlockError("block " + std::to_string(block_number) + " not available");
        }
        return parse_block_result(result, block_number);
    }
    json header = impl_->call("eth_getBlockByNumber", json::array({quantity, false}));
    if (header.is_null()) {
        throw MissingBlockError("block " + std::to_string(block_number) + " not available");
    }
    const std::uint64_t timestamp = quantity_from_hex(get_string(header, "timestamp"));
    json traces = impl_->call("trace_block", json::array({quantity}));
    if (traces.is_null()) {
        throw MissingBlockError("block " + std::to_string(block_number) + " not available");
    }
    return parse_trace_result(traces, block_number, timestamp);
}

namespace {

struct FetchSlot {
    bool done{false};
    bool failed{false};
    std::string error;
    unsigned retries{0};
    BlockRecord block;
};

bool retryable(const std::exception& e) {
    if (dynamic_cast<const AuthError*>(&e)) return false;
    if (dynamic_cast<const MissingBlockError*>(&e)) return false;
    if (dynamic_cast<const FormatError*>(&e)) return false;
    return dynamic_cast<const TransportError*>(&e) != nullptr ||
           dynamic_cast<const RpcError*>(&e) != nullptr;
}

}  // namespace

RangeReport fetch_range(const RpcOptions& options, std::uint64_t first, std::uint64_t last,
                        unsigned parallelism, const BlockSink& sink) {
    if (first > last) throw Error("fetch_range: first > last");
    if (parallelism == 0) parallelism = 1;
    const std::uint64_t count = last - first + 1;
    parallelism = static_cast<unsigned>(std::min<std::uint64_t>(parallelism, count));

    std::mutex mu;
    std::condition_variable cv;
    std::map<std::uint64_t, FetchSlot> completed;  // block -> outcome
    std::atomic<std::uint64_t> next_block{first};
    std::atomic<bool> abort{false};
    std::string abort_reason;
    std::uint64_t emit_floor = first;  // guarded by mu; consumer progress
    const std::uint64_t max_ahead = std::max<std::uint64_t>(16, 4ull * parallelism);

    auto worker = [&]() {
        RpcClient client(options);
        for (;;) {
            if (abort.load()) return;
            const std::uint64_t n = next_block.fetch_add(1);
            if (n > last) return;
            {
                // flow control: never run further than max_ahead blocks past
                // the consumer, so completed results stay bounded
                std::unique_lock lk(mu);
                cv.wait(lk, [&] { return abort.load() || n < emit_floor + max_ahead; });
                if (abort.load()) return;
            }
            FetchSlot slot;
            for (int attempt = 1;; ++attempt) {
                try {
                    slot.block = client.fetch_block(n);
                    slot.done = true;
                    break;
                } catch (const AuthError& e) {
                    std::lock_guard lk(mu);
                    abort.store(true);
                    if (abort_reason.empty()) abort_reason = e.what();
                    cv.notify_all();
                    return;
                } catch (const std::exception& e) {
                    if (!retryable(e) || attempt >= options.max_attempts) {
                        slot.done = true;
                        slot.failed = true;
                        slot.error = e.what();
                        break;
                    }
                    slot.retries++;
                    const auto backoff = options.initial_backoff * (1u << (attempt - 1));
                    std::this_thread::sleep_for(backoff);
                }
            }
            {
                std::lock_guard lk(mu);
                completed.emplace(n, std::move(slot));
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(parallelism);
    for (unsigned i = 0; i < parallelism; ++i) threads.emplace_back(worker);

    RangeReport report;
    std::uint64_t emit_next = first;
    {
        std::unique_lock lk(mu);
        while (emit_next <= last) {
            cv.wait(lk, [&] { return abort.load() || completed.count(emit_next) > 0; });
            if (abort.load() && completed.count(emit_next) == 0) break;
            FetchSlot slot = std::move(completed.at(emit_next));
            completed.erase(emit_next);
            report.total_retries += slot.retries;
            if (slot.retries > 0) report.retries_by_block[emit_next] = slot.retries;
            if (slot.failed) {
                report.failures.emplace_back(emit_next, slot.error);
            } else {
                report.blocks_fetched++;
                lk.unlock();
                sink(std::move(slot.block));
                lk.lock();
            }
            ++emit_next;
            emit_floor = emit_next;
            cv.notify_all();
        }
    }
    for (auto& t : threads) t.join();
    if (abort.load()) {
        throw AuthError(abort_reason.empty() ? "range fetch aborted" : abort_reason);
    }
    return report;
}

}  // namespace chaincarve

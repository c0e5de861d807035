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

#include "chaincarve/record_io.hpp"

#include <algorithm>
#include <fstream>

#include <zlib.h>

#include <nlohmann/json.hpp>

#include "chaincarve/errors.hpp"

namespace chaincarve {

using nlohmann::json;

namespace {

bool is_gzip_path(const std::filesystem::path& path) {
    return path.extension() == ".gz";
}

}  // namespace

// --- LineReader ---

struct LineReader::Impl {
    std::ifstream plain;
    gzFile gz{nullptr};
    bool use_gz{false};
    std::string pending;   // carry-over between gz chunks
    bool gz_eof{false};

    ~Impl() {
        if (gz) gzclose(gz);
    }
};

LineReader::LineReader(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
    if (is_gzip_path(path)) {
        impl_->use_gz = true;
        impl_->gz = gzopen(path.string().c_str(), "rb");
        if (!impl_->gz) throw IoError("cannot open " + path.string());
    } else {
        impl_->plain.open(path, std::ios::binary);
        if (!impl_->plain) throw IoError("cannot open " + path.string());
    }
}

LineReader::~LineReader() = default;
LineReader::LineReader(LineReader&&) noexcept = default;
LineReader& LineReader::operator=(LineReader&&) noexcept = default;

std::optional<std::string> LineReader::next_line() {
    std::string line;
    if (!impl_->use_gz) {
        if (!std::getline(impl_->plain, line)) return std::nullopt;
    } else {
        // Accumulate gz chunks until a newline or EOF.
        for (;;) {
            auto nl = impl_->pending.find('\n');
            if (nl != std::string::npos) {
                line = impl_->pending.substr(0, nl);
                impl_->pending.erase(0, nl + 1);
                break;
            }
            if (impl_->gz_eof) {
                if (impl_->pending.empty()) return std::nullopt;
                line.swap(impl_->pending);
                break;
            }
            char buf[1 << 16];
            const int n = gzread(impl_->gz, buf, sizeof(buf));
            if (n < 0) throw IoError("gzip read error");
            if (n == 0) {
                impl_->gz_eof = true;
            } else {
                impl_->pending.append(buf, static_cast<std::size_t>(n));
            }
        }
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_number_;
    return line;
}

// --- LineWriter ---

struct LineWriter::Impl {
    std::ofstream plain;
    gzFile gz{nullptr};
    bool use_gz{false};
    std::string path;

    ~Impl() {
        if (gz) gzclose(gz);
    }
};

LineWriter::LineWriter(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
    impl_->path = path.string();
    if (is_gzip_path(path)) {
        impl_->use_gz = true;
        impl_->gz = gzopen(impl_->path.c_str(), "wb");
        if (!impl_->gz) throw IoError("cannot open " + impl_->path + " for writing");
    } else {
        impl_->plain.open(path, std::ios::binary | std::ios::trunc);
        if (!impl_->plain) throw IoError("cannot open " + impl_->path + " for writing");
    }
}

LineWriter::~LineWriter() = default;
LineWriter::LineWriter(LineWriter&&) noexcept = default;
LineWriter& LineWriter::operator=(LineWriter&&) noexcept = default;

void LineWriter::write_line(std::string_view line) {
    if (impl_->use_gz) {
        if (!impl_->gz) throw IoError("writer already closed");
        if (gzwrite(impl_->gz, line.data(), static_cast<unsigned>(line.size())) !=
                static_cast<int>(line.size()) ||
            gzwrite(impl_->gz, "\n", 1) != 1) {
            throw IoError("gzip write error on " + impl_->path);
        }
    } else {
        impl_->plain.write(line.data(), static_cast<std::streamsize>(line.size()));
        impl_->plain.put('\n');
        if (!impl_->plain) throw IoError("write error on " + impl_->path);
    }
}

void LineWriter::close() {
    if (impl_->use_gz) {
        if (impl_->gz) {
            if (gzclose(impl_->gz) != Z_OK) {
                impl_->gz = nullptr;
                throw IoError("gzip close error on " + impl_->path);
            }
            impl_->gz = nullptr;
        }
    } else if (impl_->plain.is_open()) {
        impl_->plain.close();
        if (impl_->plain.fail()) throw IoError("close error on " + impl_->path);
    }
}

// --- record JSON ---

std::string tx_record_to_json_line(const TxRecord& tx) {
    json j;
    j["block_number"] = tx.block_number;
    j["tx_index"] = tx.tx_index;
    j["tx_hash"] = tx.tx_hash;
    j["from_addr"] = tx.from_addr;
    if (tx.to_addr) {
        j["to_addr"] = *tx.to_addr;
    } else {
        j["to_addr"] = nullptr;
    }
    j["value"] = wei_to_hex(tx.value);
    j["input_hex"] = tx.input_hex;
    j["block_timestamp"] = tx.block_timestamp;
    return j.dump();
}

TxRecord tx_record_from_json_line(std::string_view line, std::size_t line_number) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what(), line_number);
    }
    try {
        TxRecord tx;
        tx.block_number = j.at("block_number").get<std::uint64_t>();
        tx.tx_index = j.at("tx_index").get<std::uint32_t>();
        tx.tx_hash = normalize_hex_field(j.at("tx_hash").get<std::string>(), 64, "tx_hash");
        tx.from_addr = normalize_hex_field(j.at("from_addr").get<std::string>(), 40, "from_addr");
        const auto& to = j.at("to_addr");
        if (!to.is_null()) {
            tx.to_addr = normalize_hex_field(to.get<std::string>(), 40, "to_addr");
        }
        tx.value = wei_from_hex(j.at("value").get<std::string>());
        tx.input_hex = normalize_hex_field(j.at("input_hex").get<std::string>(), 0, "input_hex");
        tx.block_timestamp = j.at("block_timestamp").get<std::uint64_t>();
        validate(tx);
        return tx;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad record: ") + e.what(), line_number);
    } catch (const FormatError& e) {
        throw FormatError(std::string("bad record: ") + e.what(), line_number);
    }
}

std::optional<TxRecord> RecordReader::next() {
    for (;;) {
        auto line = lines_.next_line();
        if (!line) return std::nullopt;
        if (line->empty()) continue;  // tolerate blank lines
        return tx_record_from_json_line(*line, lines_.line_number());
    }
}

bool RecordWriter::write(const TxRecord& tx) {
    if (skip_empty_input_ && !tx.has_input()) return false;
    lines_.write_line(tx_record_to_json_line(tx));
    ++count_;
    return true;
}

std::size_t write_records(const std::vector<TxRecord>& records, const std::filesystem::path& path,
                          bool skip_empty_input) {
    RecordWriter writer(path, skip_empty_input);
    for (const TxRecord& tx : records) writer.write(tx);
    writer.close();
    return writer.count();
}

std::vector<TxRecord> read_records(const std::filesystem::path& path) {
    RecordReader reader(path);
    std::vector<TxRecord> out;
    while (auto tx = reader.next()) out.push_back(std::move(*tx));
    return out;
}

// --- RecordStore ---

RecordStore::RecordStore(std::vector<TxRecord> records) : records_(std::move(records)) {
    std::sort(records_.begin(), records_.end(), [](const TxRecord& a, const TxRecord& b) {
        return std::tie(a.block_number, a.tx_index) < std::tie(b.block_number, b.tx_index);
    });
    for (std::size_t i = 0; i + 1 < records_.size(); ++i) {
        if (records_[i].block_number == records_[i + 1].block_number &&
            records_[i].tx_index == records_[i + 1].tx_index) {
            throw FormatError("duplicate (block_number, tx_index): (" +
                              std::to_string(records_[i].block_number) + ", " +
                              std::to_string(records_[i].tx_index) + ")");
        }
    }
    for (std::size_t i = 0; i < records_.size(); ++i) {
        by_sender_[records_[i].from_addr].push_back(i);
    }
}

RecordStore RecordStore::load(const std::filesystem::path& path) {
    return RecordStore(read_records(path));
}

std::uint64_t RecordStore::min_block() const {
    return records_.empty() ? 0 : records_.front().block_number;
}

std::uint64_t RecordStore::max_block() const {
    return records_.empty() ? 0 : records_.back().block_number;
}

std::vector<const TxRecord*> RecordStore::sender_range(std::string_view sender, std::uint64_t first,
                                                       std::uint64_t last) const {
    std::vector<const TxRecord*> out;
    auto it = by_sender_.find(std::string(sender));
    if (it == by_sender_.end()) return out;
    for (std::size_t idx : it->second) {
        const TxRecord& tx = records_[idx];
        if (tx.block_number < first || tx.block_number > last) continue;
        if (!tx.has_input()) continue;
        out.push_back(&tx);
    }
    return out;  // by_sender_ indices are already (block, tx_index) sorted
}

}  // namespace chaincarve

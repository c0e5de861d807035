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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chaincarve/tx_record.hpp"

namespace chaincarve {

/// Line-oriented reader over a plain or gzip-compressed file. Gzip is
/// selected by a ".gz" filename suffix.
class LineReader {
  public:
    explicit LineReader(const std::filesystem::path& path);
    ~LineReader();
    LineReader(LineReader&&) noexcept;
    LineReader& operator=(LineReader&&) noexcept;

    /// Next line without the trailing newline; nullopt at EOF.
    std::optional<std::string> next_line();
    std::size_t line_number() const { return line_number_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t line_number_{0};
};

class LineWriter {
  public:
    explicit LineWriter(const std::filesystem::path& path);
    ~LineWriter();
    LineWriter(LineWriter&&) noexcept;
    LineWriter& operator=(LineWriter&&) noexcept;

    void write_line(std::string_view line);
    void close();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string tx_record_to_json_line(const TxRecord& tx);
/// Throws FormatError carrying `line_number` on malformed rows.
TxRecord tx_record_from_json_line(std::string_view line, std::size_t line_number);

/// Streaming NDJSON record reader; validates every row.
class RecordReader {
  public:
    explicit RecordReader(const std::filesystem::path& path) : lines_(path) {}
    std::optional<TxRecord> next();

  private:
    LineReader lines_;
};

class RecordWriter {
  public:
    /// When skip_empty_input is set, records whose input carries no bytes are
    /// dropped at write time (kept by default).
    explicit RecordWriter(const std::filesystem::path& path, bool skip_empty_input = false)
        : lines_(path), skip_empty_input_(skip_empty_input) {}
    bool write(const TxRecord& tx);
    std::size_t count() const { return count_; }
    void close() { lines_.close(); }

  private:
    LineWriter lines_;
    bool skip_empty_input_;
    std::size_t count_{0};
};

std::size_t write_records(const std::vector<TxRecord>& records, const std::filesystem::path& path,
                          bool skip_empty_input = false);
std::vector<TxRecord> read_records(const std::filesystem::path& path);

/// In-memory record set indexed for reassembly lookups. Records are kept
/// sorted by (block_number, tx_index); that key must be unique.
class RecordStore {
  public:
    RecordStore() = default;
    explicit RecordStore(std::vector<TxRecord> records);
    static RecordStore load(const std::filesystem::path& path);

    const std::vector<TxRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    std::uint64_t min_block() const;
    std::uint64_t max_block() const;

    /// All records from `sender` with block_number in [first, last], with
    /// non-empty input, ordered by (block_number, tx_index).
    std::vector<const TxRecord*> sender_range(std::string_view sender, std::uint64_t first,
                                              std::uint64_t last) const;

  private:
    std::vector<TxRecord> records_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_sender_;
};

}  // namespace chaincarve

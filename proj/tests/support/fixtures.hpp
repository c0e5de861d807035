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

// Deterministic fixture builders shared by the carving, reassembly and
// acceptance suites.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaincarve/file_carve.hpp"
#include "chaincarve/tx_record.hpp"

namespace fixtures {

// splitmix64, local copy so test data does not depend on library internals
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
};

inline std::vector<std::uint8_t> random_bytes(Rng& rng, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng.next() & 0xFF);
    return out;
}

inline bool contains(std::span<const std::uint8_t> haystack, std::span<const std::uint8_t> needle) {
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

// offset of the first occurrence, or npos
inline std::size_t find_first(std::span<const std::uint8_t> haystack,
                              std::span<const std::uint8_t> needle, std::size_t from = 0) {
    if (from > haystack.size()) return std::string::npos;
    auto it = std::search(haystack.begin() + static_cast<std::ptrdiff_t>(from), haystack.end(),
                          needle.begin(), needle.end());
    if (it == haystack.end()) return std::string::npos;
    return static_cast<std::size_t>(it - haystack.begin());
}

inline std::vector<std::vector<std::uint8_t>> all_header_patterns(
    const chaincarve::SignatureRegistry& registry) {
    std::vector<std::vector<std::uint8_t>> out;
    for (const auto& e : registry.entries()) {
        for (const auto& h : e.header_variants) out.push_back(h);
    }
    return out;
}

inline std::vector<std::vector<std::uint8_t>> all_patterns(
    const chaincarve::SignatureRegistry& registry) {
    auto out = all_header_patterns(registry);
    for (const auto& e : registry.entries()) {
        for (const auto& t : e.trailer_variants) out.push_back(t);
    }
    return out;
}

/// A synthetic file of a registered type: header + random body + trailer (if
/// the type defines one). The interior is re-rolled until no own-type trailer
/// occurs before the real one, so a carve of the intact fixture is byte-exact.
inline std::vector<std::uint8_t> make_fixture(const chaincarve::SignatureRegistry& registry,
                                              const std::string& type, Rng& rng,
                                              std::size_t body_len) {
    const auto* entry = registry.find(type);
    if (!entry) throw std::runtime_error("unknown fixture type " + type);
    const auto& header = entry->header_variants[rng.below(entry->header_variants.size())];
    const std::vector<std::uint8_t>* trailer =
        entry->trailer_variants.empty()
            ? nullptr
            : &entry->trailer_variants[rng.below(entry->trailer_variants.size())];

    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::uint8_t> body;
        if (type == "html") {
            // keep the interior free of '<' and '>' so no tag markers arise
            body.reserve(body_len);
            static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz 0123456789.,;:\n";
            for (std::size_t i = 0; i < body_len; ++i) {
                body.push_back(static_cast<std::uint8_t>(alphabet[rng.below(sizeof(alphabet) - 1)]));
            }
        } else {
            body = random_bytes(rng, body_len);
        }
        std::vector<std::uint8_t> fixture;
        if (type == "html") fixture.push_back('<');  // "<html>" opening tag around the marker
        fixture.insert(fixture.end(), header.begin(), header.end());
        fixture.insert(fixture.end(), body.begin(), body.end());
        if (trailer) fixture.insert(fixture.end(), trailer->begin(), trailer->end());

        if (trailer) {
            // earliest own trailer after the header must be the final one
            std::size_t earliest = std::string::npos;
            for (const auto& t : entry->trailer_variants) {
                earliest = std::min(earliest, find_first(fixture, t, header.size()));
            }
            if (earliest != fixture.size() - trailer->size()) continue;
        }
        return fixture;
    }
    throw std::runtime_error("could not build a clean fixture for " + type);
}

/// Junk carrying no registry header pattern; safe to place before a fixture.
inline std::vector<std::uint8_t> make_junk(const chaincarve::SignatureRegistry& registry, Rng& rng,
                                           std::size_t len) {
    const auto headers = all_header_patterns(registry);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        auto junk = random_bytes(rng, len);
        bool clean = true;
        for (const auto& h : headers) {
            if (contains(junk, h)) {
                clean = false;
                break;
            }
        }
        if (clean) return junk;
    }
    throw std::runtime_error("could not build clean junk");
}

/// junk ++ fixture [++ junk] with a guarantee that the earliest header match
/// of any type in the assembled payload is the fixture's own.
struct Embedded {
    std::vector<std::uint8_t> payload;
    std::size_t fixture_offset{0};
};

inline Embedded embed_with_junk(const chaincarve::SignatureRegistry& registry, Rng& rng,
                                std::span<const std::uint8_t> fixture, std::size_t junk_before,
                                std::size_t junk_after) {
    const auto headers = all_header_patterns(registry);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Embedded out;
        auto before = make_junk(registry, rng, junk_before);
        out.payload = before;
        out.payload.insert(out.payload.end(), fixture.begin(), fixture.end());
        if (junk_after > 0) {
            auto after = random_bytes(rng, junk_after);
            out.payload.insert(out.payload.end(), after.begin(), after.end());
        }
        out.fixture_offset = junk_before;
        // reject payloads where junk (or a junk/fixture seam) forms a header
        // before the fixture's own
        std::size_t earliest = std::string::npos;
        for (const auto& h : headers) {
            earliest = std::min(earliest, find_first(out.payload, h));
        }
        std::size_t expected = std::string::npos;
        for (const auto& h : headers) {
            expected = std::min(expected, find_first(out.payload, h, junk_before));
        }
        if (earliest == expected) return out;
    }
    throw std::runtime_error("could not embed fixture cleanly");
}

/// Standard single-dynamic-bytes-argument calldata around a chunk:
/// selector ++ offset word (0x20) ++ length word ++ data ++ zero pad.
inline std::vector<std::uint8_t> abi_wrap(std::span<const std::uint8_t> chunk) {
    std::vector<std::uint8_t> out{0xb7, 0x60, 0xfa, 0xf9};  // uploadData(bytes)
    auto push_word = [&](std::uint64_t v) {
        for (int i = 0; i < 24; ++i) out.push_back(0);
        for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    };
    push_word(32);
    push_word(chunk.size());
    out.insert(out.end(), chunk.begin(), chunk.end());
    const std::size_t pad = (32 - chunk.size() % 32) % 32;
    out.insert(out.end(), pad, 0);
    return out;
}

inline std::string addr_hex(std::uint64_t i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "0x%040llx", static_cast<unsigned long long>(i));
    return buf;
}

inline std::string hash_hex(std::uint64_t i) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "0x%064llx", static_cast<unsigned long long>(i));
    return buf;
}

inline chaincarve::TxRecord make_tx(std::uint64_t block, std::uint32_t index, std::uint64_t hash_id,
                                    const std::string& from, std::optional<std::string> to,
                                    std::string input_hex, std::uint64_t timestamp = 0) {
    chaincarve::TxRecord tx;
    tx.block_number = block;
    tx.tx_index = index;
    tx.tx_hash = hash_hex(hash_id);
    tx.from_addr = from;
    tx.to_addr = std::move(to);
    tx.value = 0;
    tx.input_hex = std::move(input_hex);
    tx.block_timestamp = timestamp;
    return tx;
}

}  // namespace fixtures

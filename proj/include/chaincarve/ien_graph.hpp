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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace chaincarve {

enum class Category : std::uint8_t { file, link, chinese, english, all };

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

/// One classified embedding transaction: <from, to, category>.
struct EmbedRecord {
    std::string from;
    std::optional<std::string> to;
    Category category{Category::file};  // never `all`
};

/// Weighted directed multigraph of embedding behavior: nodes are addresses,
/// edge weights count embeddings from src to dst. Self-loops allowed.
struct IENGraph {
    Category category{Category::all};
    std::set<std::string> nodes;
    std::map<std::pair<std::string, std::string>, std::uint64_t> edges;
    /// Records without a recipient (contract creations) are excluded and
    /// counted here.
    std::uint64_t skipped_no_recipient{0};

    std::uint64_t total_weight() const;
    std::uint64_t edge_count() const { return edges.size(); }
    std::uint64_t node_count() const { return nodes.size(); }
    void add(const std::string& from, const std::string& to, std::uint64_t weight = 1);
    /// Weight maps add; node sets union. Categories must match.
    void merge(const IENGraph& other);

    bool operator==(const IENGraph& other) const {
        return category == other.category && nodes == other.nodes && edges == other.edges;
    }
};

IENGraph build_ien(const std::vector<EmbedRecord>& records, Category filter);

struct DegreeStats {
    std::uint64_t node_count{0};
    std::uint64_t edge_count{0};
    std::uint64_t total_weight{0};
    std::map<std::uint64_t, std::uint64_t> in_histogram;     // weighted degree -> #nodes
    std::map<std::uint64_t, std::uint64_t> out_histogram;
    std::map<std::uint64_t, std::uint64_t> total_histogram;  // in + out
    double fraction_embed_once{0.0};  // senders with out-weight exactly 1
    double fraction_embed_lt6{0.0};   // senders with out-weight < 6
    std::vector<std::pair<std::string, std::uint64_t>> top_in;   // k best, ties by address
    std::vector<std::pair<std::string, std::uint64_t>> top_out;
};

DegreeStats degree_stats(const IENGraph& graph, unsigned k);

enum class GraphFormat : std::uint8_t { edgelist_csv, dot, graphml };

std::string_view to_string(GraphFormat f);
std::optional<GraphFormat> graph_format_from_string(std::string_view s);

/// Canonical, re-importable serializations; edges ascending by (src, dst).
void export_graph(const IENGraph& graph, GraphFormat format, const std::filesystem::path& path);
IENGraph import_graph(const std::filesystem::path& path, GraphFormat format,
                      Category category = Category::all);

/// "degree,count" CSV for one histogram.
void write_degree_histogram_csv(const std::map<std::uint64_t, std::uint64_t>& histogram,
                                const std::filesystem::path& path);

}  // namespace chaincarve

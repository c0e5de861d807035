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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "chaincarve/ien_graph.hpp"
#include "support/fixtures.hpp"

using namespace chaincarve;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    auto dir = fs::temp_directory_path() / (std::string("chaincarve_graph_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

EmbedRecord rec(std::uint64_t from, std::uint64_t to, Category c = Category::english) {
    return {fixtures::addr_hex(from), fixtures::addr_hex(to), c};
}

IENGraph random_graph(fixtures::Rng& rng) {
    std::vector<EmbedRecord> records;
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) {
        records.push_back(rec(1 + rng.below(12), 1 + rng.below(12)));
    }
    return build_ien(records, Category::all);
}

}  // namespace

TEST_CASE("build_ien counts embeddings as edge weights") {
    const auto graph = build_ien({rec(1, 2), rec(1, 2), rec(1, 3)}, Category::all);
    CHECK(graph.node_count() == 3);
    CHECK(graph.edge_count() == 2);
    CHECK(graph.edges.at({fixtures::addr_hex(1), fixtures::addr_hex(2)}) == 2);
    CHECK(graph.edges.at({fixtures::addr_hex(1), fixtures::addr_hex(3)}) == 1);
    CHECK(graph.total_weight() == 3);
}

TEST_CASE("self-loops are permitted") {
    const auto graph = build_ien({rec(7, 7)}, Category::all);
    CHECK(graph.node_count() == 1);
    CHECK(graph.edges.at({fixtures::addr_hex(7), fixtures::addr_hex(7)}) == 1);
}

TEST_CASE("empty stream builds an empty graph") {
    const auto graph = build_ien({}, Category::all);
    CHECK(graph.node_count() == 0);
    CHECK(graph.edge_count() == 0);
    const auto stats = degree_stats(graph, 3);
    CHECK(stats.fraction_embed_once == 0.0);
    CHECK(stats.fraction_embed_lt6 == 0.0);
}

TEST_CASE("category filter selects records; all keeps everything") {
    const std::vector<EmbedRecord> records{
        rec(1, 2, Category::chinese), rec(3, 4, Category::english), rec(5, 6, Category::file),
        rec(7, 8, Category::link)};
    CHECK(build_ien(records, Category::all).total_weight() == 4);
    CHECK(build_ien(records, Category::chinese).total_weight() == 1);
    CHECK(build_ien(records, Category::link).total_weight() == 1);
    CHECK(build_ien(records, Category::file).edges.count(
              {fixtures::addr_hex(5), fixtures::addr_hex(6)}) == 1);
}

TEST_CASE("records without recipients are skipped and counted") {
    std::vector<EmbedRecord> records{rec(1, 2)};
    records.push_back({fixtures::addr_hex(3), std::nullopt, Category::english});
    const auto graph = build_ien(records, Category::all);
    CHECK(graph.total_weight() == 1);
    CHECK(graph.skipped_no_recipient == 1);
    CHECK(graph.nodes.count(fixtures::addr_hex(3)) == 0);
}

TEST_CASE("build_ien is order independent") {
    fixtures::Rng rng(60);
    std::vector<EmbedRecord> records;
    for (int i = 0; i < 200; ++i) records.push_back(rec(1 + rng.below(10), 1 + rng.below(10)));
    auto shuffled = records;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    }
    CHECK(build_ien(records, Category::all) == build_ien(shuffled, Category::all));
}

TEST_CASE("degree_stats on a tiny graph") {
    const auto graph = build_ien({rec(1, 2), rec(1, 2), rec(1, 3)}, Category::all);
    const auto stats = degree_stats(graph, 2);
    CHECK(stats.total_weight == 3);
    // A is the only sender, with out-weight 3
    CHECK(stats.fraction_embed_once == 0.0);
    CHECK(stats.fraction_embed_lt6 == 1.0);
    CHECK(stats.out_histogram.at(3) == 1);  // A
    CHECK(stats.out_histogram.at(0) == 2);  // B, C
    CHECK(stats.in_histogram.at(2) == 1);   // B
    REQUIRE(!stats.top_out.empty());
    CHECK(stats.top_out[0].first == fixtures::addr_hex(1));
    CHECK(stats.top_out[0].second == 3);
}

TEST_CASE("top-k ranking breaks ties lexicographically") {
    const auto graph = build_ien({rec(1, 2), rec(1, 2), rec(3, 2)}, Category::all);
    const auto stats = degree_stats(graph, 1);
    REQUIRE(stats.top_in.size() == 1);
    CHECK(stats.top_in[0].first == fixtures::addr_hex(2));
    REQUIRE(stats.top_out.size() == 1);
    CHECK(stats.top_out[0].first == fixtures::addr_hex(1));  // weight 2 beats 1
}

TEST_CASE("synthetic 100-sender corpus reproduces the 77% / 95% fractions") {
    // 77 senders embed once, 18 embed 2..5 times, 5 embed >= 6 times
    std::vector<EmbedRecord> records;
    fixtures::Rng rng(61);
    std::uint64_t sender = 0;
    for (int i = 0; i < 77; ++i) {
        records.push_back(rec(1000 + sender, 2000 + rng.below(40)));
        ++sender;
    }
    for (int i = 0; i < 18; ++i) {
        const auto times = 2 + rng.below(4);  // 2..5
        for (std::uint64_t t = 0; t < times; ++t) {
            records.push_back(rec(1000 + sender, 2000 + rng.below(40)));
        }
        ++sender;
    }
    for (int i = 0; i < 5; ++i) {
        const auto times = 6 + rng.below(10);  // >= 6
        for (std::uint64_t t = 0; t < times; ++t) {
            records.push_back(rec(1000 + sender, 2000 + rng.below(40)));
        }
        ++sender;
    }
    // receivers are a disjoint id range, so sender count is exactly 100
    const auto graph = build_ien(records, Category::all);
    const auto stats = degree_stats(graph, 10);
    CHECK(stats.fraction_embed_once == doctest::Approx(0.77).epsilon(1e-12));
    CHECK(stats.fraction_embed_lt6 == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("conservation and degree-sum equality on random graphs") {
    fixtures::Rng rng(62);
    for (int i = 0; i < 300; ++i) {
        std::vector<EmbedRecord> records;
        const std::size_t n = 1 + rng.below(80);
        for (std::size_t k = 0; k < n; ++k) {
            records.push_back(rec(1 + rng.below(15), 1 + rng.below(15)));
        }
        const auto graph = build_ien(records, Category::all);
        CHECK(graph.total_weight() == n);  // conservation
        std::uint64_t out_sum = 0, in_sum = 0;
        const auto stats = degree_stats(graph, 3);
        for (const auto& [deg, cnt] : stats.out_histogram) out_sum += deg * cnt;
        for (const auto& [deg, cnt] : stats.in_histogram) in_sum += deg * cnt;
        CHECK(out_sum == n);
        CHECK(in_sum == n);
    }
}

TEST_CASE("edgelist export is bit-exact") {
    const auto dir = temp_dir("edgelist");
    IENGraph graph;
    graph.category = Category::all;
    graph.add("A", "B", 2);
    export_graph(graph, GraphFormat::edgelist_csv, dir / "g.csv");
    std::ifstream in(dir / "g.csv", std::ios::binary);
    const std::string content((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    CHECK(content == "src,dst,weight\nA,B,2\n");
}

TEST_CASE("empty graph exports a header-only CSV") {
    const auto dir = temp_dir("emptycsv");
    IENGraph graph;
    export_graph(graph, GraphFormat::edgelist_csv, dir / "g.csv");
    std::ifstream in(dir / "g.csv", std::ios::binary);
    const std::string content((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    CHECK(content == "src,dst,weight\n");
    CHECK(import_graph(dir / "g.csv", GraphFormat::edgelist_csv) == IENGraph{});
}

TEST_CASE("export/import round-trips for all three formats") {
    const auto dir = temp_dir("roundtrip");
    fixtures::Rng rng(63);
    for (int i = 0; i < 50; ++i) {
        const auto graph = random_graph(rng);
        for (const auto format :
             {GraphFormat::edgelist_csv, GraphFormat::dot, GraphFormat::graphml}) {
            const auto path = dir / ("g" + std::to_string(i) + "." + std::string(to_string(format)));
            export_graph(graph, format, path);
            CHECK(import_graph(path, format) == graph);
        }
    }
}

TEST_CASE("merge adds weight maps") {
    IENGraph a;
    a.add("x", "y", 1);
    IENGraph b;
    b.add("x", "y", 2);
    b.add("y", "z", 1);
    a.merge(b);
    CHECK(a.edges.at({"x", "y"}) == 3);
    CHECK(a.edges.at({"y", "z"}) == 1);
    CHECK(a.nodes.size() == 3);
}

TEST_CASE("degree histogram CSV") {
    const auto dir = temp_dir("hist");
    const auto graph = build_ien({rec(1, 2), rec(1, 2), rec(3, 2)}, Category::all);
    const auto stats = degree_stats(graph, 2);
    write_degree_histogram_csv(stats.in_histogram, dir / "in.csv");
    std::ifstream in(dir / "in.csv", std::ios::binary);
    const std::string content((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    CHECK(content == "degree,count\n0,2\n3,1\n");
}

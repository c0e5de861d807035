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

#include "chaincarve/ien_graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>

#include "chaincarve/errors.hpp"

namespace chaincarve {

std::string_view to_string(Category c) {
    switch (c) {
        case Category::file: return "file";
        case Category::link: return "link";
        case Category::chinese: return "chinese";
        case Category::english: return "english";
        case Category::all: return "all";
    }
    return "all";
}

std::optional<Category> category_from_string(std::string_view s) {
    if (s == "file") return Category::file;
    if (s == "link") return Category::link;
    if (s == "chinese") return Category::chinese;
    if (s == "english") return Category::english;
    if (s == "all") return Category::all;
    return std::nullopt;
}

std::uint64_t IENGraph::total_weight() const {
    std::uint64_t total = 0;
    for (const auto& [edge, w] : edges) total += w;
    return total;
}

void IENGraph::add(const std::string& from, const std::string& to, std::uint64_t weight) {
    nodes.insert(from);
    nodes.insert(to);
    edges[{from, to}] += weight;
}

void IENGraph::merge(const IENGraph& other) {
    if (category != other.category) throw Error("cannot merge graphs of different categories");
    nodes.insert(other.nodes.begin(), other.nodes.end());
    for (const auto& [edge, w] : other.edges) edges[edge] += w;
    skipped_no_recipient += other.skipped_no_recipient;
}

IENGraph build_ien(const std::vector<EmbedRecord>& records, Category filter) {
    IENGraph graph;
    graph.category = filter;
    for (const auto& rec : records) {
        if (filter != Category::all && rec.category != filter) continue;
        if (!rec.to) {
            ++graph.skipped_no_recipient;
            continue;
        }
        graph.add(rec.from, *rec.to);
    }
    return graph;
}

DegreeStats degree_stats(const IENGraph& graph, unsigned k) {
    DegreeStats stats;
    stats.node_count = graph.node_count();
    stats.edge_count = graph.edge_count();
    stats.total_weight = graph.total_weight();

    std::unordered_map<std::string, std::uint64_t> in_w, out_w;
    for (const auto& [edge, w] : graph.edges) {
        out_w[edge.first] += w;
        in_w[edge.second] += w;
    }

    std::uint64_t senders = 0, once = 0, lt6 = 0;
    for (const auto& node : graph.nodes) {
        const auto in_it = in_w.find(node);
        const auto out_it = out_w.find(node);
        const std::uint64_t in_deg = in_it == in_w.end() ? 0 : in_it->second;
        const std::uint64_t out_deg = out_it == out_w.end() ? 0 : out_it->second;
        stats.in_histogram[in_deg]++;
        stats.out_histogram[out_deg]++;
        stats.total_histogram[in_deg + out_deg]++;
        if (out_deg >= 1) {
            ++senders;
            if (out_deg == 1) ++once;
            if (out_deg < 6) ++lt6;
        }
    }
    if (senders > 0) {
        stats.fraction_embed_once = static_cast<double>(once) / static_cast<double>(senders);
        stats.fraction_embed_lt6 = static_cast<double>(lt6) / static_cast<double>(senders);
    }

    const auto top_k = [&](const std::unordered_map<std::string, std::uint64_t>& degrees) {
        std::vector<std::pair<std::string, std::uint64_t>> ranked(degrees.begin(), degrees.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (ranked.size() > k) ranked.resize(k);
        return ranked;
    };
    stats.top_in = top_k(in_w);
    stats.top_out = top_k(out_w);
    return stats;
}

std::string_view to_string(GraphFormat f) {
    switch (f) {
        case GraphFormat::edgelist_csv: return "edgelist";
        case GraphFormat::dot: return "dot";
        case GraphFormat::graphml: return "graphml";
    }
    return "edgelist";
}

std::optional<GraphFormat> graph_format_from_string(std::string_view s) {
    if (s == "edgelist" || s == "edgelist_csv" || s == "csv") return GraphFormat::edgelist_csv;
    if (s == "dot") return GraphFormat::dot;
    if (s == "graphml") return GraphFormat::graphml;
    return std::nullopt;
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void export_edgelist(const IENGraph& graph, std::ostream& out) {
    out << "src,dst,weight\n";
    for (const auto& [edge, w] : graph.edges) {
        out << edge.first << ',' << edge.second << ',' << w << '\n';
    }
}

void export_dot(const IENGraph& graph, std::ostream& out) {
    out << "digraph ien {\n";
    for (const auto& node : graph.nodes) {
        out << "  \"" << node << "\";\n";
    }
    for (const auto& [edge, w] : graph.edges) {
        out << "  \"" << edge.first << "\" -> \"" << edge.second << "\" [weight=" << w << "];\n";
    }
    out << "}\n";
}

void export_graphml(const IENGraph& graph, std::ostream& out) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"w\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
        << "  <graph id=\"ien\" edgedefault=\"directed\">\n";
    for (const auto& node : graph.nodes) {
        out << "    <node id=\"" << xml_escape(node) << "\"/>\n";
    }
    for (const auto& [edge, w] : graph.edges) {
        out << "    <edge source=\"" << xml_escape(edge.first) << "\" target=\""
            << xml_escape(edge.second) << "\"><data key=\"w\">" << w << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
    std::uint64_t v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError("bad weight \"" + std::string(s) + "\"", line);
    }
    return v;
}

IENGraph import_edgelist(std::istream& in, Category category) {
    IENGraph graph;
    graph.category = category;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "src,dst,weight") throw FormatError("missing edgelist header", lineno);
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw FormatError("bad edgelist row", lineno);
        }
        graph.add(line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1),
                  parse_u64(std::string_view(line).substr(c2 + 1), lineno));
    }
    return graph;
}

// tolerant scanners for the two structured formats; they accept exactly the
// canonical layout export_graph emits

std::optional<std::string> quoted_token(std::string_view s, std::size_t& pos) {
    const auto open = s.find('"', pos);
    if (open == std::string_view::npos) return std::nullopt;
    const auto close = s.find('"', open + 1);
    if (close == std::string_view::npos) return std::nullopt;
    pos = close + 1;
    return std::string(s.substr(open + 1, close - open - 1));
}

IENGraph import_dot(std::istream& in, Category category) {
    IENGraph graph;
    graph.category = category;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view view = line;
        if (view.find('"') == std::string_view::npos) continue;
        std::size_t pos = 0;
        auto first = quoted_token(view, pos);
        if (!first) continue;
        if (view.find("->", pos) != std::string_view::npos) {
            auto second = quoted_token(view, pos);
            const auto weight_at = view.find("weight=");
            if (!second || weight_at == std::string_view::npos) {
                throw FormatError("bad dot edge", lineno);
            }
            auto rest = view.substr(weight_at + 7);
            const auto end = rest.find(']');
            if (end == std::string_view::npos) throw FormatError("bad dot edge", lineno);
            graph.add(*first, *second, parse_u64(rest.substr(0, end), lineno));
        } else {
            graph.nodes.insert(*first);
        }
    }
    return graph;
}

std::optional<std::string> xml_attr(std::string_view tag, std::string_view name) {
    const std::string probe = std::string(name) + "=\"";
    const auto at = tag.find(probe);
    if (at == std::string_view::npos) return std::nullopt;
    const auto start = at + probe.size();
    const auto end = tag.find('"', start);
    if (end == std::string_view::npos) return std::nullopt;
    std::string raw(tag.substr(start, end - start));
    // unescape the entities xml_escape produces
    const std::pair<std::string_view, char> entities[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}};
    std::string out;
    for (std::size_t i = 0; i < raw.size();) {
        bool matched = false;
        for (const auto& [ent, ch] : entities) {
            if (raw.compare(i, ent.size(), ent) == 0) {
                out += ch;
                i += ent.size();
                matched = true;
                break;
            }
        }
        if (!matched) out += raw[i++];
    }
    return out;
}

IENGraph import_graphml(std::istream& in, Category category) {
    IENGraph graph;
    graph.category = category;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view view = line;
        if (view.find("<node ") != std::string_view::npos) {
            auto id = xml_attr(view, "id");
            if (!id) throw FormatError("node without id", lineno);
            graph.nodes.insert(*id);
        } else if (view.find("<edge ") != std::string_view::npos) {
            auto src = xml_attr(view, "source");
            auto dst = xml_attr(view, "target");
            const auto data_at = view.find("<data key=\"w\">");
            if (!src || !dst || data_at == std::string_view::npos) {
                throw FormatError("bad graphml edge", lineno);
            }
            auto rest = view.substr(data_at + 14);
            const auto end = rest.find('<');
            if (end == std::string_view::npos) throw FormatError("bad graphml edge", lineno);
            graph.add(*src, *dst, parse_u64(rest.substr(0, end), lineno));
        }
    }
    return graph;
}

}  // namespace

void export_graph(const IENGraph& graph, GraphFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    switch (format) {
        case GraphFormat::edgelist_csv: export_edgelist(graph, out); break;
        case GraphFormat::dot: export_dot(graph, out); break;
        case GraphFormat::graphml: export_graphml(graph, out); break;
    }
    out.close();
    if (out.fail()) throw IoError("write error on " + path.string());
}

IENGraph import_graph(const std::filesystem::path& path, GraphFormat format, Category category) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    switch (format) {
        case GraphFormat::edgelist_csv: return import_edgelist(in, category);
        case GraphFormat::dot: return import_dot(in, category);
        case GraphFormat::graphml: return import_graphml(in, category);
    }
    throw Error("unreachable");
}

void write_degree_histogram_csv(const std::map<std::uint64_t, std::uint64_t>& histogram,
                                const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "degree,count\n";
    for (const auto& [degree, count] : histogram) out << degree << ',' << count << '\n';
    out.close();
    if (out.fail()) throw IoError("write error on " + path.string());
}

}  // namespace chaincarve

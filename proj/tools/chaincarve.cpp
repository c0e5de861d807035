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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chaincarve/errors.hpp"
#include "chaincarve/file_carve.hpp"
#include "chaincarve/ien_graph.hpp"
#include "chaincarve/pipeline.hpp"
#include "chaincarve/reassembly.hpp"
#include "chaincarve/record_io.hpp"
#include "chaincarve/report.hpp"
#include "chaincarve/rpc_client.hpp"
#include "chaincarve/sentiment.hpp"
#include "chaincarve/text_restore.hpp"

namespace fs = std::filesystem;
using namespace chaincarve;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitTransport = 3;

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

struct FetchArgs {
    std::string rpc_url;
    std::uint64_t from_block{0};
    std::uint64_t to_block{0};
    fs::path out;
    unsigned parallelism{4};
    bool trace_block{false};
    bool gzip{false};
    bool skip_empty_input{false};
};

int run_fetch(const FetchArgs& args) {
    if (args.rpc_url.empty()) {
        std::cerr << "no RPC endpoint: pass --rpc-url or set CHAINCARVE_RPC_URL\n";
        return kExitUsage;
    }
    ensure_dir(args.out / "records");
    const fs::path path =
        args.out / "records" / (args.gzip ? "records.ndjson.gz" : "records.ndjson");

    RpcOptions options;
    options.url = args.rpc_url;
    options.use_trace_block = args.trace_block;

    RecordWriter writer(path, args.skip_empty_input);
    std::uint64_t blocks = 0;
    auto report = fetch_range(options, args.from_block, args.to_block, args.parallelism,
                              [&](BlockRecord&& block) {
                                  for (const TxRecord& tx : block.txs) writer.write(tx);
                                  ++blocks;
                              });
    writer.close();

    std::cout << "fetched " << blocks << " blocks, " << writer.count() << " records -> " << path
              << "\n";
    if (report.total_retries > 0) std::cout << "retries: " << report.total_retries << "\n";
    if (!report.ok()) {
        for (const auto& [block, error] : report.failures) {
            std::cerr << "block " << block << " failed: " << error << "\n";
        }
        return kExitTransport;
    }
    return kExitOk;
}

struct ScanArgs {
    fs::path records;
    fs::path out;
    unsigned min_chars{RestorePolicy{}.min_chars};
    double min_keep_ratio{RestorePolicy{}.min_keep_ratio};
    bool dedupe{false};
    unsigned threads{1};
    std::string image_classifier_cmd;
    fs::path registry_file;
};

int run_scan(const ScanArgs& args) {
    ensure_dir(args.out);
    ensure_dir(args.out / "report");

    auto records = read_records(args.records);

    ScanOptions options;
    options.policy.min_chars = args.min_chars;
    options.policy.min_keep_ratio = args.min_keep_ratio;
    options.policy.dedupe = args.dedupe;
    options.threads = args.threads;
    options.files_dir = args.out / "files";
    options.image_classifier_cmd = args.image_classifier_cmd;
    if (!args.registry_file.empty()) {
        options.registry.merge_extension_file(args.registry_file);
    }

    auto outcome = scan_records(records, options);

    write_texts(outcome.texts, args.out / "texts.ndjson");
    {
        std::ofstream summary(args.out / "report" / "summary.json");
        summary << scan_report_to_json(outcome.report) << "\n";
    }
    std::cout << scan_report_to_json(outcome.report) << "\n";
    return kExitOk;
}

struct ReassembleArgs {
    fs::path records;
    fs::path out;
    std::uint64_t window_blocks{kDefaultWindowBlocks};
    std::string chunk_mode{"raw"};
};

int run_reassemble(const ReassembleArgs& args) {
    ensure_dir(args.out / "files");
    const auto registry = SignatureRegistry::builtin();
    auto store = RecordStore::load(args.records);

    const ChunkMode mode = args.chunk_mode == "abi-bytes" ? ChunkMode::abi_bytes : ChunkMode::raw;
    std::uint64_t attempted = 0, completed = 0;
    for (const TxRecord& tx : store.records()) {
        if (!tx.has_input()) continue;
        auto carved = carve_file(tx.input_hex, registry, tx.tx_hash);
        if (!carved || carved->completeness != Completeness::truncated) continue;

        ReassemblyJob job{tx, args.window_blocks, mode};
        auto candidates = find_candidates(job, store);
        if (candidates.window_incomplete) {
            std::cerr << "warning: store does not cover the full window after block "
                      << tx.block_number << "\n";
        }
        std::vector<ChunkInfo> chunks;
        auto result = reassemble(job, candidates.txs, registry, &chunks);
        if (!result) continue;
        ++attempted;
        if (result->completeness == Completeness::complete) ++completed;
        SidecarExtras extras;
        extras.block_number = tx.block_number;
        extras.chunks = std::move(chunks);
        write_carved(*result, args.out / "files", extras);
    }
    std::cout << "reassembly jobs: " << attempted << ", completed files: " << completed << "\n";
    return kExitOk;
}

struct TrainArgs {
    fs::path corpus;
    fs::path model;
    TrainParams params;
};

int run_train(const TrainArgs& args) {
    auto corpus = read_tsv_corpus(args.corpus);
    auto model = train(corpus, args.params);
    if (!args.model.parent_path().empty()) ensure_dir(args.model.parent_path());
    save_model(model, args.model);
    std::cout << "trained on " << corpus.size() << " examples -> " << args.model << "\n";
    return kExitOk;
}

struct ClassifyArgs {
    fs::path model;
    fs::path texts;
    fs::path out;
    double min_prob{0.0};
};

int run_classify(const ClassifyArgs& args) {
    auto model = load_model(args.model);
    auto texts = read_texts(args.texts);
    ensure_dir(args.out / "report");
    const fs::path path = args.out / "report" / "predictions.ndjson";
    LineWriter writer(path);
    std::uint64_t written = 0;
    for (const auto& text : texts) {
        const auto pred = predict(model, text.text);
        if (pred.probability < args.min_prob) continue;
        json j;
        j["tx"] = text.origin_tx;
        j["label"] = std::string(label_name(pred.label));
        j["probability"] = pred.probability;
        writer.write_line(j.dump());
        ++written;
    }
    writer.close();
    std::cout << "classified " << texts.size() << " texts, wrote " << written << " -> " << path
              << "\n";
    return kExitOk;
}

struct EvaluateArgs {
    fs::path model;
    fs::path corpus;
};

int run_evaluate(const EvaluateArgs& args) {
    auto model = load_model(args.model);
    auto corpus = read_tsv_corpus(args.corpus);
    auto ev = evaluate(model, corpus);
    json j;
    j["accuracy"] = ev.accuracy;
    j["total"] = ev.total;
    json confusion = json::array();
    json normalized = json::array();
    const auto norm = ev.row_normalized();
    for (std::size_t r = 0; r < kLabelCount; ++r) {
        confusion.push_back(ev.confusion[r]);
        normalized.push_back(norm[r]);
    }
    j["confusion"] = confusion;
    j["confusion_row_normalized"] = normalized;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

struct GraphArgs {
    fs::path texts;
    fs::path out;
    std::string category{"all"};
    std::string format{"edgelist"};
    unsigned top_k{10};
};

int run_graph(const GraphArgs& args) {
    const auto category = category_from_string(args.category);
    if (!category) {
        std::cerr << "unknown category: " << args.category << "\n";
        return kExitUsage;
    }
    const auto format = graph_format_from_string(args.format);
    if (!format) {
        std::cerr << "unknown format: " << args.format << "\n";
        return kExitUsage;
    }
    auto texts = read_texts(args.texts);
    std::vector<EmbedRecord> records;
    records.reserve(texts.size());
    for (const auto& text : texts) {
        records.push_back({text.from_addr, text.to_addr, category_of(text.kind)});
    }
    auto graph = build_ien(records, *category);

    ensure_dir(args.out / "graph");
    const char* ext = *format == GraphFormat::edgelist_csv ? ".csv"
                      : *format == GraphFormat::dot        ? ".dot"
                                                           : ".graphml";
    const fs::path graph_path = args.out / "graph" / (args.category + std::string(ext));
    export_graph(graph, *format, graph_path);

    auto stats = degree_stats(graph, args.top_k);
    write_degree_histogram_csv(stats.in_histogram,
                               args.out / "graph" / (args.category + "_degree_in.csv"));
    write_degree_histogram_csv(stats.out_histogram,
                               args.out / "graph" / (args.category + "_degree_out.csv"));
    write_degree_histogram_csv(stats.total_histogram,
                               args.out / "graph" / (args.category + "_degree.csv"));

    json j;
    j["category"] = args.category;
    j["nodes"] = stats.node_count;
    j["edges"] = stats.edge_count;
    j["total_weight"] = stats.total_weight;
    j["fraction_embed_once"] = stats.fraction_embed_once;
    j["fraction_embed_lt6"] = stats.fraction_embed_lt6;
    json top_in = json::array(), top_out = json::array();
    for (const auto& [addr, w] : stats.top_in) top_in.push_back({{"address", addr}, {"weight", w}});
    for (const auto& [addr, w] : stats.top_out) top_out.push_back({{"address", addr}, {"weight", w}});
    j["top_in"] = top_in;
    j["top_out"] = top_out;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

struct ReportArgs {
    fs::path texts;
    fs::path records;  // optional: supplies timestamps for quarter mode
    fs::path files_dir;
    fs::path out;
    fs::path stopwords;
    std::string bucket_mode{"per-million-blocks"};
    unsigned top_k{100};
};

std::vector<CountedItem> file_items_from_sidecars(const fs::path& files_dir) {
    std::vector<CountedItem> items;
    if (files_dir.empty() || !fs::exists(files_dir)) return items;
    std::vector<fs::path> sidecars;
    for (const auto& entry : fs::recursive_directory_iterator(files_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            sidecars.push_back(entry.path());
        }
    }
    std::sort(sidecars.begin(), sidecars.end());
    for (const auto& path : sidecars) {
        std::ifstream in(path);
        json j;
        try {
            in >> j;
        } catch (const json::parse_error&) {
            continue;
        }
        CountedItem item;
        item.category = j.value("file_type", "unknown");
        item.block_number = j.value("block_number", std::uint64_t{0});
        items.push_back(std::move(item));
    }
    return items;
}

int run_report(const ReportArgs& args) {
    ensure_dir(args.out / "report");
    auto texts = read_texts(args.texts);

    std::map<std::uint64_t, std::uint64_t> block_ts;
    if (!args.records.empty()) {
        for (const auto& tx : read_records(args.records)) {
            block_ts[tx.block_number] = tx.block_timestamp;
        }
    }

    std::vector<CountedItem> items;
    std::vector<std::string> corpus;
    for (const auto& text : texts) {
        CountedItem item{std::string(to_string(text.kind)), text.block_number, std::nullopt};
        if (auto it = block_ts.find(text.block_number); it != block_ts.end()) {
            item.timestamp = it->second;
        }
        items.push_back(std::move(item));
        corpus.push_back(text.text);
    }
    auto file_items = file_items_from_sidecars(args.files_dir);
    std::vector<std::string> carved_types;
    for (auto& item : file_items) {
        carved_types.push_back(item.category);
        if (auto it = block_ts.find(item.block_number); it != block_ts.end()) {
            item.timestamp = it->second;
        }
        items.push_back(std::move(item));
    }

    const auto registry = SignatureRegistry::builtin();
    auto report = category_counts(texts, carved_types, registry);
    {
        std::ofstream summary(args.out / "report" / "summary.json");
        summary << scan_report_to_json(report) << "\n";
    }

    const BucketMode mode = args.bucket_mode == "quarter" ? BucketMode::quarter
                                                          : BucketMode::per_million_blocks;
    auto buckets = temporal_buckets(items, mode);
    write_buckets_csv(buckets, args.out / "report" / "buckets.csv");

    const auto stopwords =
        args.stopwords.empty() ? default_stopwords() : load_stopwords(args.stopwords);
    auto ranked = word_frequency(corpus, stopwords, args.top_k);
    write_wordfreq_csv(ranked, args.out / "report" / "wordfreq.csv");

    std::cout << "report written under " << (args.out / "report") << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chaincarve: restore and analyze data embedded in Ethereum transaction inputs"};
    app.require_subcommand(1);

    const char* env_url = std::getenv("CHAINCARVE_RPC_URL");

    FetchArgs fetch_args;
    if (env_url) fetch_args.rpc_url = env_url;
    auto* fetch = app.add_subcommand("fetch", "Fetch a block range over JSON-RPC into NDJSON records");
    fetch->add_option("--rpc-url", fetch_args.rpc_url, "JSON-RPC endpoint (or CHAINCARVE_RPC_URL)");
    fetch->add_option("--from-block", fetch_args.from_block, "First block")->required();
    fetch->add_option("--to-block", fetch_args.to_block, "Last block (inclusive)")->required();
    fetch->add_option("--out", fetch_args.out, "Output directory")->required();
    fetch->add_option("--parallelism", fetch_args.parallelism, "Concurrent block fetches");
    fetch->add_flag("--trace-block", fetch_args.trace_block, "Use trace_block instead of eth_getBlockByNumber");
    fetch->add_flag("--gzip", fetch_args.gzip, "Write gzip-compressed records");
    fetch->add_flag("--skip-empty-input", fetch_args.skip_empty_input,
                    "Drop records whose input carries no bytes");

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "Restore texts and carve files from records");
    scan->add_option("--records", scan_args.records, "Records NDJSON (.gz ok)")->required();
    scan->add_option("--out", scan_args.out, "Output directory")->required();
    scan->add_option("--policy-min-chars", scan_args.min_chars, "Minimum restored characters");
    scan->add_option("--policy-min-keep-ratio", scan_args.min_keep_ratio, "Minimum kept-byte ratio");
    scan->add_flag("--dedupe", scan_args.dedupe, "Fold exact-duplicate texts");
    scan->add_option("--threads", scan_args.threads, "Worker threads");
    scan->add_option("--image-classifier-cmd", scan_args.image_classifier_cmd,
                     "External image classifier command");
    scan->add_option("--registry", scan_args.registry_file, "Signature registry extension JSON");

    ReassembleArgs reassemble_args;
    auto* reassemble = app.add_subcommand("reassemble", "Reassemble files split across transactions");
    reassemble->add_option("--records", reassemble_args.records, "Records NDJSON (.gz ok)")->required();
    reassemble->add_option("--out", reassemble_args.out, "Output directory")->required();
    reassemble->add_option("--window-blocks", reassemble_args.window_blocks, "Same-sender search window");
    reassemble->add_option("--chunk-mode", reassemble_args.chunk_mode, "raw or abi-bytes")
        ->check(CLI::IsMember({"raw", "abi-bytes"}));

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train the sentiment classifier from a TSV corpus");
    train_cmd->add_option("--corpus", train_args.corpus, "label<TAB>text corpus")->required();
    train_cmd->add_option("--model", train_args.model, "Output model file")->required();
    train_cmd->add_option("--dim", train_args.params.dim, "Embedding width");
    train_cmd->add_option("--lr", train_args.params.lr, "Learning rate");
    train_cmd->add_option("--epochs", train_args.params.epochs, "Training epochs");
    train_cmd->add_option("--ngram-order", train_args.params.ngram_order, "Max word n-gram order");
    train_cmd->add_option("--buckets", train_args.params.buckets, "Hash space size");
    train_cmd->add_option("--seed", train_args.params.seed, "RNG seed");
    train_cmd->add_option("--min-count", train_args.params.min_count, "Training vocabulary floor");

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "Predict sentiment for restored texts");
    classify->add_option("--model", classify_args.model, "Model file")->required();
    classify->add_option("--texts", classify_args.texts, "texts.ndjson")->required();
    classify->add_option("--out", classify_args.out, "Output directory")->required();
    classify->add_option("--min-prob", classify_args.min_prob, "Drop predictions below this probability");

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a model against a labeled TSV");
    evaluate_cmd->add_option("--model", evaluate_args.model, "Model file")->required();
    evaluate_cmd->add_option("--corpus", evaluate_args.corpus, "label<TAB>text corpus")->required();

    GraphArgs graph_args;
    auto* graph = app.add_subcommand("graph", "Build, export and summarize the embedding network");
    graph->add_option("--texts", graph_args.texts, "texts.ndjson")->required();
    graph->add_option("--out", graph_args.out, "Output directory")->required();
    graph->add_option("--category", graph_args.category, "file|link|chinese|english|all")
        ->check(CLI::IsMember({"file", "link", "chinese", "english", "all"}));
    graph->add_option("--format", graph_args.format, "edgelist|dot|graphml")
        ->check(CLI::IsMember({"edgelist", "dot", "graphml"}));
    graph->add_option("--top-k", graph_args.top_k, "Top-k addresses in the stats");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Category counts, temporal buckets, word frequency");
    report->add_option("--texts", report_args.texts, "texts.ndjson")->required();
    report->add_option("--records", report_args.records, "Records NDJSON for timestamps (quarter mode)");
    report->add_option("--files", report_args.files_dir, "Carved files directory (sidecars)");
    report->add_option("--out", report_args.out, "Output directory")->required();
    report->add_option("--stopwords", report_args.stopwords, "Stopword list, one token per line");
    report->add_option("--bucket-mode", report_args.bucket_mode, "quarter or per-million-blocks")
        ->check(CLI::IsMember({"quarter", "per-million-blocks"}));
    report->add_option("--top-k", report_args.top_k, "Word-frequency list size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (fetch->parsed()) return run_fetch(fetch_args);
        if (scan->parsed()) return run_scan(scan_args);
        if (reassemble->parsed()) return run_reassemble(reassemble_args);
        if (train_cmd->parsed()) return run_train(train_args);
        if (classify->parsed()) return run_classify(classify_args);
        if (evaluate_cmd->parsed()) return run_evaluate(evaluate_args);
        if (graph->parsed()) return run_graph(graph_args);
        if (report->parsed()) return run_report(report_args);
    } catch (const AuthError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const RpcError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const MissingBlockError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}

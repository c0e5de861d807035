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

#include "chaincarve/sentiment.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include <zlib.h>

#include "chaincarve/errors.hpp"
#include "chaincarve/fnv.hpp"
#include "chaincarve/record_io.hpp"
#include "chaincarve/utf8.hpp"

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

namespace chaincarve {

std::string_view label_name(Label label) {
    switch (label) {
        case Label::neutral: return "neutral";
        case Label::positive: return "positive";
        case Label::negative: return "negative";
    }
    return "neutral";
}

std::optional<Label> label_from_name(std::string_view name) {
    if (name == "neutral") return Label::neutral;
    if (name == "positive") return Label::positive;
    if (name == "negative") return Label::negative;
    return std::nullopt;
}

// --- tokenizer ---

namespace {

bool is_token_char(char32_t cp) {
    return cp <= 0x7F && std::isalnum(static_cast<unsigned char>(cp));
}

void flush_ascii_run(std::string& run, std::vector<std::string>& out) {
    if (!run.empty()) {
        out.push_back(std::move(run));
        run.clear();
    }
}

std::vector<std::string> tokenize_scalars(std::string_view text, bool cjk_singles) {
    std::vector<std::string> out;
    std::string run;
    for_each_scalar(text, [&](char32_t cp) {
        if (cjk_singles && is_cjk(cp)) {
            flush_ascii_run(run, out);
            // re-encode the 3-byte CJK scalar
            std::string tok;
            tok += static_cast<char>(0xE0 | (cp >> 12));
            tok += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            tok += static_cast<char>(0x80 | (cp & 0x3F));
            out.push_back(std::move(tok));
        } else if (is_token_char(cp)) {
            run += static_cast<char>(std::tolower(static_cast<int>(cp)));
        } else {
            flush_ascii_run(run, out);
        }
        return true;
    });
    flush_ascii_run(run, out);
    return out;
}

std::size_t count_cjk(std::string_view text) {
    std::size_t n = 0;
    for_each_scalar(text, [&](char32_t cp) {
        if (is_cjk(cp)) ++n;
        return true;
    });
    return n;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, LangMode mode) {
    if (text.empty()) throw EmptyTextError{};
    bool chinese = mode == LangMode::chinese;
    if (mode == LangMode::automatic) chinese = count_cjk(text) >= 2;
    return tokenize_scalars(text, chinese);
}

std::vector<std::uint64_t> featurize(const std::vector<std::string>& tokens, const TrainParams& params) {
    std::vector<std::uint64_t> ids;
    ids.reserve(tokens.size() * params.ngram_order);
    for (const auto& tok : tokens) {
        ids.push_back(fnv1a64(tok) % params.buckets);
    }
    std::string joined;
    for (std::uint32_t order = 2; order <= params.ngram_order; ++order) {
        if (tokens.size() < order) break;
        for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
            joined.clear();
            for (std::size_t j = 0; j < order; ++j) {
                if (j) joined += ' ';
                joined += tokens[i + j];
            }
            ids.push_back(fnv1a64(joined) % params.buckets);
        }
    }
    return ids;
}

// --- forward / gradients ---

namespace {

std::vector<double> document_vector(const TextClassifierModel& model,
                                    std::span<const std::uint64_t> ids) {
    std::vector<double> docvec(model.params.dim, 0.0);
    if (ids.empty()) return docvec;
    for (std::uint64_t id : ids) {
        const auto row = model.input_row(id);
        for (std::uint32_t j = 0; j < model.params.dim; ++j) docvec[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(ids.size());
    for (auto& v : docvec) v *= inv;
    return docvec;
}

std::array<double, kLabelCount> scores_of(const TextClassifierModel& model,
                                          const std::vector<double>& docvec) {
    std::array<double, kLabelCount> scores{};
    for (std::size_t k = 0; k < kLabelCount; ++k) {
        double s = model.output_bias[k];
        const auto w = model.weight_row(k);
        for (std::uint32_t j = 0; j < model.params.dim; ++j) s += w[j] * docvec[j];
        scores[k] = s;
    }
    return scores;
}

std::array<double, kLabelCount> softmax(std::array<double, kLabelCount> scores) {
    const double m = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - m);
        z += s;
    }
    for (auto& s : scores) s /= z;
    return scores;
}

}  // namespace

std::array<double, kLabelCount> predict_distribution(const TextClassifierModel& model,
                                                     std::span<const std::uint64_t> ids) {
    return softmax(scores_of(model, document_vector(model, ids)));
}

double example_loss(const TextClassifierModel& model, std::span<const std::uint64_t> ids,
                    Label label) {
    const auto dist = predict_distribution(model, ids);
    return -std::log(dist[static_cast<std::size_t>(label)]);
}

ExampleGradients example_gradients(const TextClassifierModel& model,
                                   std::span<const std::uint64_t> ids, Label label) {
    const auto docvec = document_vector(model, ids);
    auto g = softmax(scores_of(model, docvec));  // dL/dscores = p - onehot
    g[static_cast<std::size_t>(label)] -= 1.0;

    ExampleGradients out;
    out.d_input.assign(model.params.buckets * model.params.dim, 0.0);
    out.d_weights.assign(kLabelCount * model.params.dim, 0.0);
    for (std::size_t k = 0; k < kLabelCount; ++k) {
        out.d_bias[k] = g[k];
        for (std::uint32_t j = 0; j < model.params.dim; ++j) {
            out.d_weights[k * model.params.dim + j] = g[k] * docvec[j];
        }
    }
    if (!ids.empty()) {
        // dL/ddocvec propagated through the mean
        std::vector<double> d_doc(model.params.dim, 0.0);
        for (std::size_t k = 0; k < kLabelCount; ++k) {
            const auto w = model.weight_row(k);
            for (std::uint32_t j = 0; j < model.params.dim; ++j) d_doc[j] += g[k] * w[j];
        }
        const double inv = 1.0 / static_cast<double>(ids.size());
        for (std::uint64_t id : ids) {
            for (std::uint32_t j = 0; j < model.params.dim; ++j) {
                out.d_input[id * model.params.dim + j] += d_doc[j] * inv;
            }
        }
    }
    return out;
}

// --- training ---

namespace {

// splitmix64; stable across platforms unlike <random> distributions
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // uniform in [0, n)
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
};

std::vector<std::string> min_count_filter(std::vector<std::string> tokens,
                                          const std::unordered_map<std::string, std::uint64_t>& counts,
                                          std::uint32_t min_count) {
    if (min_count <= 1) return tokens;
    std::erase_if(tokens, [&](const std::string& t) { return counts.at(t) < min_count; });
    return tokens;
}

}  // namespace

TextClassifierModel train(const std::vector<LabeledText>& corpus, const TrainParams& params) {
    if (corpus.empty()) throw EmptyCorpusError{};
    std::array<bool, kLabelCount> seen{};
    for (const auto& ex : corpus) seen[static_cast<std::size_t>(ex.label)] = true;
    for (std::size_t k = 0; k < kLabelCount; ++k) {
        if (!seen[k]) {
            throw MissingLabelError("corpus lacks label \"" + std::string(label_name(Label(k))) + "\"");
        }
    }

    std::unordered_map<std::string, std::uint64_t> token_counts;
    std::vector<std::vector<std::string>> token_lists;
    token_lists.reserve(corpus.size());
    for (const auto& ex : corpus) {
        auto tokens = ex.text.empty() ? std::vector<std::string>{} : tokenize(ex.text);
        for (const auto& t : tokens) ++token_counts[t];
        token_lists.push_back(std::move(tokens));
    }

    std::vector<std::vector<std::uint64_t>> features;
    std::vector<Label> labels;
    features.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto tokens = min_count_filter(std::move(token_lists[i]), token_counts, params.min_count);
        if (tokens.empty()) continue;  // nothing to learn from
        features.push_back(featurize(tokens, params));
        labels.push_back(corpus[i].label);
    }
    if (features.empty()) throw EmptyCorpusError{};

    TextClassifierModel model;
    model.params = params;
    model.input_embeddings.resize(params.buckets * params.dim);
    model.output_weights.assign(kLabelCount * params.dim, 0.0f);

    Rng rng(params.seed);
    const double init_bound = 1.0 / static_cast<double>(params.dim);
    for (auto& w : model.input_embeddings) {
        w = static_cast<float>((rng.uniform() * 2.0 - 1.0) * init_bound);
    }

    std::vector<std::size_t> order(features.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const double total_steps = static_cast<double>(params.epochs) * static_cast<double>(features.size());
    double step = 0.0;
    std::vector<double> d_doc(params.dim);

    for (std::uint32_t epoch = 0; epoch < params.epochs; ++epoch) {
        // Fisher-Yates driven by our own rng for cross-platform determinism
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        for (std::size_t idx : order) {
            const auto& ids = features[idx];
            const double lr = params.lr * (1.0 - step / total_steps);
            step += 1.0;

            const auto docvec = document_vector(model, ids);
            auto g = softmax(scores_of(model, docvec));
            g[static_cast<std::size_t>(labels[idx])] -= 1.0;

            // grad wrt docvec uses the pre-update output weights
            std::fill(d_doc.begin(), d_doc.end(), 0.0);
            for (std::size_t k = 0; k < kLabelCount; ++k) {
                const auto w = model.weight_row(k);
                for (std::uint32_t j = 0; j < params.dim; ++j) d_doc[j] += g[k] * w[j];
            }
            for (std::size_t k = 0; k < kLabelCount; ++k) {
                float* w = model.output_weights.data() + k * params.dim;
                const double gk = g[k];
                for (std::uint32_t j = 0; j < params.dim; ++j) {
                    w[j] = static_cast<float>(w[j] - lr * gk * docvec[j]);
                }
                model.output_bias[k] = static_cast<float>(model.output_bias[k] - lr * gk);
            }
            const double scale = lr / static_cast<double>(ids.size());
            for (std::uint64_t id : ids) {
                float* row = model.input_embeddings.data() + id * params.dim;
                for (std::uint32_t j = 0; j < params.dim; ++j) {
                    row[j] = static_cast<float>(row[j] - scale * d_doc[j]);
                }
            }
        }
    }
    return model;
}

// --- prediction / evaluation ---

Prediction predict(const TextClassifierModel& model, std::string_view text) {
    if (text.empty()) throw EmptyTextError{};
    const auto tokens = tokenize(text);
    const auto ids = featurize(tokens, model.params);
    Prediction out;
    out.distribution = predict_distribution(model, ids);
    std::size_t best = 0;
    for (std::size_t k = 1; k < kLabelCount; ++k) {
        if (out.distribution[k] > out.distribution[best]) best = k;  // ties keep label order
    }
    out.label = Label(best);
    out.probability = out.distribution[best];
    return out;
}

std::array<std::array<double, kLabelCount>, kLabelCount> Evaluation::row_normalized() const {
    std::array<std::array<double, kLabelCount>, kLabelCount> out{};
    for (std::size_t r = 0; r < kLabelCount; ++r) {
        std::uint64_t row_total = 0;
        for (auto v : confusion[r]) row_total += v;
        for (std::size_t c = 0; c < kLabelCount; ++c) {
            out[r][c] = row_total == 0 ? 0.0
                                       : static_cast<double>(confusion[r][c]) /
                                             static_cast<double>(row_total);
        }
    }
    return out;
}

Evaluation evaluate(const TextClassifierModel& model, const std::vector<LabeledText>& labeled) {
    if (labeled.empty()) throw EmptySetError{};
    Evaluation ev;
    std::uint64_t correct = 0;
    for (const auto& ex : labeled) {
        const auto pred = predict(model, ex.text);
        ev.confusion[static_cast<std::size_t>(ex.label)][static_cast<std::size_t>(pred.label)]++;
        if (pred.label == ex.label) ++correct;
    }
    ev.total = labeled.size();
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.total);
    return ev;
}

// --- persistence ---

namespace {

class CrcWriter {
  public:
    explicit CrcWriter(const std::filesystem::path& path)
        : out_(path, std::ios::binary | std::ios::trunc), path_(path.string()) {
        if (!out_) throw IoError("cannot write " + path_);
    }
    void write(const void* data, std::size_t size) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out_) throw IoError("write error on " + path_);
        crc_ = crc32(crc_, static_cast<const Bytef*>(data), static_cast<uInt>(size));
    }
    template <typename T>
    void write_pod(const T& v) {
        write(&v, sizeof(T));
    }
    void finish() {
        const auto crc = static_cast<std::uint32_t>(crc_);
        out_.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
        out_.close();
        if (out_.fail()) throw IoError("close error on " + path_);
    }

  private:
    std::ofstream out_;
    std::string path_;
    uLong crc_{crc32(0L, Z_NULL, 0)};
};

class CrcReader {
  public:
    explicit CrcReader(const std::filesystem::path& path)
        : in_(path, std::ios::binary), path_(path.string()) {
        if (!in_) throw IoError("cannot open " + path_);
        in_.seekg(0, std::ios::end);
        remaining_ = static_cast<std::size_t>(in_.tellg());
        in_.seekg(0, std::ios::beg);
        if (remaining_ < sizeof(std::uint32_t)) throw CorruptModelError("model file truncated");
        remaining_ -= sizeof(std::uint32_t);  // trailing CRC
    }
    void read(void* data, std::size_t size) {
        if (size > remaining_) throw CorruptModelError("model file truncated");
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
        if (!in_) throw CorruptModelError("model file truncated");
        crc_ = crc32(crc_, static_cast<const Bytef*>(data), static_cast<uInt>(size));
        remaining_ -= size;
    }
    template <typename T>
    T read_pod() {
        T v;
        read(&v, sizeof(T));
        return v;
    }
    std::size_t remaining() const { return remaining_; }
    void verify_crc() {
        if (remaining_ != 0) throw CorruptModelError("model file has trailing bytes");
        std::uint32_t stored;
        in_.read(reinterpret_cast<char*>(&stored), sizeof(stored));
        if (!in_) throw CorruptModelError("model file truncated");
        if (stored != static_cast<std::uint32_t>(crc_)) {
            throw CorruptModelError("model checksum mismatch");
        }
    }

  private:
    std::ifstream in_;
    std::string path_;
    std::size_t remaining_{0};
    uLong crc_{crc32(0L, Z_NULL, 0)};
};

}  // namespace

void save_model(const TextClassifierModel& model, const std::filesystem::path& path) {
    CrcWriter w(path);
    w.write(kModelMagic, sizeof(kModelMagic));
    w.write_pod(model.format_version);
    w.write_pod(model.params.dim);
    w.write_pod(model.params.lr);
    w.write_pod(model.params.epochs);
    w.write_pod(model.params.ngram_order);
    w.write_pod(model.params.buckets);
    w.write_pod(model.params.seed);
    w.write_pod(model.params.min_count);
    w.write(model.input_embeddings.data(), model.input_embeddings.size() * sizeof(float));
    w.write(model.output_weights.data(), model.output_weights.size() * sizeof(float));
    w.write(model.output_bias.data(), model.output_bias.size() * sizeof(float));
    w.finish();
}

TextClassifierModel load_model(const std::filesystem::path& path) {
    CrcReader r(path);
    char magic[4];
    r.read(magic, sizeof(magic));
    if (std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw VersionMismatchError("not a model file (bad magic)");
    }
    TextClassifierModel model;
    model.format_version = r.read_pod<std::uint32_t>();
    if (model.format_version != kModelFormatVersion) {
        throw VersionMismatchError("unsupported model format version " +
                                   std::to_string(model.format_version));
    }
    model.params.dim = r.read_pod<std::uint32_t>();
    model.params.lr = r.read_pod<double>();
    model.params.epochs = r.read_pod<std::uint32_t>();
    model.params.ngram_order = r.read_pod<std::uint32_t>();
    model.params.buckets = r.read_pod<std::uint64_t>();
    model.params.seed = r.read_pod<std::uint64_t>();
    model.params.min_count = r.read_pod<std::uint32_t>();
    if (model.params.dim == 0 || model.params.buckets == 0) {
        throw CorruptModelError("model declares empty matrices");
    }
    // reject sizes the file cannot actually back before allocating anything
    if (model.params.buckets > (std::uint64_t{1} << 34) / model.params.dim) {
        throw CorruptModelError("model declares an implausibly large matrix");
    }
    const std::size_t input_count = model.params.buckets * model.params.dim;
    const std::size_t want =
        (input_count + kLabelCount * model.params.dim + kLabelCount) * sizeof(float);
    if (r.remaining() != want) throw CorruptModelError("model size inconsistent with params");
    model.input_embeddings.resize(input_count);
    r.read(model.input_embeddings.data(), input_count * sizeof(float));
    model.output_weights.resize(kLabelCount * model.params.dim);
    r.read(model.output_weights.data(), model.output_weights.size() * sizeof(float));
    r.read(model.output_bias.data(), model.output_bias.size() * sizeof(float));
    r.verify_crc();
    return model;
}

std::vector<LabeledText> read_tsv_corpus(const std::filesystem::path& path) {
    LineReader reader(path);
    std::vector<LabeledText> out;
    while (auto line = reader.next_line()) {
        if (line->empty()) continue;
        const auto tab = line->find('\t');
        if (tab == std::string::npos) {
            throw FormatError("corpus row lacks a tab separator", reader.line_number());
        }
        const auto label = label_from_name(line->substr(0, tab));
        if (!label) {
            throw FormatError("unknown label \"" + line->substr(0, tab) + "\"", reader.line_number());
        }
        out.push_back({line->substr(tab + 1), *label});
    }
    return out;
}

}  // namespace chaincarve

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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chaincarve {

inline constexpr std::size_t kLabelCount = 3;

enum class Label : std::uint8_t { neutral = 0, positive = 1, negative = 2 };

std::string_view label_name(Label label);
std::optional<Label> label_from_name(std::string_view name);

enum class LangMode : std::uint8_t { automatic, english, chinese };

/// english: lowercase, split on non-alphanumeric runs. chinese: every CJK
/// char is its own token, non-CJK runs tokenize as english. automatic picks
/// chinese when the text has >= 2 CJK chars. Throws EmptyTextError on "".
/// May return an empty list (e.g. pure punctuation).
std::vector<std::string> tokenize(std::string_view text, LangMode mode = LangMode::automatic);

struct TrainParams {
    std::uint32_t dim{100};
    double lr{0.1};
    std::uint32_t epochs{5};
    std::uint32_t ngram_order{2};  // word n-grams up to this order
    std::uint64_t buckets{std::uint64_t{1} << 21};
    std::uint64_t seed{42};
    std::uint32_t min_count{1};  // training-time vocabulary floor

    bool operator==(const TrainParams&) const = default;
};

/// Hashing-trick feature ids: FNV-1a 64 of each token, plus of each
/// space-joined n-gram of orders 2..ngram_order, all mod buckets. A multiset:
/// repeated tokens yield repeated ids.
std::vector<std::uint64_t> featurize(const std::vector<std::string>& tokens, const TrainParams& params);

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr char kModelMagic[4] = {'C', 'C', 'F', 'T'};

/// Hashed bag-of-n-grams linear softmax classifier over the three sentiment
/// labels. Document vector = mean of the feature-id embedding rows.
struct TextClassifierModel {
    TrainParams params;
    std::uint32_t format_version{kModelFormatVersion};
    std::vector<float> input_embeddings;           // buckets x dim, row-major
    std::vector<float> output_weights;             // kLabelCount x dim, row-major
    std::array<float, kLabelCount> output_bias{};  // one per label

    std::span<const float> input_row(std::uint64_t id) const {
        return {input_embeddings.data() + id * params.dim, params.dim};
    }
    std::span<const float> weight_row(std::size_t label) const {
        return {output_weights.data() + label * params.dim, params.dim};
    }

    bool operator==(const TextClassifierModel&) const = default;
};

struct LabeledText {
    std::string text;
    Label label;
};

/// Deterministic SGD training: per-example softmax cross-entropy updates,
/// linearly decaying learning rate, per-epoch shuffling driven by the seed.
/// Throws EmptyCorpusError / MissingLabelError.
TextClassifierModel train(const std::vector<LabeledText>& corpus, const TrainParams& params);

struct Prediction {
    Label label{Label::neutral};
    double probability{0.0};  // max of distribution
    std::array<double, kLabelCount> distribution{};
};

/// Throws EmptyTextError. Ties in the distribution break toward the earlier
/// label in (neutral, positive, negative) order.
Prediction predict(const TextClassifierModel& model, std::string_view text);

struct Evaluation {
    double accuracy{0.0};
    std::uint64_t total{0};
    /// confusion[true][predicted]
    std::array<std::array<std::uint64_t, kLabelCount>, kLabelCount> confusion{};
    std::array<std::array<double, kLabelCount>, kLabelCount> row_normalized() const;
};

Evaluation evaluate(const TextClassifierModel& model, const std::vector<LabeledText>& labeled);

/// Binary model file: "CCFT" magic, version, params block, little-endian f32
/// matrices, trailing CRC32. load(save(m)) == m bitwise.
void save_model(const TextClassifierModel& model, const std::filesystem::path& path);
TextClassifierModel load_model(const std::filesystem::path& path);

/// "label<TAB>text" rows; throws FormatError with the offending line number.
std::vector<LabeledText> read_tsv_corpus(const std::filesystem::path& path);

// Exposed for verification: forward pass and analytic gradients of one
// example's cross-entropy loss, computed in double precision.
std::array<double, kLabelCount> predict_distribution(const TextClassifierModel& model,
                                                     std::span<const std::uint64_t> ids);
double example_loss(const TextClassifierModel& model, std::span<const std::uint64_t> ids, Label label);

struct ExampleGradients {
    std::vector<double> d_input;                   // buckets x dim
    std::vector<double> d_weights;                 // kLabelCount x dim
    std::array<double, kLabelCount> d_bias{};
};

ExampleGradients example_gradients(const TextClassifierModel& model,
                                   std::span<const std::uint64_t> ids, Label label);

}  // namespace chaincarve

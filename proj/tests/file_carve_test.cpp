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

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "chaincarve/errors.hpp"
#include "chaincarve/file_carve.hpp"
#include "chaincarve/hex.hpp"
#include "support/fixtures.hpp"

using namespace chaincarve;
namespace fs = std::filesystem;

namespace {

const SignatureRegistry& registry() {
    static const SignatureRegistry reg = SignatureRegistry::builtin();
    return reg;
}

std::vector<std::uint8_t> bytes(std::initializer_list<int> values) {
    std::vector<std::uint8_t> out;
    for (int v : values) out.push_back(static_cast<std::uint8_t>(v));
    return out;
}

fs::path temp_dir(const char* tag) {
    auto dir = fs::temp_directory_path() / (std::string("chaincarve_carve_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("builtin registry carries the core signatures") {
    const auto* png = registry().find("png");
    REQUIRE(png);
    CHECK(png->header_variants[0] == bytes({0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A}));

    const auto* pdf = registry().find("pdf");
    REQUIRE(pdf);
    CHECK(pdf->header_variants[0] == bytes({0x25, 0x50, 0x44, 0x46}));

    const auto* gif = registry().find("gif");
    REQUIRE(gif);
    CHECK(gif->trailer_variants[0] == bytes({0x00, 0x3B}));

    const auto* jpg = registry().find("jpg");
    REQUIRE(jpg);
    REQUIRE(jpg->header_variants.size() == 3);
    CHECK(jpg->header_variants[1] == bytes({0xFF, 0xD8, 0xFF, 0xE1}));
    CHECK(jpg->trailer_variants[0] == bytes({0xFF, 0xD9}));

    const auto* zip = registry().find("zip");
    REQUIRE(zip);
    CHECK(zip->header_variants[0] == bytes({0x50, 0x4B, 0x03, 0x04}));
    CHECK(zip->trailer_variants.empty());

    const auto* html = registry().find("html");
    REQUIRE(html);
    CHECK(html->header_variants[0] == bytes({0x68, 0x74, 0x6D, 0x6C, 0x3E}));
}

TEST_CASE("registry extension file merges new and existing types") {
    const auto dir = temp_dir("registry");
    {
        std::ofstream out(dir / "ext.json");
        out << R"([
          {"type": "exe", "headers": ["4d5a"], "trailers": []},
          {"type": "gif", "headers": [], "trailers": ["003c"]}
        ])";
    }
    auto reg = SignatureRegistry::builtin();
    reg.merge_extension_file(dir / "ext.json");
    REQUIRE(reg.find("exe"));
    CHECK(reg.find("exe")->header_variants[0] == bytes({0x4D, 0x5A}));
    CHECK(reg.find("gif")->trailer_variants.size() == 2);

    SUBCASE("malformed file raises RegistryFormatError") {
        std::ofstream(dir / "bad.json") << R"({"not": "a list"})";
        auto reg2 = SignatureRegistry::builtin();
        CHECK_THROWS_AS(reg2.merge_extension_file(dir / "bad.json"), RegistryFormatError);
    }
    SUBCASE("headers shorter than 2 bytes are rejected") {
        std::ofstream(dir / "short.json") << R"([{"type": "x", "headers": ["4d"]}])";
        auto reg2 = SignatureRegistry::builtin();
        CHECK_THROWS_AS(reg2.merge_extension_file(dir / "short.json"), RegistryFormatError);
    }
}

TEST_CASE("scan_payload reports matches in offset order") {
    fixtures::Rng rng(21);
    SUBCASE("png header after junk") {
        auto junk = fixtures::make_junk(registry(), rng, 10);
        auto payload = junk;
        const auto& png = registry().find("png")->header_variants[0];
        payload.insert(payload.end(), png.begin(), png.end());
        payload.insert(payload.end(), 16, 0x00);
        // trailing zeros contain no patterns except a possible gif trailer 00 3B? no 0x3B present
        const auto matches = scan_payload(payload, registry());
        REQUIRE(matches.size() == 1);
        CHECK(matches[0].file_type == "png");
        CHECK(matches[0].offset == 10);
        CHECK(matches[0].which == MatchWhich::header);
    }
    SUBCASE("empty payload") {
        CHECK(scan_payload(std::span<const std::uint8_t>{}, registry()).empty());
    }
    SUBCASE("pdf header and gif trailer in offset order") {
        std::vector<std::uint8_t> payload;
        const auto pdf = bytes({0x25, 0x50, 0x44, 0x46});
        payload.insert(payload.end(), pdf.begin(), pdf.end());
        payload.push_back(0x41);
        payload.push_back(0x00);
        payload.push_back(0x3B);
        const auto matches = scan_payload(payload, registry());
        REQUIRE(matches.size() == 2);
        CHECK(matches[0].file_type == "pdf");
        CHECK(matches[0].offset == 0);
        CHECK(matches[1].file_type == "gif");
        CHECK(matches[1].which == MatchWhich::trailer);
        CHECK(matches[1].offset == 5);
    }
    SUBCASE("overlapping html trailer wins over its embedded header marker") {
        const std::string doc = "<html>x</html>";
        const std::vector<std::uint8_t> payload(doc.begin(), doc.end());
        const auto matches = scan_payload(payload, registry());
        REQUIRE(matches.size() == 2);
        CHECK(matches[0].which == MatchWhich::header);
        CHECK(matches[0].offset == 1);
        CHECK(matches[1].which == MatchWhich::trailer);
        CHECK(matches[1].offset == 7);
        CHECK(matches[1].length == 7);
    }
}

TEST_CASE("carve_file recovers a complete gif byte-exactly") {
    fixtures::Rng rng(33);
    const auto gif = fixtures::make_fixture(registry(), "gif", rng, 120);
    const auto embedded = fixtures::embed_with_junk(registry(), rng, gif, 10, 25);
    const auto carved = carve_file(hex_encode(embedded.payload), registry(), "0xabc");
    REQUIRE(carved.has_value());
    CHECK(carved->file_type == "gif");
    CHECK(carved->completeness == Completeness::complete);
    CHECK(carved->data == gif);
    CHECK(carved->header_offset == 10);
    CHECK(carved->source_txs == std::vector<std::string>{"0xabc"});
}

TEST_CASE("carve_file marks a headerless trailer type as truncated") {
    const auto& png = registry().find("png")->header_variants[0];
    std::vector<std::uint8_t> payload(png.begin(), png.end());
    payload.insert(payload.end(), 100, 0x11);
    const auto carved = carve_payload(payload, registry());
    REQUIRE(carved.has_value());
    CHECK(carved->file_type == "png");
    CHECK(carved->completeness == Completeness::truncated);
    CHECK(carved->data == payload);
}

TEST_CASE("zip carvings have unknown completeness") {
    fixtures::Rng rng(34);
    const auto zip = fixtures::make_fixture(registry(), "zip", rng, 60);
    const auto embedded = fixtures::embed_with_junk(registry(), rng, zip, 7, 0);
    const auto carved = carve_payload(embedded.payload, registry());
    REQUIRE(carved.has_value());
    CHECK(carved->file_type == "zip");
    CHECK(carved->completeness == Completeness::unknown);
    CHECK(carved->data == zip);
}

TEST_CASE("pure text payloads carve to nothing") {
    const std::string text = "just some plain ascii text with no signatures";
    CHECK(!carve_payload(std::vector<std::uint8_t>(text.begin(), text.end()), registry()));
}

TEST_CASE("carve returns nothing iff scan finds no header") {
    fixtures::Rng rng(35);
    for (int i = 0; i < 200; ++i) {
        const auto payload = fixtures::random_bytes(rng, rng.below(200));
        const auto matches = scan_payload(payload, registry());
        const bool has_header = std::any_of(matches.begin(), matches.end(), [](const auto& m) {
            return m.which == MatchWhich::header;
        });
        CHECK(carve_payload(payload, registry()).has_value() == has_header);
    }
}

TEST_CASE("earliest header wins; a later extra header cannot move the start") {
    fixtures::Rng rng(36);
    const auto pdf = fixtures::make_fixture(registry(), "pdf", rng, 40);
    auto embedded = fixtures::embed_with_junk(registry(), rng, pdf, 12, 0);
    const auto base = carve_payload(embedded.payload, registry());
    REQUIRE(base.has_value());

    // splice a png header after the pdf data
    const auto& png = registry().find("png")->header_variants[0];
    auto payload = embedded.payload;
    payload.insert(payload.end(), png.begin(), png.end());
    const auto carved = carve_payload(payload, registry());
    REQUIRE(carved.has_value());
    CHECK(carved->file_type == "pdf");
    CHECK(carved->header_offset == base->header_offset);
    CHECK(carved->data == base->data);
}

TEST_CASE("html carve backs up to the opening tag") {
    const std::string doc = "<html lang=x>ignored</html>";
    SUBCASE("marker inside the closing tag only") {
        // "<html lang=x>" carries no "html>" marker; the first marker sits in
        // "</html>", and the backscan recovers "<html" only if close enough.
        const std::vector<std::uint8_t> payload(doc.begin(), doc.end());
        const auto carved = carve_payload(payload, registry());
        REQUIRE(carved.has_value());
        CHECK(carved->file_type == "html");
        // marker at "</html>"+2, no "<html" within 16 bytes before it
        CHECK(carved->header_offset == doc.find("</html>") + 2);
    }
    SUBCASE("plain document carves whole") {
        const std::string plain = "<html><body>hi</body></html>";
        const std::vector<std::uint8_t> payload(plain.begin(), plain.end());
        const auto carved = carve_payload(payload, registry());
        REQUIRE(carved.has_value());
        CHECK(carved->completeness == Completeness::complete);
        CHECK(carved->data == payload);
        CHECK(carved->header_offset == 0);
    }
}

TEST_CASE("write_carved lays out files, sidecars and collision suffixes") {
    const auto dir = temp_dir("write");
    fixtures::Rng rng(37);
    auto gif = fixtures::make_fixture(registry(), "gif", rng, 30);
    CarvedFile file;
    file.file_type = "gif";
    file.data = gif;
    file.completeness = Completeness::complete;
    file.source_txs = {fixtures::hash_hex(1), fixtures::hash_hex(2)};
    file.header_offset = 4;

    SidecarExtras extras;
    extras.block_number = 777;
    const auto path = write_carved(file, dir, extras);
    CHECK(path == dir / "gif" / (fixtures::hash_hex(1) + ".gif"));
    REQUIRE(fs::exists(path));
    CHECK(fs::file_size(path) == gif.size());

    const auto sidecar = dir / "gif" / (fixtures::hash_hex(1) + ".json");
    REQUIRE(fs::exists(sidecar));
    std::ifstream in(sidecar);
    nlohmann::json meta;
    in >> meta;
    CHECK(meta["file_type"] == "gif");
    CHECK(meta["completeness"] == "complete");
    CHECK(meta["sources"].size() == 2);
    CHECK(meta["header_offset"] == 4);
    CHECK(meta["block_number"] == 777);

    // second carving from the same tx and type gets "-1"
    const auto second = write_carved(file, dir, extras);
    CHECK(second == dir / "gif" / (fixtures::hash_hex(1) + "-1.gif"));
    CHECK(fs::exists(dir / "gif" / (fixtures::hash_hex(1) + "-1.json")));

    SUBCASE("unwritable target raises IoError") {
        CHECK_THROWS_AS(write_carved(file, "/proc/definitely/not/writable"), IoError);
    }
}

TEST_CASE("image classifier hook parses well-formed verdicts only") {
    const auto dir = temp_dir("classifier");
    const auto image = dir / "x.gif";
    std::ofstream(image) << "GIF89a";

    SUBCASE("good verdict") {
        const auto script = dir / "clf.sh";
        std::ofstream(script) << "#!/bin/sh\necho '{\"label\": \"neutral\", \"score\": 0.25}'\n";
        fs::permissions(script, fs::perms::owner_all);
        const auto verdict = run_image_classifier(script.string(), image);
        REQUIRE(verdict.has_value());
        CHECK(verdict->label == "neutral");
        CHECK(verdict->score == doctest::Approx(0.25));
    }
    SUBCASE("the image path reaches the command as argv[1]") {
        const auto script = dir / "echo.sh";
        std::ofstream(script)
            << "#!/bin/sh\nprintf '{\"label\": \"%s\", \"score\": 1}' \"$(basename \"$1\")\"\n";
        fs::permissions(script, fs::perms::owner_all);
        const auto verdict = run_image_classifier(script.string(), image);
        REQUIRE(verdict.has_value());
        CHECK(verdict->label == "x.gif");
    }
    SUBCASE("garbage output yields no verdict") {
        const auto script = dir / "bad.sh";
        std::ofstream(script) << "#!/bin/sh\necho not json\n";
        fs::permissions(script, fs::perms::owner_all);
        CHECK(!run_image_classifier(script.string(), image));
    }
    SUBCASE("failing command yields no verdict") {
        CHECK(!run_image_classifier("false", image));
    }
    SUBCASE("score outside [0,1] yields no verdict") {
        const auto script = dir / "oob.sh";
        std::ofstream(script) << "#!/bin/sh\necho '{\"label\": \"x\", \"score\": 1.5}'\n";
        fs::permissions(script, fs::perms::owner_all);
        CHECK(!run_image_classifier(script.string(), image));
    }
}

TEST_CASE("round-trip property: random fixtures at random offsets") {
    fixtures::Rng rng(38);
    const char* types[] = {"png", "jpg", "gif", "html", "zip", "pdf"};
    for (int i = 0; i < 60; ++i) {
        const std::string type = types[rng.below(6)];
        const bool has_trailer = !registry().find(type)->trailer_variants.empty();
        const auto fixture = fixtures::make_fixture(registry(), type, rng, 20 + rng.below(200));
        const auto embedded = fixtures::embed_with_junk(registry(), rng, fixture, rng.below(64),
                                                        has_trailer ? rng.below(64) : 0);
        const auto carved = carve_payload(embedded.payload, registry());
        REQUIRE(carved.has_value());
        CHECK(carved->file_type == type);
        CHECK(carved->data == fixture);
        CHECK(carved->completeness ==
              (has_trailer ? Completeness::complete : Completeness::unknown));
        if (carved->completeness == Completeness::complete) {
            // complete carvings always end with a registered trailer variant
            bool ends_with_trailer = false;
            for (const auto& t : registry().find(type)->trailer_variants) {
                if (carved->data.size() >= t.size() &&
                    std::equal(t.rbegin(), t.rend(), carved->data.rbegin())) {
                    ends_with_trailer = true;
                }
            }
            CHECK(ends_with_trailer);
        }
    }
}

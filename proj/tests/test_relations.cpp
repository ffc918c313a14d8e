#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "relhyper/errors.hpp"
#include "relhyper/relations.hpp"
#include "synthetic.hpp"

using namespace relhyper;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "relhyper_relations_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path;
}

} // namespace

TEST_CASE("pair lines parse with alternative targets") {
    const auto dir = temp_dir("parse");
    const auto path = write_file(dir / "L01 [name - occupation].txt",
                                 "darwin\tnaturalist/biologist/geologist\n"
                                 "france\tparis\n"
                                 "afraid\tterrified\n");
    const auto cat = parse_bats_file(path);
    CHECK(cat.id == "L01");
    CHECK(cat.name == "name - occupation");
    REQUIRE(cat.pairs.size() == 3);
    CHECK(cat.pairs[0].source == "darwin");
    REQUIRE(cat.pairs[0].targets.size() == 3);
    CHECK(cat.pairs[0].targets[1] == "biologist");
    CHECK(cat.pairs[1].targets == std::vector<std::string>{"paris"});
    CHECK(cat.pairs[2].targets == std::vector<std::string>{"terrified"});
}

TEST_CASE("comments, blank lines and CRLF are tolerated") {
    const auto dir = temp_dir("comments");
    const auto path = write_file(dir / "X01.txt", "# header comment\n\na\tb/c\r\n");
    const auto cat = parse_bats_file(path);
    CHECK(cat.id == "X01");
    REQUIRE(cat.pairs.size() == 1);
    CHECK(cat.pairs[0].targets == std::vector<std::string>{"b", "c"});
}

TEST_CASE("missing tab and empty targets are parse errors with line numbers") {
    const auto dir = temp_dir("errors");
    CHECK_THROWS_WITH_AS(parse_bats_file(write_file(dir / "bad1.txt", "a b\n")),
                         doctest::Contains(":1"), ParseError);
    CHECK_THROWS_AS(parse_bats_file(write_file(dir / "bad2.txt", "ok\tt\nempty\t\n")), ParseError);
    CHECK_THROWS_AS(parse_bats_file(write_file(dir / "bad3.txt", "x\t///\n")), ParseError);
}

TEST_CASE("directory parsing counts and sorts categories") {
    const auto dir = temp_dir("tree");
    fs::create_directories(dir / "sub");
    write_file(dir / "sub" / "B02 [two].txt", "a\tb\nc\td\n");
    write_file(dir / "A01 [one].txt", "e\tf\n");
    write_file(dir / "notes.md", "ignored\n");
    const auto cats = parse_bats_directory(dir);
    REQUIRE(cats.size() == 2);
    CHECK(cats[0].id == "A01");
    CHECK(cats[1].id == "B02");
    CHECK(cats[0].pairs.size() + cats[1].pairs.size() == 3);

    const auto empty = temp_dir("empty");
    CHECK(parse_bats_directory(empty).empty());
    CHECK_THROWS_AS(parse_bats_directory(dir / "nonexistent"), ParseError);
}

TEST_CASE("resolve drops by the vocabulary rule") {
    const auto vsm = synthetic::tiny_vsm({"a", "b", "c"}, {{1, 0}, {0, 1}, {1, 1}});
    RelationCategory cat;
    cat.id = "R01";
    cat.pairs = {
        {"a", {"b"}},          // fully resolved
        {"a", {"b", "zqxw"}},  // partial target pruned
        {"zqxw", {"b"}},       // source OOV
        {"c", {"zq", "xw"}},   // all targets OOV
    };
    const auto resolved = resolve(cat, vsm);
    REQUIRE(resolved.pairs.size() == 2);
    CHECK(resolved.pairs[0].targets == std::vector<std::string>{"b"});
    CHECK(resolved.pairs[1].targets == std::vector<std::string>{"b"});
    REQUIRE(resolved.dropped.size() == 2);
    CHECK(resolved.dropped[0].reason == DropReason::source_oov);
    CHECK(resolved.dropped[1].reason == DropReason::all_targets_oov);
    CHECK(to_string(resolved.dropped[0].reason) == "source_oov");
}

TEST_CASE("resolve partitions the category") {
    const auto planted = synthetic::planted_offset(5, 6, 10, 8, 2.0, 1.0, 0.0);
    RelationCategory cat = planted.category;
    cat.pairs.push_back({"missing", {"alsa"}});
    const auto resolved = resolve(cat, planted.vsm);
    CHECK(resolved.pairs.size() + resolved.dropped.size() == cat.pairs.size());
}

TEST_CASE("resolve canonicalizes case against the vocabulary") {
    const auto vsm = synthetic::tiny_vsm({"france", "paris"}, {{1, 0}, {0, 1}},
                                         CaseMode::lowercase_fallback);
    RelationCategory cat;
    cat.id = "C01";
    cat.pairs = {{"France", {"Paris"}}};
    const auto resolved = resolve(cat, vsm);
    REQUIRE(resolved.pairs.size() == 1);
    CHECK(resolved.pairs[0].source == "france");
    CHECK(resolved.pairs[0].targets == std::vector<std::string>{"paris"});
}

TEST_CASE("resolve is idempotent") {
    const auto planted = synthetic::planted_offset(9, 5, 10, 6, 2.0, 1.0, 0.0);
    const auto once = resolve(planted.category, planted.vsm);
    RelationCategory as_category;
    as_category.id = once.category.id;
    for (const auto& p : once.pairs) as_category.pairs.push_back({p.source, p.targets});
    const auto twice = resolve(as_category, planted.vsm);
    CHECK(twice.dropped.empty());
    CHECK(twice.pairs.size() == once.pairs.size());
}

TEST_CASE("round trip through serialize_category") {
    const auto dir = temp_dir("roundtrip");
    const std::string content = "a\tb/c\nd\te\n";
    const auto path = write_file(dir / "T01.txt", content);
    const auto cat = parse_bats_file(path);
    CHECK(serialize_category(cat) == content);
    const auto reparsed = parse_bats_file(write_file(dir / "T01b.txt", serialize_category(cat)));
    CHECK(serialize_category(reparsed) == content);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "relhyper/errors.hpp"
#include "relhyper/rng.hpp"
#include "relhyper/vector_space.hpp"
#include "synthetic.hpp"

using namespace relhyper;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "relhyper_vsm_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

} // namespace

TEST_CASE("glove text parsing") {
    const auto path = temp_file("basic.glove.txt");
    write_file(path, "the 0.1 0.2 0.3\ncat 1 0 0\n");
    const auto vsm = load_vsm(path, VsmFormat::glove_text);
    CHECK(vsm.size() == 2);
    CHECK(vsm.dim() == 3);
    CHECK(vsm.row(0)[0] == doctest::Approx(0.1f));
    CHECK(vsm.token(0) == "the");
    CHECK(vsm.token(1) == "cat");
}

TEST_CASE("w2v text parsing with header") {
    const auto path = temp_file("basic.w2v.txt");
    write_file(path, "2 3\na 1 0 0\nb 0 1 0\n");
    const auto vsm = load_vsm(path, VsmFormat::w2v_text);
    CHECK(vsm.size() == 2);
    CHECK(vsm.dim() == 3);
}

TEST_CASE("dimension mismatch reports the line number") {
    const auto path = temp_file("short_row.w2v.txt");
    write_file(path, "2 3\na 1 0 0\nb 0 1\n");
    CHECK_THROWS_WITH_AS(load_vsm(path, VsmFormat::w2v_text), doctest::Contains(":3"), ParseError);
}

TEST_CASE("glove dimension enforced after first row") {
    const auto path = temp_file("short_row.glove.txt");
    write_file(path, "a 1 0 0\nb 0 1\n");
    CHECK_THROWS_AS(load_vsm(path, VsmFormat::glove_text), ParseError);
}

TEST_CASE("zero-norm vector is rejected and names the token") {
    const auto path = temp_file("zero.glove.txt");
    write_file(path, "a 1 0\nnull 0 0\n");
    CHECK_THROWS_WITH_AS(load_vsm(path, VsmFormat::glove_text), doctest::Contains("null"),
                         ParseError);
}

TEST_CASE("empty file is an error") {
    const auto path = temp_file("empty.glove.txt");
    write_file(path, "");
    CHECK_THROWS_AS(load_vsm(path, VsmFormat::glove_text), ParseError);
}

TEST_CASE("duplicate tokens keep the first row") {
    const auto path = temp_file("dup.glove.txt");
    write_file(path, "a 1 0\nb 0 1\na 5 5\n");
    const auto vsm = load_vsm(path, VsmFormat::glove_text);
    CHECK(vsm.size() == 2);
    CHECK(vsm.duplicates_dropped() == 1);
    CHECK(vsm.row(0)[0] == doctest::Approx(1.0f));
}

TEST_CASE("w2v binary round trip including record newlines") {
    const auto path = temp_file("basic.w2v.bin");
    std::string content = "2 3\n";
    auto append_record = [&](const std::string& token, std::vector<float> values, bool newline) {
        content += token;
        content += ' ';
        content.append(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(float));
        if (newline) content += '\n';
    };
    append_record("alpha", {1.0f, 2.0f, 3.0f}, true);
    append_record("beta", {-1.0f, 0.5f, 0.25f}, false);
    write_file(path, content);

    const auto vsm = load_vsm(path, VsmFormat::w2v_binary);
    CHECK(vsm.size() == 2);
    CHECK(vsm.dim() == 3);
    CHECK(*vsm.find_row("alpha") == 0);
    CHECK(vsm.row(1)[2] == doctest::Approx(0.25f));
}

TEST_CASE("truncated w2v binary is an error") {
    const auto path = temp_file("trunc.w2v.bin");
    std::string content = "2 3\nalpha ";
    std::vector<float> values{1.0f, 2.0f, 3.0f};
    content.append(reinterpret_cast<const char*>(values.data()), 8); // half a vector
    write_file(path, content);
    CHECK_THROWS_AS(load_vsm(path, VsmFormat::w2v_binary), ParseError);
}

TEST_CASE("lookup with lowercase fallback") {
    const auto vsm = synthetic::tiny_vsm({"france", "paris"}, {{1, 0}, {0, 1}},
                                         CaseMode::lowercase_fallback);
    CHECK(vsm.lookup("France").has_value());
    CHECK(*vsm.find_row("France") == 0);
    CHECK_FALSE(vsm.lookup("zqxw").has_value());

    const auto exact = synthetic::tiny_vsm({"france"}, {{1, 0}}, CaseMode::exact);
    CHECK_FALSE(exact.lookup("France").has_value());
}

TEST_CASE("cosine basics") {
    const std::vector<double> ex{1, 0}, ey{0, 1}, diag{1, 1};
    CHECK(cosine(std::span<const double>(ex), std::span<const double>(ex)) == doctest::Approx(1.0));
    CHECK(cosine(std::span<const double>(ex), std::span<const double>(ey)) == doctest::Approx(0.0));
    // oracle: direct evaluation of a.b / (|a||b|)
    const double expected = (1.0 * 1.0 + 1.0 * 0.0) / (std::sqrt(2.0) * 1.0);
    CHECK(cosine(std::span<const double>(diag), std::span<const double>(ex)) ==
          doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(cosine(std::span<const double>(diag), std::span<const double>(ex)) -
                   0.70710678) < 1e-7);

    const std::vector<double> zero{0, 0};
    CHECK_THROWS_AS(cosine(std::span<const double>(zero), std::span<const double>(ex)),
                    NumericError);
}

TEST_CASE("cosine symmetry and scale invariance") {
    Rng rng(7);
    for (int it = 0; it < 50; ++it) {
        std::vector<double> a(5), b(5);
        for (auto& x : a) x = rng.next_normal();
        for (auto& x : b) x = rng.next_normal();
        const double ab = cosine(std::span<const double>(a), std::span<const double>(b));
        const double ba = cosine(std::span<const double>(b), std::span<const double>(a));
        CHECK(ab == ba);
        const double lambda = 0.1 + 10.0 * rng.next_double();
        std::vector<double> scaled(a);
        for (auto& x : scaled) x *= lambda;
        CHECK(std::abs(cosine(std::span<const double>(scaled), std::span<const double>(b)) - ab) <
              1e-9);
    }
}

TEST_CASE("score_all matches the per-row formula") {
    const auto vsm = synthetic::tiny_vsm({"a", "b", "c"}, {{1, 0}, {0, 1}, {-1, 0}});
    const std::vector<double> query{1.0, 0.1};
    const auto scores = score_all(vsm, query);
    CHECK(std::abs(scores[0] - 0.99504) < 1e-5);
    CHECK(std::abs(scores[1] - 0.09950) < 1e-5);
    CHECK(std::abs(scores[2] + 0.99504) < 1e-5);

    // query equal to a stored row
    const auto self = score_all(vsm, to_double(vsm.row(0)));
    CHECK(self[0] == doctest::Approx(1.0));
    CHECK(self[1] == doctest::Approx(0.0));
}

TEST_CASE("top_k_cosine ordering and honesty") {
    const auto vsm = synthetic::tiny_vsm({"a", "b", "c"}, {{1, 0}, {0, 1}, {-1, 0}});
    const std::vector<double> query{1.0, 0.1};
    const auto top = top_k_cosine(vsm, query, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].token == "a");
    CHECK(top[1].token == "b");
    CHECK(top[2].token == "c");

    const auto self = top_k_cosine(vsm, to_double(vsm.row(1)), 1);
    CHECK(self[0].token == "b");
    CHECK(self[0].score == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(top_k_cosine(vsm, query, 4), std::invalid_argument);
    CHECK_THROWS_AS(top_k_cosine(vsm, query, 0), std::invalid_argument);
    const std::vector<double> zero{0, 0};
    CHECK_THROWS_AS(top_k_cosine(vsm, zero, 1), NumericError);
}

TEST_CASE("ties break by ascending row index") {
    const auto vsm = synthetic::tiny_vsm({"a", "b", "c"}, {{0, 1}, {2, 0}, {1, 0}});
    const std::vector<double> query{1.0, 0.0};
    // rows b and c are exactly parallel to the query
    const auto top = top_k_cosine(vsm, query, 3);
    CHECK(top[0].token == "b");
    CHECK(top[1].token == "c");
    CHECK(top[0].score == top[1].score);
    CHECK(top[2].token == "a");
}

TEST_CASE("self-similarity property on a random vsm") {
    const auto planted = synthetic::planted_offset(11, 8, 40, 5, 3.0, 1.0, 0.0);
    const auto& vsm = planted.vsm;
    for (std::size_t i = 0; i < vsm.size(); i += 7) {
        const auto top = top_k_cosine(vsm, to_double(vsm.row(i)), 1);
        CHECK(top[0].token == vsm.token(i));
        CHECK(top[0].score == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("select_top_k agrees with sorting score_all") {
    Rng rng(23);
    for (int it = 0; it < 20; ++it) {
        const std::size_t n = 5 + rng.next_index(40);
        std::vector<double> scores(n);
        for (auto& s : scores) s = rng.next_index(12) / 4.0; // plenty of ties
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return a < b;
        });
        const std::size_t k = 1 + rng.next_index(n);
        const auto top = select_top_k(scores, k);
        REQUIRE(top.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(top[i].first == order[i]);
            CHECK(top[i].second == scores[order[i]]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(rank_of(scores, order[i]) == i + 1);
        }
    }
}

TEST_CASE("parallel scoring is identical to sequential") {
    const auto planted = synthetic::planted_offset(3, 16, 5000, 10, 4.0, 1.0, 0.0);
    std::vector<double> query(16);
    Rng rng(5);
    for (auto& x : query) x = rng.next_normal();
    const auto seq = score_all(planted.vsm, query, 1);
    const auto par = score_all(planted.vsm, query, 4);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) CHECK(seq[i] == par[i]);
}

TEST_CASE("native cache round trip") {
    const auto planted = synthetic::planted_offset(17, 6, 20, 4, 2.0, 1.0, 0.0);
    const auto path = temp_file("roundtrip.rhc");
    write_cache(planted.vsm, path);
    const auto loaded = read_cache(path, CaseMode::exact);
    REQUIRE(loaded.size() == planted.vsm.size());
    REQUIRE(loaded.dim() == planted.vsm.dim());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded.token(i) == planted.vsm.token(i));
        for (std::size_t k = 0; k < loaded.dim(); ++k) {
            CHECK(loaded.row(i)[k] == planted.vsm.row(i)[k]); // bit-exact at 32 bits
        }
    }
}

TEST_CASE("cache size arithmetic") {
    const auto vsm = synthetic::tiny_vsm({"aa", "b", "ccc"}, {{1, 0}, {0, 1}, {1, 1}});
    const auto path = temp_file("sized.rhc");
    write_cache(vsm, path);
    // magic + N + d + (len prefix + bytes) per token + N*d floats
    const std::size_t expected = 4 + 8 + (4 + 2) + (4 + 1) + (4 + 3) + 3 * 2 * 4;
    CHECK(fs::file_size(path) == expected);
}

TEST_CASE("cache rejects wrong magic and truncation") {
    const auto bad = temp_file("bad.rhc");
    write_file(bad, "NOPE-this-is-not-a-cache");
    CHECK_THROWS_AS(read_cache(bad), CacheError);

    const auto planted = synthetic::planted_offset(29, 4, 4, 3, 2.0, 1.0, 0.0);
    const auto path = temp_file("trunc.rhc");
    write_cache(planted.vsm, path);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    write_file(temp_file("trunc2.rhc"), bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(read_cache(temp_file("trunc2.rhc")), CacheError);
}

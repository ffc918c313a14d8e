#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "relhyper/evaluate.hpp"
#include "relhyper/rng.hpp"
#include "synthetic.hpp"

using namespace relhyper;

TEST_CASE("average precision on hand-checked cases") {
    const std::vector<std::size_t> ranks13{1, 3};
    CHECK(average_precision(ranks13, 2) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-9));
    const std::vector<std::size_t> rank1{1};
    CHECK(average_precision(rank1, 1) == 1.0);
    CHECK(average_precision({}, 1) == 0.0);
    CHECK_THROWS_AS(average_precision(rank1, 0), std::invalid_argument);
    const std::vector<std::size_t> bad{3, 3};
    CHECK_THROWS_AS(average_precision(bad, 2), std::invalid_argument);
}

TEST_CASE("sensitivity on hand-checked cases") {
    const std::vector<RankedToken> ranking{{"a", 0.9}, {"c", 0.8}, {"b", 0.7}};
    const auto r = sensitivity_at({"a", "b"}, ranking, 2);
    CHECK(r.hits == 1);
    CHECK(r.possible == 2);
    const auto perfect = sensitivity_at({"a"}, ranking, 1);
    CHECK(perfect.hits == 1);
    CHECK(perfect.possible == 1);
    const auto miss = sensitivity_at({"b"}, ranking, 2);
    CHECK(miss.hits == 0);
    CHECK(miss.possible == 1);
    CHECK_THROWS_AS(sensitivity_at({}, ranking, 1), std::invalid_argument);
}

TEST_CASE("metrics match brute-force enumeration on random rankings") {
    Rng rng(2025);
    for (int it = 0; it < 200; ++it) {
        // a random permutation of 20 tokens and a random gold subset
        std::vector<std::string> tokens;
        for (int i = 0; i < 20; ++i) tokens.push_back("tok" + std::to_string(i));
        rng.shuffle(tokens);
        const std::size_t n_gold = 1 + rng.next_index(5);
        std::set<std::string> golds;
        while (golds.size() < n_gold) {
            golds.insert("tok" + std::to_string(rng.next_index(20)));
        }

        std::vector<RankedToken> ranking;
        std::vector<std::size_t> positions;
        for (std::size_t r = 0; r < tokens.size(); ++r) {
            ranking.push_back({tokens[r], 1.0 - 0.01 * static_cast<double>(r)});
            if (golds.count(tokens[r])) positions.push_back(r + 1);
        }

        const double ap = average_precision(positions, golds.size());
        CHECK(ap == oracle::average_precision(tokens, golds)); // exactly

        const std::size_t k = 1 + rng.next_index(20);
        const auto s = sensitivity_at(std::vector<std::string>(golds.begin(), golds.end()),
                                      ranking, k);
        CHECK(s.hits == oracle::sensitivity_hits(tokens, golds, k));
        CHECK(s.possible == golds.size());
        const auto sp = sensitivity_from_positions(positions, golds.size(), k);
        CHECK(sp.hits == s.hits);
    }
}

TEST_CASE("k_sens policy parsing") {
    CHECK(KSensPolicy::parse("auto")->auto_cutoff);
    CHECK(KSensPolicy::parse("3")->fixed == 3);
    CHECK_FALSE(KSensPolicy::parse("0").has_value());
    CHECK_FALSE(KSensPolicy::parse("-2").has_value());
    CHECK(KSensPolicy{}.resolve(4) == 4);
    CHECK(KSensPolicy{false, 2}.resolve(4) == 2);
}

TEST_CASE("harmonic f1") {
    CHECK(harmonic_f1(0.4, 0.6) == doctest::Approx(0.48));
    CHECK(harmonic_f1(0.0, 0.9) == 0.0);
    CHECK(harmonic_f1(1.0, 1.0) == 1.0);
}

TEST_CASE("loo runs one fold per resolved pair") {
    const auto planted = synthetic::planted_offset(300, 10, 120, 10, 4.0, 0.4, 0.0);
    const auto resolved = resolve(planted.category, planted.vsm);
    ModelConfig cfg;
    cfg.kind = ModelKind::cosavg3;
    cfg.seed = 3;
    const auto eval = loo_evaluate(resolved, planted.vsm, cfg, 5);
    CHECK(eval.folds.size() == 10);
    CHECK(eval.skip_reason.empty());
    for (const auto& fold : eval.folds) {
        CHECK(fold.top_ranking.size() == 5);
        CHECK(fold.gold_positions.size() == 1);
        CHECK(fold.gold_positions[0].rank >= 1);
    }
}

TEST_CASE("two-pair categories evaluate with single-pair folds") {
    const auto planted = synthetic::planted_offset(301, 6, 30, 2, 3.0, 0.5, 0.0);
    const auto resolved = resolve(planted.category, planted.vsm);
    REQUIRE(resolved.pairs.size() == 2);
    ModelConfig cfg;
    cfg.kind = ModelKind::cosavg3;
    const auto eval = loo_evaluate(resolved, planted.vsm, cfg, 3);
    CHECK(eval.folds.size() == 2);
    // with one training pair the query point equals the training target, and
    // with a zero-noise construction the held-out target still wins
    for (const auto& fold : eval.folds) CHECK(fold.gold_positions[0].rank <= 2);
}

TEST_CASE("categories with fewer than two pairs are skipped with a reason") {
    const auto planted = synthetic::planted_offset(302, 6, 30, 1, 3.0, 0.5, 0.0);
    const auto resolved = resolve(planted.category, planted.vsm);
    ModelConfig cfg;
    const auto eval = loo_evaluate(resolved, planted.vsm, cfg, 3);
    CHECK(eval.folds.empty());
    CHECK_FALSE(eval.skip_reason.empty());
}

TEST_CASE("planted construction yields perfect recovery for svmcos") {
    const auto planted = synthetic::planted_offset(303, 12, 150, 12, 5.0, 0.3, 0.0);
    const auto resolved = resolve(planted.category, planted.vsm);
    ModelConfig cfg;
    cfg.kind = ModelKind::svmcos;
    cfg.seed = 42;
    const auto eval = loo_evaluate(resolved, planted.vsm, cfg, 3, 2);
    for (const auto& fold : eval.folds) {
        CHECK(fold.top_ranking[0].token == "tgt" + fold.held_out_source.substr(3));
        CHECK(fold.gold_positions[0].rank == 1);
    }
}

TEST_CASE("aggregate matches hand computation") {
    CategoryEval cat;
    cat.category_id = "A";
    cat.n_dropped = 1;
    FoldResult hit;
    hit.category_id = "A";
    hit.held_out_source = "q1";
    hit.gold_targets = {"g"};
    hit.gold_positions = {{"g", 1}};
    FoldResult miss;
    miss.category_id = "A";
    miss.held_out_source = "q2";
    miss.gold_targets = {"g"};
    miss.gold_positions = {{"g", 40}};
    cat.folds = {hit, miss};

    const auto report = aggregate(std::vector<CategoryEval>{cat}, KSensPolicy{});
    CHECK(report.dataset.n_queries == 2);
    CHECK(report.dataset.n_dropped == 1);
    CHECK(report.dataset.sensitivity == doctest::Approx(0.5));
    CHECK(report.dataset.map == doctest::Approx(0.5 * (1.0 + 1.0 / 40.0)));
    CHECK(report.dataset.f1 ==
          doctest::Approx(harmonic_f1(report.dataset.sensitivity, report.dataset.map)));

    // all queries perfect
    CategoryEval perfect = cat;
    perfect.folds[1].gold_positions = {{"g", 1}};
    const auto p = aggregate(std::vector<CategoryEval>{perfect}, KSensPolicy{});
    CHECK(p.dataset.sensitivity == 1.0);
    CHECK(p.dataset.map == 1.0);
    CHECK(p.dataset.f1 == 1.0);

    CHECK_THROWS_AS(aggregate(std::vector<CategoryEval>{}, KSensPolicy{}),
                    std::invalid_argument);
}

TEST_CASE("micro averaging pools queries, not categories") {
    // category A: 1 query with AP 1; category B: 3 queries with AP 0
    CategoryEval a, b;
    a.category_id = "A";
    b.category_id = "B";
    FoldResult f;
    f.gold_targets = {"g"};
    f.gold_positions = {{"g", 1}};
    a.folds = {f};
    f.gold_positions = {{"g", 100}};
    b.folds = {f, f, f};
    const auto report = aggregate(std::vector<CategoryEval>{a, b}, KSensPolicy{});
    // pooled: 1 hit of 4 possible, mean AP over 4 queries
    CHECK(report.dataset.sensitivity == doctest::Approx(0.25));
    CHECK(report.dataset.map == doctest::Approx((1.0 + 3.0 * 0.01) / 4.0));
}

TEST_CASE("fold order permutation leaves metrics unchanged") {
    const auto planted = synthetic::planted_offset(304, 8, 80, 8, 4.0, 0.5, 0.05);
    auto resolved = resolve(planted.category, planted.vsm);
    ModelConfig cfg;
    cfg.kind = ModelKind::svmcos;
    cfg.seed = 77;
    const auto eval1 = loo_evaluate(resolved, planted.vsm, cfg, 4);
    const auto report1 = aggregate(std::vector<CategoryEval>{eval1}, KSensPolicy{});

    Rng rng(1);
    rng.shuffle(resolved.pairs);
    const auto eval2 = loo_evaluate(resolved, planted.vsm, cfg, 4);
    const auto report2 = aggregate(std::vector<CategoryEval>{eval2}, KSensPolicy{});

    CHECK(report1.dataset.sensitivity == report2.dataset.sensitivity);
    CHECK(report1.dataset.map == report2.dataset.map);
    CHECK(report1.dataset.f1 == report2.dataset.f1);
    REQUIRE(eval1.folds.size() == eval2.folds.size());
    for (std::size_t i = 0; i < eval1.folds.size(); ++i) {
        CHECK(eval1.folds[i].held_out_source == eval2.folds[i].held_out_source);
        CHECK(eval1.folds[i].gold_positions[0].rank == eval2.folds[i].gold_positions[0].rank);
    }
}

TEST_CASE("parallel and sequential evaluation agree") {
    const auto planted = synthetic::planted_offset(305, 8, 60, 8, 4.0, 0.5, 0.1);
    const auto resolved = resolve(planted.category, planted.vsm);
    ModelConfig cfg;
    cfg.kind = ModelKind::svmcos;
    cfg.seed = 5;
    const auto seq = loo_evaluate(resolved, planted.vsm, cfg, 4, 1);
    const auto par = loo_evaluate(resolved, planted.vsm, cfg, 4, 4);
    REQUIRE(seq.folds.size() == par.folds.size());
    for (std::size_t i = 0; i < seq.folds.size(); ++i) {
        CHECK(seq.folds[i].held_out_source == par.folds[i].held_out_source);
        REQUIRE(seq.folds[i].top_ranking.size() == par.folds[i].top_ranking.size());
        for (std::size_t j = 0; j < seq.folds[i].top_ranking.size(); ++j) {
            CHECK(seq.folds[i].top_ranking[j].token == par.folds[i].top_ranking[j].token);
            CHECK(seq.folds[i].top_ranking[j].score == par.folds[i].top_ranking[j].score);
        }
    }
}

TEST_CASE("dataset metrics are invariant to category ordering") {
    const auto p1 = synthetic::planted_offset(306, 6, 40, 5, 3.0, 0.5, 0.1);
    auto cat2 = synthetic::planted_offset(307, 6, 40, 5, 3.0, 0.5, 0.1);
    cat2.category.id = "S99";
    const auto r1 = resolve(p1.category, p1.vsm);
    const auto r2 = resolve(cat2.category, cat2.vsm);
    ModelConfig cfg;
    cfg.kind = ModelKind::cosavg3;
    const auto e1 = loo_evaluate(r1, p1.vsm, cfg, 3);
    const auto e2 = loo_evaluate(r2, cat2.vsm, cfg, 3);
    const auto ab = aggregate(std::vector<CategoryEval>{e1, e2}, KSensPolicy{});
    const auto ba = aggregate(std::vector<CategoryEval>{e2, e1}, KSensPolicy{});
    CHECK(ab.dataset.f1 == ba.dataset.f1);
    CHECK(ab.per_category[0].first == ba.per_category[0].first);
}

TEST_CASE("honesty canary: lrcos without classifier puts the source at rank 1") {
    const auto planted = synthetic::planted_offset(308, 8, 70, 8, 3.0, 0.6, 0.1);
    const auto resolved = resolve(planted.category, planted.vsm);
    ModelConfig cfg;
    cfg.kind = ModelKind::lrcos;
    cfg.use_target_classifier = false;
    const auto eval = loo_evaluate(resolved, planted.vsm, cfg, 1);
    for (const auto& fold : eval.folds) {
        REQUIRE_FALSE(fold.top_ranking.empty());
        CHECK(fold.top_ranking[0].token == fold.held_out_source);
    }
}

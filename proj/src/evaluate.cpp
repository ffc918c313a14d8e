#include "relhyper/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "relhyper/parallel.hpp"
#include "relhyper/rng.hpp"

namespace relhyper {

double average_precision(std::span<const std::size_t> gold_positions, std::size_t n_gold) {
    if (n_gold == 0) throw std::invalid_argument("average_precision: n_gold must be positive");
    if (gold_positions.size() > n_gold) {
        throw std::invalid_argument("average_precision: more positions than golds");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < gold_positions.size(); ++j) {
        if (j > 0 && gold_positions[j] <= gold_positions[j - 1]) {
            throw std::invalid_argument("average_precision: positions must be strictly increasing");
        }
        sum += static_cast<double>(j + 1) / static_cast<double>(gold_positions[j]);
    }
    return sum / static_cast<double>(n_gold);
}

SensitivityResult sensitivity_at(const std::vector<std::string>& gold_tokens,
                                 std::span<const RankedToken> ranking, std::size_t k_sens) {
    if (gold_tokens.empty()) throw std::invalid_argument("sensitivity_at: empty gold set");
    SensitivityResult r;
    r.possible = gold_tokens.size();
    const std::size_t limit = std::min(k_sens, ranking.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (std::find(gold_tokens.begin(), gold_tokens.end(), ranking[i].token) !=
            gold_tokens.end()) {
            ++r.hits;
        }
    }
    return r;
}

SensitivityResult sensitivity_from_positions(std::span<const std::size_t> positions,
                                             std::size_t n_gold, std::size_t k_sens) {
    if (n_gold == 0) throw std::invalid_argument("sensitivity: empty gold set");
    SensitivityResult r;
    r.possible = n_gold;
    for (std::size_t p : positions) {
        if (p <= k_sens) ++r.hits;
    }
    return r;
}

std::string KSensPolicy::to_string() const {
    return auto_cutoff ? "auto" : std::to_string(fixed);
}

std::optional<KSensPolicy> KSensPolicy::parse(std::string_view s) {
    if (s == "auto") return KSensPolicy{};
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value == 0) return std::nullopt;
    return KSensPolicy{false, value};
}

std::uint64_t fold_seed(std::uint64_t global_seed, std::string_view category_id,
                        std::string_view source) {
    return derive_seed(global_seed, category_id, source);
}

CategoryEval loo_evaluate(const ResolvedCategory& category, const VectorSpaceModel& vsm,
                          const ModelConfig& cfg, std::size_t k_eval, int n_threads) {
    CategoryEval out;
    out.category_id = category.category.id;
    out.n_resolved = category.pairs.size();
    out.n_dropped = category.dropped.size();
    if (category.pairs.size() < 2) {
        out.skip_reason = "fewer than 2 resolved pairs";
        return out;
    }

    // fold identity is the held-out pair, in canonical order
    std::vector<std::size_t> order(category.pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const ResolvedPair& pa = category.pairs[a];
        const ResolvedPair& pb = category.pairs[b];
        if (pa.source_row != pb.source_row) return pa.source_row < pb.source_row;
        return pa.target_rows < pb.target_rows;
    });

    NeighborTable neighbors;
    const NeighborTable* table = nullptr;
    if (cfg.kind == ModelKind::svmcos && cfg.n_unlabeled > 0) {
        neighbors = precompute_neighbors(vsm, category.pairs, cfg.n_unlabeled, n_threads);
        table = &neighbors;
    }

    const std::size_t n = category.pairs.size();
    const std::size_t k = std::min(k_eval, vsm.size());
    out.folds.resize(n);
    run_parallel(n, n_threads, [&](std::size_t slot) {
        const std::size_t held = order[slot];
        const ResolvedPair& held_pair = category.pairs[held];

        std::vector<ResolvedPair> training;
        training.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != held) training.push_back(category.pairs[i]);
        }

        ModelConfig fold_cfg = cfg;
        fold_cfg.seed = fold_seed(cfg.seed, out.category_id, held_pair.source);
        const TrainedRelationModel model = fit(training, vsm, fold_cfg, table);
        const QueryPoint qp = query_point(model, held_pair.source, vsm);
        const std::vector<double> scores = score_tokens(model, qp, vsm);

        FoldResult fr;
        fr.category_id = out.category_id;
        fr.held_out_source = held_pair.source;
        fr.gold_targets = held_pair.targets;
        if (k > 0) {
            for (const auto& [row, score] : select_top_k(scores, k)) {
                fr.top_ranking.push_back({vsm.token(row), score});
            }
        }
        for (std::size_t t = 0; t < held_pair.target_rows.size(); ++t) {
            fr.gold_positions.push_back(
                {held_pair.targets[t], rank_of(scores, held_pair.target_rows[t])});
        }
        std::sort(fr.gold_positions.begin(), fr.gold_positions.end(),
                  [](const GoldPosition& a, const GoldPosition& b) { return a.rank < b.rank; });
        out.folds[slot] = std::move(fr);
    });
    return out;
}

double harmonic_f1(double sensitivity, double map) {
    if (sensitivity <= 0.0 || map <= 0.0) return 0.0;
    return 2.0 * sensitivity * map / (sensitivity + map);
}

MetricsReport aggregate(std::span<const CategoryEval> categories, const KSensPolicy& k_sens) {
    std::vector<const CategoryEval*> sorted;
    for (const auto& c : categories) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(), [](const CategoryEval* a, const CategoryEval* b) {
        return a->category_id < b->category_id;
    });

    MetricsReport report;
    std::size_t total_hits = 0, total_possible = 0, total_queries = 0;
    double total_ap = 0.0;

    for (const CategoryEval* cat : sorted) {
        std::size_t hits = 0, possible = 0;
        double ap_sum = 0.0;
        for (const FoldResult& fold : cat->folds) {
            const std::size_t n_gold = fold.gold_positions.size();
            std::vector<std::size_t> positions;
            positions.reserve(n_gold);
            for (const GoldPosition& g : fold.gold_positions) positions.push_back(g.rank);
            const auto s =
                sensitivity_from_positions(positions, n_gold, k_sens.resolve(n_gold));
            hits += s.hits;
            possible += s.possible;
            ap_sum += average_precision(positions, n_gold);
        }
        MetricSet m;
        m.n_queries = cat->folds.size();
        m.n_dropped = cat->n_dropped;
        if (!cat->folds.empty()) {
            m.sensitivity = static_cast<double>(hits) / static_cast<double>(possible);
            m.map = ap_sum / static_cast<double>(cat->folds.size());
            m.f1 = harmonic_f1(m.sensitivity, m.map);
        }
        report.per_category.emplace_back(cat->category_id, m);

        total_hits += hits;
        total_possible += possible;
        total_queries += cat->folds.size();
        total_ap += ap_sum;
        report.dataset.n_dropped += cat->n_dropped;
    }

    if (total_queries == 0) throw std::invalid_argument("aggregate: no evaluable queries");
    report.dataset.n_queries = total_queries;
    report.dataset.sensitivity =
        static_cast<double>(total_hits) / static_cast<double>(total_possible);
    report.dataset.map = total_ap / static_cast<double>(total_queries);
    report.dataset.f1 = harmonic_f1(report.dataset.sensitivity, report.dataset.map);
    return report;
}

} // namespace relhyper

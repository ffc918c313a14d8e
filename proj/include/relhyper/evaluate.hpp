#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relhyper/models.hpp"
#include "relhyper/relations.hpp"
#include "relhyper/vector_space.hpp"

namespace relhyper {

// AP over a full ranking: (1/n_gold) * sum over retrieved golds of
// (number of golds at rank <= r) / r. Positions are 1-based and strictly
// increasing; golds that were never retrieved contribute zero.
double average_precision(std::span<const std::size_t> gold_positions, std::size_t n_gold);

struct SensitivityResult {
    std::size_t hits = 0;
    std::size_t possible = 0;
};

SensitivityResult sensitivity_at(const std::vector<std::string>& gold_tokens,
                                 std::span<const RankedToken> ranking, std::size_t k_sens);
SensitivityResult sensitivity_from_positions(std::span<const std::size_t> positions,
                                             std::size_t n_gold, std::size_t k_sens);

// Rank cutoff for sensitivity. Auto means |gold targets of the query|:
// top-1 accuracy for single-target pairs, R-precision for multi-target.
struct KSensPolicy {
    bool auto_cutoff = true;
    std::size_t fixed = 1;

    std::size_t resolve(std::size_t n_golds) const { return auto_cutoff ? n_golds : fixed; }
    std::string to_string() const;
    static std::optional<KSensPolicy> parse(std::string_view s);
};

struct GoldPosition {
    std::string token;
    std::size_t rank = 0; // 1-based, against the honest full-vocabulary ranking
};

struct FoldResult {
    std::string category_id;
    std::string held_out_source;
    std::vector<std::string> gold_targets;
    std::vector<RankedToken> top_ranking;    // truncated to k_eval for storage only
    std::vector<GoldPosition> gold_positions; // ascending rank
};

struct CategoryEval {
    std::string category_id;
    std::size_t n_resolved = 0;
    std::size_t n_dropped = 0;
    std::string skip_reason; // non-empty when the category was not evaluable
    std::vector<FoldResult> folds;
};

std::uint64_t fold_seed(std::uint64_t global_seed, std::string_view category_id,
                        std::string_view source);

// Leave-one-out: each resolved pair is held out once, the model is fitted on
// the remaining pairs, and the full vocabulary is ranked for the held-out
// source. Per-fold seeds derive from (cfg.seed, category id, source), so
// results do not depend on pair order or scheduling.
CategoryEval loo_evaluate(const ResolvedCategory& category, const VectorSpaceModel& vsm,
                          const ModelConfig& cfg, std::size_t k_eval, int n_threads = 1);

struct MetricSet {
    double sensitivity = 0.0;
    double map = 0.0;
    double f1 = 0.0;
    std::size_t n_queries = 0;
    std::size_t n_dropped = 0;
};

struct MetricsReport {
    std::vector<std::pair<std::string, MetricSet>> per_category; // sorted by id
    MetricSet dataset;
};

double harmonic_f1(double sensitivity, double map);

// Micro-averaging: queries pool across the whole dataset; sensitivity is
// sum(hits)/sum(possible) and MAP is the mean per-query AP.
MetricsReport aggregate(std::span<const CategoryEval> categories, const KSensPolicy& k_sens);

} // namespace relhyper

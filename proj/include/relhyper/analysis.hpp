#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "relhyper/models.hpp"
#include "relhyper/relations.hpp"
#include "relhyper/vector_space.hpp"

namespace relhyper {

// Pairwise cosine statistics over a category's offsets (target - source, one
// offset per in-vocabulary target alternative), computed over all C(n,2)
// unordered distinct pairs.
struct OffsetStats {
    std::string category_id;
    std::size_t n_offsets = 0;
    double mean_pairwise_cosine = 0.0;
    double min = 0.0;
    double p25 = 0.0;
    double median = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

OffsetStats offset_stats(const ResolvedCategory& category, const VectorSpaceModel& vsm);

// Pools the within-category pairwise cosines of every evaluable category into
// one distribution (id "dataset"). Categories with fewer than two offsets are
// skipped.
OffsetStats pooled_offset_stats(std::span<const ResolvedCategory> categories,
                                const VectorSpaceModel& vsm);

// One record per (model, leave-one-out fold, gold target): how far the query
// point landed from the target in Euclidean terms, its cosine with the
// target, and its cosines with non-target tokens sampled near the query
// point (top cosine neighbors with the golds removed).
struct DiagnosticsRecord {
    std::string model_label;
    std::string category_id;
    std::string source;
    std::string target;
    double euclid_qp_target = 0.0;
    double cos_qp_target = 0.0;
    std::vector<double> cos_qp_nontargets;
};

std::vector<DiagnosticsRecord> query_point_diagnostics(const ResolvedCategory& category,
                                                       const VectorSpaceModel& vsm,
                                                       const ModelConfig& cfg_a,
                                                       const ModelConfig& cfg_b, int n_nontargets,
                                                       std::uint64_t seed, int n_threads = 1);

// CSV with columns (model, category_id, metric, value), one row per
// measurement; metric is euclid_target, cos_target or cos_nontarget.
void emit_kde_data(std::span<const DiagnosticsRecord> records, const std::filesystem::path& path,
                   std::string_view config_echo = {});

} // namespace relhyper

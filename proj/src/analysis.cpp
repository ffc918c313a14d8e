#include "relhyper/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "relhyper/errors.hpp"
#include "relhyper/evaluate.hpp"
#include "relhyper/parallel.hpp"
#include "relhyper/reports.hpp"

namespace relhyper {

namespace {

Matrix gather_offsets(const ResolvedCategory& category, const VectorSpaceModel& vsm) {
    Matrix offsets;
    for (const ResolvedPair& pair : category.pairs) {
        const auto src = vsm.row(pair.source_row);
        for (std::size_t row : pair.target_rows) {
            const auto tgt = vsm.row(row);
            std::vector<double> offset(vsm.dim());
            for (std::size_t k = 0; k < vsm.dim(); ++k) {
                offset[k] = double(tgt[k]) - double(src[k]);
            }
            offsets.push_back(std::move(offset));
        }
    }
    return offsets;
}

std::vector<double> pairwise_cosines(const Matrix& offsets) {
    std::vector<double> values;
    values.reserve(offsets.size() * (offsets.size() - 1) / 2);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        for (std::size_t j = i + 1; j < offsets.size(); ++j) {
            values.push_back(cosine(std::span<const double>(offsets[i]),
                                    std::span<const double>(offsets[j])));
        }
    }
    return values;
}

OffsetStats summarize(std::string id, std::size_t n_offsets, const std::vector<double>& values) {
    OffsetStats s;
    s.category_id = std::move(id);
    s.n_offsets = n_offsets;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean_pairwise_cosine = sum / static_cast<double>(values.size());
    s.min = percentile(values, 0.0);
    s.p25 = percentile(values, 25.0);
    s.median = percentile(values, 50.0);
    s.p75 = percentile(values, 75.0);
    s.max = percentile(values, 100.0);
    return s;
}

} // namespace

OffsetStats offset_stats(const ResolvedCategory& category, const VectorSpaceModel& vsm) {
    const Matrix offsets = gather_offsets(category, vsm);
    if (offsets.size() < 2) {
        throw std::invalid_argument("offset_stats: need at least 2 offsets in category '" +
                                    category.category.id + "'");
    }
    return summarize(category.category.id, offsets.size(), pairwise_cosines(offsets));
}

OffsetStats pooled_offset_stats(std::span<const ResolvedCategory> categories,
                                const VectorSpaceModel& vsm) {
    std::vector<double> pooled;
    std::size_t n_offsets = 0;
    for (const ResolvedCategory& category : categories) {
        const Matrix offsets = gather_offsets(category, vsm);
        if (offsets.size() < 2) continue;
        const std::vector<double> values = pairwise_cosines(offsets);
        pooled.insert(pooled.end(), values.begin(), values.end());
        n_offsets += offsets.size();
    }
    if (pooled.empty()) {
        throw std::invalid_argument("pooled_offset_stats: no category with 2 or more offsets");
    }
    return summarize("dataset", n_offsets, pooled);
}

std::vector<DiagnosticsRecord> query_point_diagnostics(const ResolvedCategory& category,
                                                       const VectorSpaceModel& vsm,
                                                       const ModelConfig& cfg_a,
                                                       const ModelConfig& cfg_b, int n_nontargets,
                                                       std::uint64_t seed, int n_threads) {
    if (category.pairs.size() < 2) {
        throw std::invalid_argument("query_point_diagnostics: category '" + category.category.id +
                                    "' has fewer than 2 resolved pairs");
    }
    if (n_nontargets <= 0) {
        throw std::invalid_argument("query_point_diagnostics: n_nontargets must be positive");
    }

    std::vector<std::size_t> order(category.pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const ResolvedPair& pa = category.pairs[a];
        const ResolvedPair& pb = category.pairs[b];
        if (pa.source_row != pb.source_row) return pa.source_row < pb.source_row;
        return pa.target_rows < pb.target_rows;
    });

    const ModelConfig* configs[2] = {&cfg_a, &cfg_b};
    NeighborTable neighbors;
    const NeighborTable* table = nullptr;
    if ((cfg_a.kind == ModelKind::svmcos && cfg_a.n_unlabeled > 0) ||
        (cfg_b.kind == ModelKind::svmcos && cfg_b.n_unlabeled > 0)) {
        const int max_unlabeled = std::max(cfg_a.n_unlabeled, cfg_b.n_unlabeled);
        neighbors = precompute_neighbors(vsm, category.pairs, max_unlabeled, n_threads);
        table = &neighbors;
    }

    const std::size_t n = category.pairs.size();
    std::vector<std::vector<DiagnosticsRecord>> slots(n);
    run_parallel(n, n_threads, [&](std::size_t slot) {
        const std::size_t held = order[slot];
        const ResolvedPair& held_pair = category.pairs[held];
        std::vector<ResolvedPair> training;
        training.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != held) training.push_back(category.pairs[i]);
        }

        const std::set<std::size_t> gold_rows(held_pair.target_rows.begin(),
                                              held_pair.target_rows.end());
        for (const ModelConfig* cfg : configs) {
            ModelConfig fold_cfg = *cfg;
            fold_cfg.seed = fold_seed(seed, category.category.id, held_pair.source);
            const TrainedRelationModel model =
                fit(training, vsm, fold_cfg,
                    (cfg->kind == ModelKind::svmcos && cfg->n_unlabeled > 0) ? table : nullptr);
            const QueryPoint qp = query_point(model, held_pair.source, vsm);
            const std::vector<double> cos_scores = score_all(vsm, qp.vector);

            std::vector<double> nontarget_cos;
            const std::size_t want =
                std::min(static_cast<std::size_t>(n_nontargets) + gold_rows.size(), vsm.size());
            for (const auto& [row, score] : select_top_k(cos_scores, want)) {
                if (gold_rows.count(row)) continue;
                nontarget_cos.push_back(score);
                if (nontarget_cos.size() == static_cast<std::size_t>(n_nontargets)) break;
            }

            for (std::size_t t = 0; t < held_pair.target_rows.size(); ++t) {
                const auto tgt = vsm.row(held_pair.target_rows[t]);
                double dist_sq = 0.0;
                for (std::size_t k = 0; k < vsm.dim(); ++k) {
                    const double diff = qp.vector[k] - double(tgt[k]);
                    dist_sq += diff * diff;
                }
                DiagnosticsRecord rec;
                rec.model_label = cfg->label();
                rec.category_id = category.category.id;
                rec.source = held_pair.source;
                rec.target = held_pair.targets[t];
                rec.euclid_qp_target = std::sqrt(dist_sq);
                rec.cos_qp_target = cos_scores[held_pair.target_rows[t]];
                rec.cos_qp_nontargets = nontarget_cos;
                slots[slot].push_back(std::move(rec));
            }
        }
    });

    std::vector<DiagnosticsRecord> records;
    for (auto& slot : slots) {
        for (auto& rec : slot) records.push_back(std::move(rec));
    }
    return records;
}

void emit_kde_data(std::span<const DiagnosticsRecord> records, const std::filesystem::path& path,
                   std::string_view config_echo) {
    if (records.empty()) throw std::invalid_argument("emit_kde_data: no records");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "# relhyper-kde-csv v1";
    if (!config_echo.empty()) out << " " << config_echo;
    out << "\n";
    out << "model,category_id,metric,value\n";
    for (const DiagnosticsRecord& rec : records) {
        out << rec.model_label << ',' << rec.category_id << ",euclid_target,"
            << format9(rec.euclid_qp_target) << '\n';
        out << rec.model_label << ',' << rec.category_id << ",cos_target,"
            << format9(rec.cos_qp_target) << '\n';
        for (double v : rec.cos_qp_nontargets) {
            out << rec.model_label << ',' << rec.category_id << ",cos_nontarget," << format9(v)
                << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace relhyper

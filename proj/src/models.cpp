#include "relhyper/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "relhyper/errors.hpp"
#include "relhyper/parallel.hpp"
#include "relhyper/rng.hpp"

namespace relhyper {

namespace {

using json = nlohmann::ordered_json;

// canonical training order: fold content determines the fit, never the order
// in which pairs arrived
std::vector<const ResolvedPair*> canonical_order(std::span<const ResolvedPair> pairs) {
    std::vector<const ResolvedPair*> sorted;
    sorted.reserve(pairs.size());
    for (const auto& p : pairs) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const ResolvedPair* a, const ResolvedPair* b) {
        if (a->source_row != b->source_row) return a->source_row < b->source_row;
        return a->target_rows < b->target_rows;
    });
    return sorted;
}

std::vector<double> row_as_double(const VectorSpaceModel& vsm, std::size_t row) {
    return to_double(vsm.row(row));
}

std::vector<std::size_t> neighbor_candidates(const VectorSpaceModel& vsm, std::size_t source_row,
                                             std::size_t count) {
    count = std::min(count, vsm.size() > 0 ? vsm.size() - 1 : 0);
    if (count == 0) return {};
    const std::vector<double> query = row_as_double(vsm, source_row);
    // +1 so the source itself can be removed from the prefix
    auto ranked = top_k_rows(vsm, query, std::min(count + 1, vsm.size()));
    std::vector<std::size_t> out;
    out.reserve(count);
    for (const auto& [row, score] : ranked) {
        if (row == source_row) continue;
        out.push_back(row);
        if (out.size() == count) break;
    }
    return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream) {
    Fnv1a h;
    h.update_u64(seed).update(stream);
    return h.digest();
}

struct FoldData {
    std::vector<const ResolvedPair*> pairs;
    std::set<std::size_t> target_rows;
    Matrix target_vectors;  // one per (pair, alternative)
    Matrix offsets;         // target - source, aligned with target_vectors
    std::vector<double> offset_norms;
};

FoldData gather(std::span<const ResolvedPair> training_pairs, const VectorSpaceModel& vsm) {
    FoldData data;
    data.pairs = canonical_order(training_pairs);
    for (const ResolvedPair* p : data.pairs) {
        for (std::size_t row : p->target_rows) data.target_rows.insert(row);
    }
    for (const ResolvedPair* p : data.pairs) {
        const auto src = vsm.row(p->source_row);
        for (std::size_t row : p->target_rows) {
            const auto tgt = vsm.row(row);
            std::vector<double> offset(vsm.dim());
            double norm_sq = 0.0;
            for (std::size_t k = 0; k < vsm.dim(); ++k) {
                offset[k] = double(tgt[k]) - double(src[k]);
                norm_sq += offset[k] * offset[k];
            }
            data.target_vectors.push_back(row_as_double(vsm, row));
            data.offsets.push_back(std::move(offset));
            data.offset_norms.push_back(std::sqrt(norm_sq));
        }
    }
    return data;
}

std::vector<double> normalized(std::vector<double> v, const char* what) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw NumericError(std::string(what) + ": zero direction");
    for (double& x : v) x /= norm;
    return v;
}

std::vector<double> mean_of(const Matrix& rows) {
    std::vector<double> mean(rows.front().size(), 0.0);
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += r[k];
    }
    for (double& x : mean) x /= static_cast<double>(rows.size());
    return mean;
}

void fit_svmcos(TrainedRelationModel& model, const FoldData& data, const VectorSpaceModel& vsm,
                const ModelConfig& cfg, const NeighborTable* neighbors) {
    Matrix negatives;
    std::size_t n_unlabeled_used = 0;
    for (const ResolvedPair* p : data.pairs) {
        negatives.push_back(row_as_double(vsm, p->source_row));
    }
    const std::size_t want = static_cast<std::size_t>(std::max(0, cfg.n_unlabeled));
    for (const ResolvedPair* p : data.pairs) {
        if (want == 0) break;
        std::vector<std::size_t> candidates;
        if (neighbors) {
            auto it = neighbors->find(p->source_row);
            if (it == neighbors->end()) {
                throw std::invalid_argument("fit: neighbor table is missing a source row");
            }
            candidates = it->second;
        } else {
            candidates = neighbor_candidates(vsm, p->source_row, want + data.target_rows.size());
        }
        std::size_t taken = 0;
        for (std::size_t row : candidates) {
            if (data.target_rows.count(row)) continue; // would contradict its positive label
            negatives.push_back(row_as_double(vsm, row));
            ++n_unlabeled_used;
            if (++taken == want) break;
        }
    }
    model.summary.n_source_negatives = data.pairs.size();
    model.summary.n_unlabeled = n_unlabeled_used;

    SvmConfig svm_cfg = cfg.svm;
    svm_cfg.seed = cfg.seed;
    const SvmResult svm = train_linear_svm(data.target_vectors, negatives, svm_cfg);
    model.summary.svm_converged = svm.converged;

    std::vector<double> direction = normalized(svm.plane.w, "svmcos");
    // targets were the positive class, so w already points at them; guard the
    // orientation against pathological fits anyway
    double pos_mean = 0.0, neg_mean = 0.0;
    for (const auto& t : data.target_vectors) pos_mean += svm.plane.decision(t);
    for (const auto& s : negatives) neg_mean += svm.plane.decision(s);
    pos_mean /= static_cast<double>(data.target_vectors.size());
    neg_mean /= static_cast<double>(negatives.size());
    if (pos_mean < neg_mean) {
        for (double& x : direction) x = -x;
    }
    model.direction = std::move(direction);
    model.magnitude = percentile(data.offset_norms, cfg.alpha);
}

void fit_pca(TrainedRelationModel& model, const FoldData& data) {
    std::vector<double> direction;
    if (data.offsets.size() < 2) {
        direction = normalized(data.offsets.front(), "pca_lr");
    } else {
        try {
            direction = first_principal_component(data.offsets);
        } catch (const NumericError&) {
            // offsets with no variance share one well-defined direction
            direction = normalized(mean_of(data.offsets), "pca_lr");
        }
    }
    model.direction = std::move(direction);
    model.magnitude = percentile(data.offset_norms, 25.0);
}

void fit_classifier(TrainedRelationModel& model, const FoldData& data,
                    const VectorSpaceModel& vsm, const ModelConfig& cfg) {
    const std::size_t n_pos = data.target_vectors.size();
    const std::size_t available = vsm.size() - data.target_rows.size();
    std::size_t n_neg = static_cast<std::size_t>(std::max(1, cfg.lr_negative_multiplier)) * n_pos;
    n_neg = std::min(n_neg, available);
    if (n_neg == 0) throw NumericError("fit: no vocabulary left to sample classifier negatives");

    Rng rng(stream_seed(cfg.seed, "classifier-negatives"));
    std::set<std::size_t> drawn;
    Matrix negatives;
    negatives.reserve(n_neg);
    while (negatives.size() < n_neg) {
        const std::size_t row = rng.next_index(vsm.size());
        if (data.target_rows.count(row) || !drawn.insert(row).second) continue;
        negatives.push_back(row_as_double(vsm, row));
    }
    model.summary.n_classifier_negatives = n_neg;

    const double l2 = 1.0 / static_cast<double>(n_pos + n_neg);
    model.classifier = train_logistic(data.target_vectors, negatives, l2, 1e-8, 2000,
                                      stream_seed(cfg.seed, "classifier-init"));
}

} // namespace

std::optional<ModelKind> parse_model_kind(std::string_view s) {
    if (s == "svmcos") return ModelKind::svmcos;
    if (s == "lrcos") return ModelKind::lrcos;
    if (s == "cosavg3") return ModelKind::cosavg3;
    if (s == "pca_lr") return ModelKind::pca_lr;
    if (s == "nn_linear") return ModelKind::nn_linear;
    if (s == "nn_nonlinear") return ModelKind::nn_nonlinear;
    return std::nullopt;
}

std::string_view to_string(ModelKind k) {
    switch (k) {
        case ModelKind::svmcos: return "svmcos";
        case ModelKind::lrcos: return "lrcos";
        case ModelKind::cosavg3: return "cosavg3";
        case ModelKind::pca_lr: return "pca_lr";
        case ModelKind::nn_linear: return "nn_linear";
        case ModelKind::nn_nonlinear: return "nn_nonlinear";
    }
    return "?";
}

bool ModelConfig::classifier_enabled() const {
    if (use_target_classifier.has_value()) return *use_target_classifier;
    switch (kind) {
        case ModelKind::svmcos:
        case ModelKind::lrcos:
        case ModelKind::pca_lr: return true;
        default: return false;
    }
}

std::string ModelConfig::label() const {
    std::string base(to_string(kind));
    ModelConfig defaults;
    defaults.kind = kind;
    if (classifier_enabled() == defaults.classifier_enabled()) return base;
    return base + (classifier_enabled() ? "+lr" : "-lr");
}

NeighborTable precompute_neighbors(const VectorSpaceModel& vsm,
                                   std::span<const ResolvedPair> pairs, int n_unlabeled,
                                   int n_threads) {
    std::set<std::size_t> all_targets;
    std::vector<std::size_t> sources;
    for (const auto& p : pairs) {
        for (std::size_t row : p.target_rows) all_targets.insert(row);
    }
    std::set<std::size_t> unique_sources;
    for (const auto& p : pairs) {
        if (unique_sources.insert(p.source_row).second) sources.push_back(p.source_row);
    }
    const std::size_t count =
        static_cast<std::size_t>(std::max(0, n_unlabeled)) + all_targets.size();

    std::vector<std::vector<std::size_t>> lists(sources.size());
    run_parallel(sources.size(), n_threads, [&](std::size_t i) {
        lists[i] = neighbor_candidates(vsm, sources[i], count);
    });
    NeighborTable table;
    for (std::size_t i = 0; i < sources.size(); ++i) table.emplace(sources[i], std::move(lists[i]));
    return table;
}

TrainedRelationModel fit(std::span<const ResolvedPair> training_pairs,
                         const VectorSpaceModel& vsm, const ModelConfig& cfg,
                         const NeighborTable* neighbors) {
    if (training_pairs.empty()) throw std::invalid_argument("fit: no training pairs");
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 100.0)) {
        throw std::invalid_argument("fit: alpha must be in [0, 100]");
    }

    const FoldData data = gather(training_pairs, vsm);
    TrainedRelationModel model;
    model.kind = cfg.kind;
    model.summary.n_pairs = data.pairs.size();
    model.summary.n_positives = data.target_vectors.size();

    switch (cfg.kind) {
        case ModelKind::svmcos: fit_svmcos(model, data, vsm, cfg, neighbors); break;
        case ModelKind::cosavg3: model.mean_offset = mean_of(data.offsets); break;
        case ModelKind::pca_lr: fit_pca(model, data); break;
        case ModelKind::lrcos: break; // query point is the source embedding
        case ModelKind::nn_linear:
        case ModelKind::nn_nonlinear: {
            Matrix inputs;
            inputs.reserve(data.offsets.size());
            for (const ResolvedPair* p : data.pairs) {
                for (std::size_t i = 0; i < p->target_rows.size(); ++i) {
                    inputs.push_back(row_as_double(vsm, p->source_row));
                }
            }
            const MlpLayout layout = (cfg.kind == ModelKind::nn_linear)
                                         ? MlpLayout::linear
                                         : MlpLayout::one_hidden_relu;
            model.regressor = train_mlp(inputs, data.target_vectors, layout, vsm.dim(), 0.01, 200,
                                        stream_seed(cfg.seed, "mlp-init"));
            break;
        }
    }

    if (cfg.classifier_enabled()) fit_classifier(model, data, vsm, cfg);
    return model;
}

QueryPoint query_point(const TrainedRelationModel& model, std::string_view source,
                       const VectorSpaceModel& vsm) {
    const auto row = vsm.find_row(source);
    if (!row) throw std::invalid_argument("query_point: source token '" + std::string(source) +
                                          "' is not in the vocabulary");
    QueryPoint qp;
    qp.source = vsm.token(*row);
    qp.vector = to_double(vsm.row(*row));

    switch (model.kind) {
        case ModelKind::svmcos:
        case ModelKind::pca_lr: {
            const auto& dir = *model.direction;
            const double mag = *model.magnitude;
            for (std::size_t k = 0; k < qp.vector.size(); ++k) qp.vector[k] += mag * dir[k];
            break;
        }
        case ModelKind::cosavg3: {
            const auto& off = *model.mean_offset;
            for (std::size_t k = 0; k < qp.vector.size(); ++k) qp.vector[k] += off[k];
            break;
        }
        case ModelKind::lrcos: break;
        case ModelKind::nn_linear:
        case ModelKind::nn_nonlinear: qp.vector = predict_mlp(*model.regressor, qp.vector); break;
    }
    return qp;
}

std::vector<double> score_tokens(const TrainedRelationModel& model, const QueryPoint& qp,
                                 const VectorSpaceModel& vsm, int n_threads) {
    std::vector<double> scores = score_all(vsm, qp.vector, n_threads);
    if (!model.classifier) return scores;

    const LogisticModel& clf = *model.classifier;
    const std::size_t n = vsm.size();
    auto rescore = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) scores[i] *= clf.probability(vsm.row(i));
    };
    n_threads = resolve_thread_count(n_threads);
    if (n_threads <= 1 || n < 4096) {
        rescore(0, n);
    } else {
        const std::size_t blocks = static_cast<std::size_t>(n_threads);
        run_parallel(blocks, n_threads, [&](std::size_t b) {
            rescore(n * b / blocks, n * (b + 1) / blocks);
        });
    }
    return scores;
}

std::vector<RankedToken> rank(const TrainedRelationModel& model, std::string_view source,
                              const VectorSpaceModel& vsm, std::size_t k, int n_threads) {
    const QueryPoint qp = query_point(model, source, vsm);
    const std::vector<double> scores = score_tokens(model, qp, vsm, n_threads);
    auto rows = select_top_k(scores, k);
    std::vector<RankedToken> out;
    out.reserve(rows.size());
    for (const auto& [row, score] : rows) out.push_back({vsm.token(row), score});
    return out;
}

std::string model_to_json(const TrainedRelationModel& model) {
    json j;
    j["kind"] = std::string(to_string(model.kind));
    if (model.direction) j["direction"] = *model.direction;
    if (model.magnitude) j["magnitude"] = *model.magnitude;
    if (model.mean_offset) j["mean_offset"] = *model.mean_offset;
    if (model.regressor) {
        const MlpRegressor& r = *model.regressor;
        json rj;
        rj["layout"] = (r.layout == MlpLayout::linear) ? "linear" : "one_hidden_relu";
        rj["in_dim"] = r.in_dim;
        rj["out_dim"] = r.out_dim;
        rj["hidden_dim"] = r.hidden_dim;
        rj["w0"] = r.w0;
        rj["b0"] = r.b0;
        rj["w1"] = r.w1;
        rj["b1"] = r.b1;
        j["regressor"] = std::move(rj);
    }
    if (model.classifier) {
        json cj;
        cj["w"] = model.classifier->w;
        cj["b"] = model.classifier->b;
        j["classifier"] = std::move(cj);
    }
    json s;
    s["n_pairs"] = model.summary.n_pairs;
    s["n_positives"] = model.summary.n_positives;
    s["n_source_negatives"] = model.summary.n_source_negatives;
    s["n_unlabeled"] = model.summary.n_unlabeled;
    s["n_classifier_negatives"] = model.summary.n_classifier_negatives;
    s["svm_converged"] = model.summary.svm_converged;
    j["training_summary"] = std::move(s);
    return j.dump(2) + "\n";
}

} // namespace relhyper

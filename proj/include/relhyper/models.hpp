#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relhyper/numerics.hpp"
#include "relhyper/relations.hpp"
#include "relhyper/vector_space.hpp"

namespace relhyper {

enum class ModelKind { svmcos, lrcos, cosavg3, pca_lr, nn_linear, nn_nonlinear };

std::optional<ModelKind> parse_model_kind(std::string_view s);
std::string_view to_string(ModelKind k);

struct ModelConfig {
    ModelKind kind = ModelKind::svmcos;
    // Unset means the kind's convention: classification on for svmcos, lrcos
    // and pca_lr, off for cosavg3 and the neural nets.
    std::optional<bool> use_target_classifier;
    double alpha = 25.0;          // offset-magnitude percentile
    int n_unlabeled = 20;         // cosine neighbors of each source added as negatives
    int lr_negative_multiplier = 5;
    SvmConfig svm{};
    std::uint64_t seed = 0;

    bool classifier_enabled() const;
    // stable identifier used in file names and report columns, e.g.
    // "svmcos", "svmcos-lr" (classification removed), "cosavg3+lr"
    std::string label() const;
};

struct TrainingSummary {
    std::size_t n_pairs = 0;
    std::size_t n_positives = 0;
    std::size_t n_source_negatives = 0;
    std::size_t n_unlabeled = 0;
    std::size_t n_classifier_negatives = 0;
    bool svm_converged = true;
};

struct TrainedRelationModel {
    ModelKind kind = ModelKind::svmcos;
    std::optional<std::vector<double>> direction; // unit norm
    std::optional<double> magnitude;
    std::optional<std::vector<double>> mean_offset;
    std::optional<MlpRegressor> regressor;
    std::optional<LogisticModel> classifier;
    TrainingSummary summary;
};

struct QueryPoint {
    std::vector<double> vector;
    std::string source;
};

// Ranked candidate rows per source row (self excluded), long enough to
// survive per-fold target filtering. Shared across leave-one-out folds so
// the vocabulary is scanned once per source instead of once per fold.
using NeighborTable = std::unordered_map<std::size_t, std::vector<std::size_t>>;

NeighborTable precompute_neighbors(const VectorSpaceModel& vsm,
                                   std::span<const ResolvedPair> pairs, int n_unlabeled,
                                   int n_threads = 1);

TrainedRelationModel fit(std::span<const ResolvedPair> training_pairs,
                         const VectorSpaceModel& vsm, const ModelConfig& cfg,
                         const NeighborTable* neighbors = nullptr);

QueryPoint query_point(const TrainedRelationModel& model, std::string_view source,
                       const VectorSpaceModel& vsm);

// score(token) = cosine(qp, token vector), multiplied by the classifier
// probability when the model carries one. No token is ever excluded.
std::vector<double> score_tokens(const TrainedRelationModel& model, const QueryPoint& qp,
                                 const VectorSpaceModel& vsm, int n_threads = 1);

std::vector<RankedToken> rank(const TrainedRelationModel& model, std::string_view source,
                              const VectorSpaceModel& vsm, std::size_t k, int n_threads = 1);

std::string model_to_json(const TrainedRelationModel& model);

} // namespace relhyper

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relhyper/analysis.hpp"
#include "relhyper/errors.hpp"
#include "relhyper/evaluate.hpp"
#include "relhyper/models.hpp"
#include "relhyper/numerics.hpp"
#include "relhyper/relations.hpp"
#include "relhyper/vector_space.hpp"

namespace py = pybind11;
using namespace relhyper;

namespace {

VsmFormat format_from(const std::string& s) {
    const auto f = parse_vsm_format(s);
    if (!f) throw py::value_error("unknown format '" + s + "'");
    return *f;
}

CaseMode case_from(const std::string& s) {
    const auto m = parse_case_mode(s);
    if (!m) throw py::value_error("unknown case mode '" + s + "'");
    return *m;
}

ModelKind kind_from(const std::string& s) {
    const auto k = parse_model_kind(s);
    if (!k) throw py::value_error("unknown model kind '" + s + "'");
    return *k;
}

KSensPolicy k_sens_from(const std::string& s) {
    const auto p = KSensPolicy::parse(s);
    if (!p) throw py::value_error("k_sens must be 'auto' or a positive integer");
    return *p;
}

std::vector<std::pair<std::string, double>> as_pairs(const std::vector<RankedToken>& ranked) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(ranked.size());
    for (const auto& r : ranked) out.emplace_back(r.token, r.score);
    return out;
}

py::dict metric_set_dict(const MetricSet& m) {
    py::dict d;
    d["sensitivity"] = m.sensitivity;
    d["map"] = m.map;
    d["f1"] = m.f1;
    d["n_queries"] = m.n_queries;
    d["n_dropped"] = m.n_dropped;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Relation directions in word embedding spaces: max-margin hyperplane model, "
              "baselines, leave-one-out evaluation and offset diagnostics.";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<CacheError>(m, "CacheError");
    py::register_exception<NumericError>(m, "NumericError");

    py::class_<VectorSpaceModel>(m, "VectorSpaceModel")
        .def_property_readonly("name", &VectorSpaceModel::name)
        .def_property_readonly("dim", &VectorSpaceModel::dim)
        .def("__len__", &VectorSpaceModel::size)
        .def("tokens", &VectorSpaceModel::tokens)
        .def("__contains__",
             [](const VectorSpaceModel& v, const std::string& token) {
                 return v.find_row(token).has_value();
             })
        .def("lookup",
             [](const VectorSpaceModel& v, const std::string& token)
                 -> std::optional<std::vector<float>> {
                 const auto row = v.lookup(token);
                 if (!row) return std::nullopt;
                 return std::vector<float>(row->begin(), row->end());
             },
             py::arg("token"), "Vector for a token, or None when out of vocabulary.")
        .def("top_k",
             [](const VectorSpaceModel& v, const std::vector<double>& query, std::size_t k) {
                 return as_pairs(top_k_cosine(v, query, k));
             },
             py::arg("query"), py::arg("k"),
             "Top-k tokens by cosine similarity, ties broken by row index.")
        .def("write_cache",
             [](const VectorSpaceModel& v, const std::string& path) { write_cache(v, path); },
             py::arg("path"))
        .def("__repr__", [](const VectorSpaceModel& v) {
            return "<VectorSpaceModel '" + v.name() + "' " + std::to_string(v.size()) + " x " +
                   std::to_string(v.dim()) + ">";
        });

    m.def(
        "load_vsm",
        [](const std::string& path, const std::string& format, const std::string& case_mode) {
            return load_vsm(path, format_from(format), case_from(case_mode));
        },
        py::arg("path"), py::arg("format") = "glove_text",
        py::arg("case_mode") = "lowercase_fallback");

    m.def(
        "build_vsm",
        [](const std::string& name, const std::vector<std::string>& tokens,
           const std::vector<std::vector<float>>& rows, const std::string& case_mode) {
            if (rows.empty()) throw py::value_error("rows must be non-empty");
            std::vector<float> matrix;
            matrix.reserve(rows.size() * rows.front().size());
            for (const auto& r : rows) {
                if (r.size() != rows.front().size()) {
                    throw py::value_error("rows must share one dimension");
                }
                matrix.insert(matrix.end(), r.begin(), r.end());
            }
            return VectorSpaceModel(name, rows.front().size(), tokens, std::move(matrix),
                                    case_from(case_mode));
        },
        py::arg("name"), py::arg("tokens"), py::arg("rows"),
        py::arg("case_mode") = "lowercase_fallback",
        "Construct an in-memory vector space from explicit rows.");

    m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine(std::span<const double>(a), std::span<const double>(b));
    });
    m.def("percentile", [](std::vector<double> values, double p) {
        return percentile(std::move(values), p);
    });
    m.def("average_precision",
          [](const std::vector<std::size_t>& positions, std::size_t n_gold) {
              return average_precision(positions, n_gold);
          },
          py::arg("gold_positions"), py::arg("n_gold"));
    m.def("first_principal_component", &first_principal_component, py::arg("rows"));
    m.def(
        "train_linear_svm",
        [](const Matrix& positives, const Matrix& negatives, double C, double tol, int max_iter) {
            SvmConfig cfg;
            cfg.C = C;
            cfg.tol = tol;
            cfg.max_iter = max_iter;
            const auto r = train_linear_svm(positives, negatives, cfg);
            return py::make_tuple(r.plane.w, r.plane.b, r.converged);
        },
        py::arg("positives"), py::arg("negatives"), py::arg("C") = 0.001, py::arg("tol") = 1e-6,
        py::arg("max_iter") = 20000, "Returns (w, b, converged).");

    py::class_<RelationPair>(m, "RelationPair")
        .def_readonly("source", &RelationPair::source)
        .def_readonly("targets", &RelationPair::targets);

    py::class_<RelationCategory>(m, "RelationCategory")
        .def_readonly("id", &RelationCategory::id)
        .def_readonly("name", &RelationCategory::name)
        .def_readonly("pairs", &RelationCategory::pairs)
        .def("__repr__", [](const RelationCategory& c) {
            return "<RelationCategory " + c.id + ": " + std::to_string(c.pairs.size()) + " pairs>";
        });

    py::class_<ResolvedPair>(m, "ResolvedPair")
        .def_readonly("source", &ResolvedPair::source)
        .def_readonly("targets", &ResolvedPair::targets);

    py::class_<ResolvedCategory>(m, "ResolvedCategory")
        .def_property_readonly("id",
                               [](const ResolvedCategory& c) { return c.category.id; })
        .def_readonly("pairs", &ResolvedCategory::pairs)
        .def_property_readonly("dropped", [](const ResolvedCategory& c) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& d : c.dropped) {
                out.emplace_back(d.pair.source, std::string(to_string(d.reason)));
            }
            return out;
        });

    m.def("parse_bats_file",
          [](const std::string& path) { return parse_bats_file(path); }, py::arg("path"));
    m.def("parse_bats_directory",
          [](const std::string& path) { return parse_bats_directory(path); }, py::arg("path"));
    m.def("resolve", &resolve, py::arg("category"), py::arg("vsm"));

    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init([](const std::string& kind, std::optional<bool> use_target_classifier,
                         double alpha, int n_unlabeled, int lr_negative_multiplier, double svm_C,
                         std::uint64_t seed) {
                 ModelConfig cfg;
                 cfg.kind = kind_from(kind);
                 cfg.use_target_classifier = use_target_classifier;
                 cfg.alpha = alpha;
                 cfg.n_unlabeled = n_unlabeled;
                 cfg.lr_negative_multiplier = lr_negative_multiplier;
                 cfg.svm.C = svm_C;
                 cfg.seed = seed;
                 return cfg;
             }),
             py::arg("kind") = "svmcos", py::arg("use_target_classifier") = std::nullopt,
             py::arg("alpha") = 25.0, py::arg("n_unlabeled") = 20,
             py::arg("lr_negative_multiplier") = 5, py::arg("svm_C") = 0.001, py::arg("seed") = 0)
        .def_property_readonly("kind",
                               [](const ModelConfig& c) { return std::string(to_string(c.kind)); })
        .def_property_readonly("label", &ModelConfig::label)
        .def_readwrite("alpha", &ModelConfig::alpha)
        .def_readwrite("n_unlabeled", &ModelConfig::n_unlabeled)
        .def_readwrite("seed", &ModelConfig::seed)
        .def("__repr__", [](const ModelConfig& c) { return "<ModelConfig " + c.label() + ">"; });

    py::class_<TrainedRelationModel>(m, "TrainedRelationModel")
        .def_property_readonly(
            "kind", [](const TrainedRelationModel& t) { return std::string(to_string(t.kind)); })
        .def_readonly("direction", &TrainedRelationModel::direction)
        .def_readonly("magnitude", &TrainedRelationModel::magnitude)
        .def_readonly("mean_offset", &TrainedRelationModel::mean_offset)
        .def("to_json", &model_to_json)
        .def("__repr__", [](const TrainedRelationModel& t) {
            return "<TrainedRelationModel " + std::string(to_string(t.kind)) + ">";
        });

    m.def(
        "fit",
        [](const ResolvedCategory& category, const VectorSpaceModel& vsm, const ModelConfig& cfg) {
            return fit(category.pairs, vsm, cfg);
        },
        py::arg("resolved"), py::arg("vsm"), py::arg("config"));
    m.def(
        "query_point",
        [](const TrainedRelationModel& model, const std::string& source,
           const VectorSpaceModel& vsm) { return query_point(model, source, vsm).vector; },
        py::arg("model"), py::arg("source"), py::arg("vsm"));
    m.def(
        "rank",
        [](const TrainedRelationModel& model, const std::string& source,
           const VectorSpaceModel& vsm, std::size_t k) {
            return as_pairs(rank(model, source, vsm, k));
        },
        py::arg("model"), py::arg("source"), py::arg("vsm"), py::arg("k"));

    py::class_<CategoryEval>(m, "CategoryEval")
        .def_readonly("category_id", &CategoryEval::category_id)
        .def_readonly("n_resolved", &CategoryEval::n_resolved)
        .def_readonly("n_dropped", &CategoryEval::n_dropped)
        .def_readonly("skip_reason", &CategoryEval::skip_reason)
        .def_property_readonly("folds", [](const CategoryEval& e) {
            py::list out;
            for (const auto& fold : e.folds) {
                py::dict d;
                d["source"] = fold.held_out_source;
                d["gold_targets"] = fold.gold_targets;
                py::list positions;
                for (const auto& g : fold.gold_positions) {
                    positions.append(py::make_tuple(g.token, g.rank));
                }
                d["gold_positions"] = positions;
                d["top"] = as_pairs(fold.top_ranking);
                out.append(d);
            }
            return out;
        });

    m.def(
        "loo_evaluate",
        [](const ResolvedCategory& category, const VectorSpaceModel& vsm, const ModelConfig& cfg,
           std::size_t k_eval, int threads) {
            return loo_evaluate(category, vsm, cfg, k_eval, threads);
        },
        py::arg("resolved"), py::arg("vsm"), py::arg("config"), py::arg("k_eval") = 10,
        py::arg("threads") = 1);

    m.def(
        "aggregate",
        [](const std::vector<CategoryEval>& evals, const std::string& k_sens) {
            const auto report = aggregate(evals, k_sens_from(k_sens));
            py::dict out;
            py::dict per_category;
            for (const auto& [id, metrics] : report.per_category) {
                per_category[py::str(id)] = metric_set_dict(metrics);
            }
            out["per_category"] = per_category;
            out["dataset"] = metric_set_dict(report.dataset);
            return out;
        },
        py::arg("evals"), py::arg("k_sens") = "auto");

    m.def(
        "offset_stats",
        [](const ResolvedCategory& category, const VectorSpaceModel& vsm) {
            const auto s = offset_stats(category, vsm);
            py::dict out;
            out["category_id"] = s.category_id;
            out["n_offsets"] = s.n_offsets;
            out["mean_pairwise_cosine"] = s.mean_pairwise_cosine;
            out["min"] = s.min;
            out["p25"] = s.p25;
            out["median"] = s.median;
            out["p75"] = s.p75;
            out["max"] = s.max;
            return out;
        },
        py::arg("resolved"), py::arg("vsm"));

#ifdef RELHYPER_VERSION
    m.attr("__version__") = RELHYPER_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}

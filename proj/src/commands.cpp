#include "relhyper/commands.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <vector>

#include "relhyper/analysis.hpp"
#include "relhyper/errors.hpp"
#include "relhyper/evaluate.hpp"
#include "relhyper/models.hpp"
#include "relhyper/parallel.hpp"
#include "relhyper/relations.hpp"
#include "relhyper/reports.hpp"

namespace relhyper {

namespace {

namespace fs = std::filesystem;

// Removes everything this run wrote when it fails part-way.
class OutputTracker {
public:
    fs::path track(fs::path path) {
        paths_.push_back(path);
        return path;
    }

    void discard_all() {
        for (const fs::path& p : paths_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

private:
    std::vector<fs::path> paths_;
};

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const CacheError*>(&e)) {
        return kExitInput;
    }
    if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitUsage;
    return kExitInput;
}

template <typename Fn>
int guarded(const CommandIo& io, OutputTracker& outputs, Fn&& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const std::exception& e) {
        outputs.discard_all();
        *io.err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int resolve_threads(int configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("RELHYPER_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return resolve_thread_count(0);
}

std::string sanitize(std::string_view name) {
    std::string out(name);
    for (char& c : out) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '+')) {
            c = '_';
        }
    }
    return out;
}

VectorSpaceModel load_spec(const VsmSpec& spec, const CommandIo& io) {
    const auto start = std::chrono::steady_clock::now();
    VectorSpaceModel vsm = load_vsm(spec.path, spec.format, spec.case_mode);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    *io.out << "loaded vsm '" << spec.effective_name() << "': " << vsm.size() << " tokens, dim "
            << vsm.dim();
    if (vsm.duplicates_dropped() > 0) {
        *io.out << " (" << vsm.duplicates_dropped() << " duplicate tokens dropped)";
    }
    *io.out << " [" << format9(secs) << "s]\n";
    return vsm;
}

std::vector<ResolvedCategory> resolve_all(const std::vector<RelationCategory>& categories,
                                          const VectorSpaceModel& vsm) {
    std::vector<ResolvedCategory> out;
    out.reserve(categories.size());
    for (const RelationCategory& cat : categories) out.push_back(resolve(cat, vsm));
    return out;
}

} // namespace

int cmd_eval(const RunConfig& config, const CommandIo& io) {
    OutputTracker outputs;
    return guarded(io, outputs, [&] {
        validate_for_eval(config);
        const int threads = resolve_threads(config.threads);
        const fs::path out_dir(config.out_dir);
        fs::create_directories(out_dir);
        const std::string echo = echo_config_inline(config);

        const auto categories = parse_bats_directory(config.bats_dir);
        std::size_t total_pairs = 0;
        for (const auto& c : categories) total_pairs += c.pairs.size();
        *io.out << "parsed " << categories.size() << " categories, " << total_pairs << " pairs\n";

        const std::vector<ModelConfig> models = config.effective_models();
        std::vector<std::string> vsm_names, model_labels;
        for (const ModelConfig& m : models) model_labels.push_back(m.label());
        std::vector<std::vector<double>> f1_table;

        for (const VsmSpec& spec : config.vsms) {
            const VectorSpaceModel vsm = load_spec(spec, io);
            const auto resolved = resolve_all(categories, vsm);
            write_drop_report_csv(
                outputs.track(out_dir / ("drops_" + sanitize(spec.effective_name()) + ".csv")),
                echo, resolved);

            vsm_names.push_back(spec.effective_name());
            std::vector<double> f1_row;
            for (const ModelConfig& model : models) {
                std::vector<CategoryEval> evals;
                evals.reserve(resolved.size());
                for (const ResolvedCategory& cat : resolved) {
                    evals.push_back(loo_evaluate(cat, vsm, model, config.k_eval, threads));
                }
                const MetricsReport report = aggregate(evals, config.k_sens);
                const std::string stem =
                    "eval_" + sanitize(spec.effective_name()) + "_" + sanitize(model.label());
                write_metrics_json(outputs.track(out_dir / (stem + ".json")), config, spec, vsm,
                                   model, evals, report);
                write_metrics_csv(outputs.track(out_dir / (stem + ".csv")), echo, report);
                f1_row.push_back(report.dataset.f1);
                *io.out << spec.effective_name() << " / " << model.label()
                        << ": sensitivity " << format9(report.dataset.sensitivity) << ", map "
                        << format9(report.dataset.map) << ", f1 " << format9(report.dataset.f1)
                        << " (" << report.dataset.n_queries << " queries, "
                        << report.dataset.n_dropped << " dropped)\n";
            }
            f1_table.push_back(std::move(f1_row));
        }

        write_f1_table_csv(outputs.track(out_dir / "f1_table.csv"), echo, vsm_names, model_labels,
                           f1_table);
    });
}

int cmd_query(const QueryArgs& args, const CommandIo& io) {
    OutputTracker outputs;
    return guarded(io, outputs, [&] {
        if (args.k == 0) throw std::invalid_argument("query: k must be positive");
        const VectorSpaceModel vsm = load_spec(args.vsm, io);
        if (!vsm.find_row(args.source)) {
            throw ParseError("query: source token '" + args.source +
                             "' is not in the vocabulary");
        }
        const RelationCategory category = parse_bats_file(args.pairs_file);
        const ResolvedCategory resolved = resolve(category, vsm);
        if (resolved.pairs.empty()) {
            throw ParseError("query: no training pair survived vocabulary resolution");
        }
        ModelConfig cfg = args.model;
        cfg.seed = args.seed;
        const TrainedRelationModel model = fit(resolved.pairs, vsm, cfg);
        const auto ranking =
            rank(model, args.source, vsm, std::min(args.k, vsm.size()), resolve_threads(args.threads));
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            *io.out << (i + 1) << '\t' << ranking[i].token << '\t' << format9(ranking[i].score)
                    << '\n';
        }
        if (!args.dump_model_path.empty()) {
            std::ofstream dump(outputs.track(args.dump_model_path), std::ios::trunc);
            if (!dump) {
                throw std::runtime_error("cannot open '" + args.dump_model_path + "' for writing");
            }
            dump << model_to_json(model);
        }
    });
}

int cmd_analyze_offsets(const RunConfig& config, const CommandIo& io) {
    OutputTracker outputs;
    return guarded(io, outputs, [&] {
        validate_for_offsets(config);
        const fs::path out_dir(config.out_dir);
        fs::create_directories(out_dir);
        const std::string echo = echo_config_inline(config);
        const auto categories = parse_bats_directory(config.bats_dir);

        for (const VsmSpec& spec : config.vsms) {
            const VectorSpaceModel vsm = load_spec(spec, io);
            const auto resolved = resolve_all(categories, vsm);
            std::vector<OffsetStats> stats;
            for (const ResolvedCategory& cat : resolved) {
                std::size_t n_offsets = 0;
                for (const ResolvedPair& p : cat.pairs) n_offsets += p.target_rows.size();
                if (n_offsets < 2) continue;
                stats.push_back(offset_stats(cat, vsm));
            }
            const OffsetStats pooled = pooled_offset_stats(resolved, vsm);
            write_offset_stats_json(
                outputs.track(out_dir / ("offsets_" + sanitize(spec.effective_name()) + ".json")),
                echo, stats, pooled);
            *io.out << spec.effective_name() << ": pooled mean pairwise offset cosine "
                    << format9(pooled.mean_pairwise_cosine) << " over " << pooled.n_offsets
                    << " offsets\n";
        }
    });
}

int cmd_diagnose(const RunConfig& config, const CommandIo& io) {
    OutputTracker outputs;
    return guarded(io, outputs, [&] {
        validate_for_diagnose(config);
        const int threads = resolve_threads(config.threads);
        const fs::path out_dir(config.out_dir);
        fs::create_directories(out_dir);
        const std::string echo = echo_config_inline(config);
        const auto categories = parse_bats_directory(config.bats_dir);
        const std::vector<ModelConfig> models = config.effective_models();

        for (const VsmSpec& spec : config.vsms) {
            const VectorSpaceModel vsm = load_spec(spec, io);
            const auto resolved = resolve_all(categories, vsm);
            std::vector<DiagnosticsRecord> records;
            std::size_t skipped = 0;
            for (const ResolvedCategory& cat : resolved) {
                if (cat.pairs.size() < 2) {
                    ++skipped;
                    continue;
                }
                auto recs = query_point_diagnostics(cat, vsm, models[0], models[1],
                                                    config.n_nontargets, config.seed, threads);
                records.insert(records.end(), std::make_move_iterator(recs.begin()),
                               std::make_move_iterator(recs.end()));
            }
            if (skipped > 0) {
                *io.out << "skipped " << skipped << " categories with fewer than 2 resolved pairs\n";
            }
            const std::string stem = sanitize(spec.effective_name());
            emit_kde_data(records, outputs.track(out_dir / ("kde_" + stem + ".csv")), echo);
            write_diagnostics_summary_json(
                outputs.track(out_dir / ("diagnostics_" + stem + ".json")), echo, records);
            *io.out << spec.effective_name() << ": " << records.size()
                    << " diagnostics records written\n";
        }
    });
}

int cmd_cache(const CacheArgs& args, const CommandIo& io) {
    OutputTracker outputs;
    return guarded(io, outputs, [&] {
        const auto start = std::chrono::steady_clock::now();
        const VectorSpaceModel vsm = load_vsm(args.vsm.path, args.vsm.format, args.vsm.case_mode);
        const std::string out_file =
            args.out_file.empty() ? args.vsm.path + ".rhc" : args.out_file;
        write_cache(vsm, outputs.track(out_file));
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        *io.out << "cached " << vsm.size() << " tokens, dim " << vsm.dim() << " -> " << out_file
                << " [" << format9(secs) << "s]\n";
    });
}

} // namespace relhyper

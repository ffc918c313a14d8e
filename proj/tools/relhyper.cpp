#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "relhyper/commands.hpp"
#include "relhyper/errors.hpp"

namespace {

using namespace relhyper;

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
};

RunConfig build_run_config(const GlobalArgs& g) {
    RunConfig config;
    if (!g.config_path.empty()) config = parse_run_config_file(g.config_path);
    if (g.seed) config.seed = *g.seed;
    if (g.threads) config.threads = *g.threads;
    if (g.out_dir) config.out_dir = *g.out_dir;
    return config;
}

VsmFormat parse_format_or_throw(const std::string& s) {
    const auto f = parse_vsm_format(s);
    if (!f) {
        throw CLI::ValidationError("--format",
                                   "expected glove_text, w2v_text, w2v_binary or native_cache");
    }
    return *f;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"relhyper: relation directions in word embedding spaces via max-margin "
                 "hyperplanes, with baselines, leave-one-out evaluation and offset diagnostics"};
    app.require_subcommand(1);

    GlobalArgs global;
    app.add_option("--config", global.config_path, "run configuration file (key=value lines)");
    std::uint64_t seed_value = 0;
    int threads_value = 0;
    std::string out_value;
    auto* seed_opt = app.add_option("--seed", seed_value, "global random seed");
    auto* threads_opt =
        app.add_option("--threads", threads_value,
                       "worker threads (0 = available parallelism; RELHYPER_THREADS as fallback)");
    auto* out_opt = app.add_option("--out", out_value, "output directory");

    auto* eval_cmd = app.add_subcommand("eval", "run the leave-one-out evaluation grid");
    bool no_classifier = false;
    eval_cmd->add_flag("--no-classifier", no_classifier,
                       "disable target-class classification on every model");

    auto* query_cmd =
        app.add_subcommand("query", "fit one model on a pairs file and rank tokens for a source");
    std::string q_vsm, q_format = "glove_text", q_pairs, q_model = "svmcos", q_source, q_dump;
    std::string q_case = "lowercase_fallback";
    std::size_t q_k = 10;
    double q_alpha = 25.0;
    int q_unlabeled = 20;
    bool q_no_classifier = false;
    query_cmd->add_option("--vsm", q_vsm, "embedding file")->required();
    query_cmd->add_option("--format", q_format, "embedding file format");
    query_cmd->add_option("--case", q_case, "vocabulary case mode (exact|lowercase_fallback)");
    query_cmd->add_option("--pairs", q_pairs, "training pairs file")->required();
    query_cmd->add_option("--model", q_model, "model kind");
    query_cmd->add_option("--source", q_source, "source token")->required();
    query_cmd->add_option("-k,--top", q_k, "number of ranked tokens to print");
    query_cmd->add_option("--alpha", q_alpha, "offset-magnitude percentile");
    query_cmd->add_option("--n-unlabeled", q_unlabeled, "cosine neighbors per source");
    query_cmd->add_flag("--no-classifier", q_no_classifier, "disable target-class classification");
    query_cmd->add_option("--dump-model", q_dump, "write the fitted model as JSON");

    auto* offsets_cmd =
        app.add_subcommand("analyze-offsets", "pairwise cosine statistics of relation offsets");

    auto* diagnose_cmd = app.add_subcommand(
        "diagnose", "query-point diagnostics comparing the first two configured models");
    int d_nontargets = 0;
    diagnose_cmd->add_option("--n-nontargets", d_nontargets,
                             "non-target tokens sampled near each query point");

    auto* cache_cmd = app.add_subcommand("cache", "convert an embedding file to the native cache");
    std::string c_vsm, c_format = "glove_text", c_out;
    cache_cmd->add_option("--vsm", c_vsm, "embedding file")->required();
    cache_cmd->add_option("--format", c_format, "embedding file format");
    cache_cmd->add_option("--out-file", c_out, "cache file to write (default: <vsm>.rhc)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (*seed_opt) global.seed = seed_value;
    if (*threads_opt) global.threads = threads_value;
    if (*out_opt) global.out_dir = out_value;

    try {
        if (*eval_cmd) {
            RunConfig config = build_run_config(global);
            config.no_classifier = config.no_classifier || no_classifier;
            return cmd_eval(config);
        }
        if (*query_cmd) {
            QueryArgs args;
            args.vsm.path = q_vsm;
            args.vsm.format = parse_format_or_throw(q_format);
            const auto mode = parse_case_mode(q_case);
            if (!mode) throw CLI::ValidationError("--case", "expected exact or lowercase_fallback");
            args.vsm.case_mode = *mode;
            args.pairs_file = q_pairs;
            const auto kind = parse_model_kind(q_model);
            if (!kind) throw CLI::ValidationError("--model", "unknown model kind '" + q_model + "'");
            args.model.kind = *kind;
            args.model.alpha = q_alpha;
            args.model.n_unlabeled = q_unlabeled;
            if (q_no_classifier) args.model.use_target_classifier = false;
            args.source = q_source;
            args.k = q_k;
            args.dump_model_path = q_dump;
            if (global.seed) args.seed = *global.seed;
            if (global.threads) args.threads = *global.threads;
            return cmd_query(args);
        }
        if (*offsets_cmd) return cmd_analyze_offsets(build_run_config(global));
        if (*diagnose_cmd) {
            RunConfig config = build_run_config(global);
            if (config.models.empty()) {
                // default comparison: the max-margin model against the
                // source-anchored baseline
                ModelConfig a, b;
                a.kind = ModelKind::svmcos;
                b.kind = ModelKind::lrcos;
                config.models = {a, b};
            }
            if (d_nontargets > 0) config.n_nontargets = d_nontargets;
            return cmd_diagnose(config);
        }
        if (*cache_cmd) {
            CacheArgs args;
            args.vsm.path = c_vsm;
            args.vsm.format = parse_format_or_throw(c_format);
            args.out_file = c_out;
            return cmd_cache(args);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}

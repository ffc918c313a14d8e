#include "relhyper/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "relhyper/errors.hpp"

namespace relhyper {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
T parse_number(std::string_view value, const std::string& context) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ParseError(context + ": bad numeric value '" + std::string(value) + "'");
    }
    return out;
}

bool parse_bool(std::string_view value, const std::string& context) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ParseError(context + ": bad boolean value '" + std::string(value) + "'");
}

// splits "0.kind" into (0, "kind")
std::pair<std::size_t, std::string_view> split_indexed(std::string_view rest,
                                                       const std::string& context) {
    const std::size_t dot = rest.find('.');
    if (dot == std::string_view::npos) {
        throw ParseError(context + ": expected '<index>.<field>' after section prefix");
    }
    const std::size_t index = parse_number<std::size_t>(rest.substr(0, dot), context);
    return {index, rest.substr(dot + 1)};
}

template <typename T>
T& at_index(std::vector<T>& v, std::size_t index, const std::string& context) {
    if (index > v.size()) {
        throw ParseError(context + ": index " + std::to_string(index) +
                         " skips earlier entries (use consecutive indices from 0)");
    }
    if (index == v.size()) v.emplace_back();
    return v[index];
}

void apply_vsm_entry(VsmSpec& spec, std::string_view field, std::string_view value,
                     const std::string& context) {
    if (field == "path") {
        spec.path = std::string(value);
    } else if (field == "format") {
        const auto f = parse_vsm_format(value);
        if (!f) throw ParseError(context + ": unknown format '" + std::string(value) + "'");
        spec.format = *f;
    } else if (field == "name") {
        spec.name = std::string(value);
    } else if (field == "case") {
        const auto m = parse_case_mode(value);
        if (!m) throw ParseError(context + ": unknown case mode '" + std::string(value) + "'");
        spec.case_mode = *m;
    } else {
        throw ParseError(context + ": unknown vsm field '" + std::string(field) + "'");
    }
}

void apply_model_entry(ModelConfig& model, std::string_view field, std::string_view value,
                       const std::string& context) {
    if (field == "kind") {
        const auto k = parse_model_kind(value);
        if (!k) throw ParseError(context + ": unknown model kind '" + std::string(value) + "'");
        model.kind = *k;
    } else if (field == "use_target_classifier") {
        model.use_target_classifier = parse_bool(value, context);
    } else if (field == "alpha") {
        model.alpha = parse_number<double>(value, context);
    } else if (field == "n_unlabeled") {
        model.n_unlabeled = parse_number<int>(value, context);
    } else if (field == "lr_negative_multiplier") {
        model.lr_negative_multiplier = parse_number<int>(value, context);
    } else if (field == "svm.C") {
        model.svm.C = parse_number<double>(value, context);
    } else if (field == "svm.tol") {
        model.svm.tol = parse_number<double>(value, context);
    } else if (field == "svm.max_iter") {
        model.svm.max_iter = parse_number<int>(value, context);
    } else {
        throw ParseError(context + ": unknown model field '" + std::string(field) + "'");
    }
}

} // namespace

std::string VsmSpec::effective_name() const {
    if (!name.empty()) return name;
    return std::filesystem::path(path).stem().string();
}

std::vector<ModelConfig> RunConfig::effective_models() const {
    std::vector<ModelConfig> out = models;
    if (no_classifier) {
        for (ModelConfig& m : out) m.use_target_classifier = false;
    }
    for (ModelConfig& m : out) m.seed = seed;
    return out;
}

void apply_config_entry(RunConfig& config, std::string_view key, std::string_view value,
                        const std::string& context) {
    if (key.starts_with("vsm.")) {
        std::string_view rest = key.substr(4);
        if (rest.find('.') == std::string_view::npos) {
            apply_vsm_entry(at_index(config.vsms, 0, context), rest, value, context);
        } else {
            auto [index, field] = split_indexed(rest, context);
            apply_vsm_entry(at_index(config.vsms, index, context), field, value, context);
        }
        return;
    }
    if (key.starts_with("model.")) {
        auto [index, field] = split_indexed(key.substr(6), context);
        apply_model_entry(at_index(config.models, index, context), field, value, context);
        return;
    }
    if (key == "bats.dir") {
        config.bats_dir = std::string(value);
    } else if (key == "k_eval") {
        config.k_eval = parse_number<std::size_t>(value, context);
    } else if (key == "k_sens") {
        const auto p = KSensPolicy::parse(value);
        if (!p) throw ParseError(context + ": k_sens must be 'auto' or a positive integer");
        config.k_sens = *p;
    } else if (key == "n_nontargets") {
        config.n_nontargets = parse_number<int>(value, context);
    } else if (key == "seed") {
        config.seed = parse_number<std::uint64_t>(value, context);
    } else if (key == "out") {
        config.out_dir = std::string(value);
    } else if (key == "threads") {
        config.threads = parse_number<int>(value, context);
    } else if (key == "no_classifier") {
        config.no_classifier = parse_bool(value, context);
    } else {
        throw ParseError(context + ": unknown key '" + std::string(key) + "'");
    }
}

RunConfig parse_run_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path.string() + "'");
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const std::size_t eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 'key=value'");
        }
        const std::string context = path.string() + ":" + std::to_string(line_no);
        apply_config_entry(config, trim(view.substr(0, eq)), trim(view.substr(eq + 1)), context);
    }
    return config;
}

std::string echo_config(const RunConfig& config) {
    std::ostringstream out;
    out << "seed=" << config.seed << '\n';
    out << "threads=" << config.threads << '\n';
    out << "out=" << config.out_dir << '\n';
    out << "k_eval=" << config.k_eval << '\n';
    out << "k_sens=" << config.k_sens.to_string() << '\n';
    out << "n_nontargets=" << config.n_nontargets << '\n';
    out << "no_classifier=" << (config.no_classifier ? "true" : "false") << '\n';
    if (!config.bats_dir.empty()) out << "bats.dir=" << config.bats_dir << '\n';
    for (std::size_t i = 0; i < config.vsms.size(); ++i) {
        const VsmSpec& v = config.vsms[i];
        const std::string prefix = "vsm." + std::to_string(i) + ".";
        out << prefix << "path=" << v.path << '\n';
        out << prefix << "format=" << to_string(v.format) << '\n';
        out << prefix << "name=" << v.effective_name() << '\n';
        out << prefix << "case=" << to_string(v.case_mode) << '\n';
    }
    for (std::size_t i = 0; i < config.models.size(); ++i) {
        const ModelConfig& m = config.models[i];
        const std::string prefix = "model." + std::to_string(i) + ".";
        out << prefix << "kind=" << to_string(m.kind) << '\n';
        out << prefix << "use_target_classifier=" << (m.classifier_enabled() ? "true" : "false")
            << '\n';
        out << prefix << "alpha=" << m.alpha << '\n';
        out << prefix << "n_unlabeled=" << m.n_unlabeled << '\n';
        out << prefix << "lr_negative_multiplier=" << m.lr_negative_multiplier << '\n';
        out << prefix << "svm.C=" << m.svm.C << '\n';
        out << prefix << "svm.tol=" << m.svm.tol << '\n';
        out << prefix << "svm.max_iter=" << m.svm.max_iter << '\n';
    }
    return out.str();
}

std::string echo_config_inline(const RunConfig& config) {
    std::string echo = echo_config(config);
    std::replace(echo.begin(), echo.end(), '\n', ';');
    if (!echo.empty() && echo.back() == ';') echo.pop_back();
    return echo;
}

namespace {

void validate_common(const RunConfig& config) {
    if (config.vsms.empty()) throw ParseError("config: at least one vsm.* section is required");
    std::set<std::string> names;
    for (const VsmSpec& v : config.vsms) {
        if (v.path.empty()) throw ParseError("config: vsm path must not be empty");
        if (!names.insert(v.effective_name()).second) {
            throw ParseError("config: duplicate vsm name '" + v.effective_name() + "'");
        }
    }
    if (config.bats_dir.empty()) throw ParseError("config: bats.dir is required");
    if (config.threads < 0) throw ParseError("config: threads must be >= 0");
    if (config.n_nontargets <= 0) throw ParseError("config: n_nontargets must be positive");
    for (const ModelConfig& m : config.models) {
        if (!(m.alpha >= 0.0 && m.alpha <= 100.0)) {
            throw ParseError("config: model alpha must be in [0, 100]");
        }
        if (m.n_unlabeled < 0) throw ParseError("config: n_unlabeled must be >= 0");
        if (m.lr_negative_multiplier <= 0) {
            throw ParseError("config: lr_negative_multiplier must be positive");
        }
        if (m.svm.C <= 0.0 || m.svm.tol <= 0.0 || m.svm.max_iter <= 0) {
            throw ParseError("config: svm parameters must be positive");
        }
    }
    std::set<std::string> labels;
    for (const ModelConfig& m : config.effective_models()) {
        if (!labels.insert(m.label()).second) {
            throw ParseError("config: duplicate model '" + m.label() + "'");
        }
    }
}

} // namespace

void validate_for_eval(const RunConfig& config) {
    validate_common(config);
    if (config.models.empty()) throw ParseError("config: at least one model.* section is required");
    if (config.k_eval == 0) throw ParseError("config: k_eval must be positive");
}

void validate_for_offsets(const RunConfig& config) {
    if (config.vsms.empty()) throw ParseError("config: at least one vsm.* section is required");
    if (config.bats_dir.empty()) throw ParseError("config: bats.dir is required");
}

void validate_for_diagnose(const RunConfig& config) {
    validate_common(config);
    if (config.models.size() < 2) {
        throw ParseError("config: diagnose compares the first two configured models; "
                         "declare at least model.0 and model.1");
    }
}

} // namespace relhyper

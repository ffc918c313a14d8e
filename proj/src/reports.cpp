#include "relhyper/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace relhyper {

namespace {

using json = nlohmann::ordered_json;

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

json metric_set_json(const MetricSet& m) {
    json j;
    j["sensitivity"] = round9(m.sensitivity);
    j["map"] = round9(m.map);
    j["f1"] = round9(m.f1);
    j["n_queries"] = m.n_queries;
    j["n_dropped"] = m.n_dropped;
    return j;
}

json config_echo_json(const RunConfig& config) {
    json j;
    std::istringstream echo(echo_config(config));
    std::string line;
    while (std::getline(echo, line)) {
        const std::size_t eq = line.find('=');
        if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

} // namespace

std::string format9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double round9(double v) {
    // round through the 9-significant-digit decimal form so the shortest
    // round-trip representation printed by the JSON writer is that form
    return std::strtod(format9(v).c_str(), nullptr);
}

void write_metrics_json(const std::filesystem::path& path, const RunConfig& config,
                        const VsmSpec& vsm_spec, const VectorSpaceModel& vsm,
                        const ModelConfig& model, std::span<const CategoryEval> evals,
                        const MetricsReport& report) {
    json j;
    j["format_version"] = kReportFormatVersion;
    j["config"] = config_echo_json(config);
    {
        json v;
        v["name"] = vsm_spec.effective_name();
        v["dim"] = vsm.dim();
        v["tokens"] = vsm.size();
        v["duplicates_dropped"] = vsm.duplicates_dropped();
        j["vsm"] = std::move(v);
    }
    {
        json m;
        m["label"] = model.label();
        m["kind"] = std::string(to_string(model.kind));
        m["use_target_classifier"] = model.classifier_enabled();
        m["alpha"] = model.alpha;
        m["n_unlabeled"] = model.n_unlabeled;
        m["lr_negative_multiplier"] = model.lr_negative_multiplier;
        m["svm_C"] = model.svm.C;
        j["model"] = std::move(m);
    }

    std::map<std::string, const CategoryEval*> by_id;
    for (const CategoryEval& e : evals) by_id[e.category_id] = &e;

    json cats = json::array();
    for (const auto& [id, metrics] : report.per_category) {
        json c;
        c["id"] = id;
        c.update(metric_set_json(metrics));
        const auto it = by_id.find(id);
        if (it != by_id.end() && !it->second->skip_reason.empty()) {
            c["skipped"] = it->second->skip_reason;
        }
        cats.push_back(std::move(c));
    }
    j["per_category"] = std::move(cats);
    j["dataset"] = metric_set_json(report.dataset);

    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

void write_metrics_csv(const std::filesystem::path& path, std::string_view config_echo,
                       const MetricsReport& report) {
    auto out = open_output(path);
    out << "# relhyper-metrics-csv v" << kReportFormatVersion << " " << config_echo << "\n";
    out << "category_id,sensitivity,map,f1,n_queries,n_dropped\n";
    for (const auto& [id, m] : report.per_category) {
        out << id << ',' << format9(m.sensitivity) << ',' << format9(m.map) << ','
            << format9(m.f1) << ',' << m.n_queries << ',' << m.n_dropped << '\n';
    }
    const MetricSet& d = report.dataset;
    out << "dataset," << format9(d.sensitivity) << ',' << format9(d.map) << ',' << format9(d.f1)
        << ',' << d.n_queries << ',' << d.n_dropped << '\n';
}

void write_f1_table_csv(const std::filesystem::path& path, std::string_view config_echo,
                        const std::vector<std::string>& vsm_names,
                        const std::vector<std::string>& model_labels,
                        const std::vector<std::vector<double>>& f1) {
    auto out = open_output(path);
    out << "# relhyper-f1-table-csv v" << kReportFormatVersion << " " << config_echo << "\n";
    out << "vsm";
    for (const std::string& label : model_labels) out << ',' << label;
    out << '\n';
    for (std::size_t r = 0; r < vsm_names.size(); ++r) {
        out << vsm_names[r];
        for (double v : f1[r]) out << ',' << format9(v);
        out << '\n';
    }
}

void write_drop_report_csv(const std::filesystem::path& path, std::string_view config_echo,
                           std::span<const ResolvedCategory> categories) {
    auto out = open_output(path);
    out << "# relhyper-drops-csv v" << kReportFormatVersion << " " << config_echo << "\n";
    out << "category_id,source,reason\n";
    for (const ResolvedCategory& cat : categories) {
        for (const DroppedPair& d : cat.dropped) {
            out << cat.category.id << ',' << d.pair.source << ',' << to_string(d.reason) << '\n';
        }
    }
}

void write_offset_stats_json(const std::filesystem::path& path, std::string_view config_echo,
                             std::span<const OffsetStats> per_category, const OffsetStats& pooled) {
    json j;
    j["format_version"] = kReportFormatVersion;
    j["config"] = std::string(config_echo);
    auto stats_json = [](const OffsetStats& s) {
        json o;
        o["n_offsets"] = s.n_offsets;
        o["mean_pairwise_cosine"] = round9(s.mean_pairwise_cosine);
        o["min"] = round9(s.min);
        o["p25"] = round9(s.p25);
        o["median"] = round9(s.median);
        o["p75"] = round9(s.p75);
        o["max"] = round9(s.max);
        return o;
    };
    json cats;
    for (const OffsetStats& s : per_category) cats[s.category_id] = stats_json(s);
    j["per_category"] = std::move(cats);
    j["dataset"] = stats_json(pooled);
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

void write_diagnostics_summary_json(const std::filesystem::path& path,
                                    std::string_view config_echo,
                                    std::span<const DiagnosticsRecord> records) {
    // per (category, model) medians of the three pooled measurements
    struct Bucket {
        std::vector<double> euclid, cos_target, cos_nontarget;
    };
    std::map<std::string, std::map<std::string, Bucket>> buckets;
    for (const DiagnosticsRecord& rec : records) {
        Bucket& b = buckets[rec.category_id][rec.model_label];
        b.euclid.push_back(rec.euclid_qp_target);
        b.cos_target.push_back(rec.cos_qp_target);
        b.cos_nontarget.insert(b.cos_nontarget.end(), rec.cos_qp_nontargets.begin(),
                               rec.cos_qp_nontargets.end());
    }
    json j;
    j["format_version"] = kReportFormatVersion;
    j["config"] = std::string(config_echo);
    json cats;
    for (const auto& [cat, models] : buckets) {
        json per_model;
        for (const auto& [label, b] : models) {
            json m;
            m["n"] = b.euclid.size();
            m["median_euclid_target"] = round9(percentile(b.euclid, 50.0));
            m["median_cos_target"] = round9(percentile(b.cos_target, 50.0));
            m["median_cos_nontarget"] = round9(percentile(b.cos_nontarget, 50.0));
            per_model[label] = std::move(m);
        }
        cats[cat] = std::move(per_model);
    }
    j["per_category"] = std::move(cats);
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

} // namespace relhyper

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relhyper/analysis.hpp"
#include "relhyper/evaluate.hpp"
#include "relhyper/relations.hpp"
#include "relhyper/run_config.hpp"

namespace relhyper {

// Report numbers carry 9 significant decimal digits.
std::string format9(double v);
double round9(double v);

inline constexpr int kReportFormatVersion = 1;

void write_metrics_json(const std::filesystem::path& path, const RunConfig& config,
                        const VsmSpec& vsm_spec, const VectorSpaceModel& vsm,
                        const ModelConfig& model, std::span<const CategoryEval> evals,
                        const MetricsReport& report);

void write_metrics_csv(const std::filesystem::path& path, std::string_view config_echo,
                       const MetricsReport& report);

// rows = VSMs, columns = models
void write_f1_table_csv(const std::filesystem::path& path, std::string_view config_echo,
                        const std::vector<std::string>& vsm_names,
                        const std::vector<std::string>& model_labels,
                        const std::vector<std::vector<double>>& f1);

void write_drop_report_csv(const std::filesystem::path& path, std::string_view config_echo,
                           std::span<const ResolvedCategory> categories);

void write_offset_stats_json(const std::filesystem::path& path, std::string_view config_echo,
                             std::span<const OffsetStats> per_category, const OffsetStats& pooled);

void write_diagnostics_summary_json(const std::filesystem::path& path,
                                    std::string_view config_echo,
                                    std::span<const DiagnosticsRecord> records);

} // namespace relhyper

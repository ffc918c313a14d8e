#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "relhyper/evaluate.hpp"
#include "relhyper/models.hpp"
#include "relhyper/vector_space.hpp"

namespace relhyper {

struct VsmSpec {
    std::string path;
    VsmFormat format = VsmFormat::glove_text;
    std::string name; // defaults to the file stem
    CaseMode case_mode = CaseMode::lowercase_fallback;

    std::string effective_name() const;
};

// Declarative run description. The file format is flat key=value lines with
// section prefixes, e.g.
//
//   vsm.path=glove.txt
//   vsm.format=glove_text
//   bats.dir=BATS_3.0
//   model.0.kind=svmcos
//   model.1.kind=lrcos
//   k_eval=10
//   seed=42
//
// Multiple VSMs use vsm.0.*, vsm.1.*, ... Lines starting with '#' are
// comments.
struct RunConfig {
    std::vector<VsmSpec> vsms;
    std::string bats_dir;
    std::vector<ModelConfig> models;
    std::size_t k_eval = 10;
    KSensPolicy k_sens{};
    int n_nontargets = 10;
    std::uint64_t seed = 0;
    std::string out_dir = "relhyper-out";
    int threads = 0; // 0 = available parallelism
    bool no_classifier = false;

    // models with the ablation switch applied
    std::vector<ModelConfig> effective_models() const;
};

RunConfig parse_run_config_file(const std::filesystem::path& path);
void apply_config_entry(RunConfig& config, std::string_view key, std::string_view value,
                        const std::string& context);

// Canonical serialization of every effective setting; embedded into every
// report so runs can be reproduced from their outputs.
std::string echo_config(const RunConfig& config);
std::string echo_config_inline(const RunConfig& config);

void validate_for_eval(const RunConfig& config);
void validate_for_offsets(const RunConfig& config);
void validate_for_diagnose(const RunConfig& config);

} // namespace relhyper

#pragma once

#include <iostream>
#include <string>

#include "relhyper/run_config.hpp"

namespace relhyper {

// Exit codes shared by the CLI and the in-process command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNumeric = 4;

struct CommandIo {
    std::ostream* out = &std::cout;
    std::ostream* err = &std::cerr;
};

struct QueryArgs {
    VsmSpec vsm;
    std::string pairs_file;
    ModelConfig model;
    std::string source;
    std::size_t k = 10;
    std::string dump_model_path; // optional
    std::uint64_t seed = 0;
    int threads = 0;
};

struct CacheArgs {
    VsmSpec vsm;
    std::string out_file; // defaults to <path>.rhc
};

// On any failure the commands remove partially written outputs, print the
// error to `io.err` and return a nonzero code.
int cmd_eval(const RunConfig& config, const CommandIo& io = {});
int cmd_query(const QueryArgs& args, const CommandIo& io = {});
int cmd_analyze_offsets(const RunConfig& config, const CommandIo& io = {});
int cmd_diagnose(const RunConfig& config, const CommandIo& io = {});
int cmd_cache(const CacheArgs& args, const CommandIo& io = {});

} // namespace relhyper

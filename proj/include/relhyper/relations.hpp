#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "relhyper/vector_space.hpp"

namespace relhyper {

// One source token with its alternative correct targets.
struct RelationPair {
    std::string source;
    std::vector<std::string> targets;
};

struct RelationCategory {
    std::string id;
    std::string name;
    std::vector<RelationPair> pairs;
};

enum class DropReason { source_oov, all_targets_oov };
std::string_view to_string(DropReason r);

// A pair resolved against a VSM. Tokens are canonicalized to the vocabulary
// entry that matched (relevant under lowercase_fallback), so downstream gold
// matching can compare row indices.
struct ResolvedPair {
    std::string source;
    std::size_t source_row = 0;
    std::vector<std::string> targets;
    std::vector<std::size_t> target_rows;
};

struct DroppedPair {
    RelationPair pair;
    DropReason reason;
};

struct ResolvedCategory {
    RelationCategory category;
    std::vector<ResolvedPair> pairs;
    std::vector<DroppedPair> dropped;
};

// File format: one pair per line, `source<TAB>target1/target2/...`.
// Lines starting with '#' are comments; blank lines are skipped.
RelationCategory parse_bats_file(const std::filesystem::path& path);

// One category per regular *.txt file, recursing into subdirectories,
// sorted by category id.
std::vector<RelationCategory> parse_bats_directory(const std::filesystem::path& path);

// A pair is dropped iff its source is OOV or all of its targets are; OOV
// targets inside a surviving pair are pruned.
ResolvedCategory resolve(const RelationCategory& category, const VectorSpaceModel& vsm);

// Re-serializes in the canonical on-disk form (used by round-trip checks).
std::string serialize_category(const RelationCategory& category);

} // namespace relhyper

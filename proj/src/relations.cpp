#include "relhyper/relations.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
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

// "E01 [country - capital].txt" -> id "E01", name "country - capital"
void derive_id_and_name(const std::filesystem::path& path, RelationCategory& cat) {
    const std::string stem = path.stem().string();
    const std::size_t open = stem.find('[');
    const std::size_t close = stem.rfind(']');
    if (open != std::string::npos && close != std::string::npos && close > open) {
        cat.name = std::string(trim(std::string_view(stem).substr(open + 1, close - open - 1)));
        cat.id = std::string(trim(std::string_view(stem).substr(0, open)));
    } else {
        cat.name = stem;
        const std::size_t space = stem.find(' ');
        cat.id = (space == std::string::npos) ? stem : stem.substr(0, space);
    }
    if (cat.id.empty()) cat.id = stem;
}

} // namespace

std::string_view to_string(DropReason r) {
    return r == DropReason::source_oov ? "source_oov" : "all_targets_oov";
}

RelationCategory parse_bats_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    RelationCategory cat;
    derive_id_and_name(path, cat);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 'source<TAB>targets'");
        }
        RelationPair pair;
        pair.source = std::string(trim(std::string_view(line).substr(0, tab)));
        const std::string_view targets_field = trim(std::string_view(line).substr(tab + 1));
        if (pair.source.empty() || targets_field.empty()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": empty source or targets field");
        }
        std::size_t pos = 0;
        while (pos <= targets_field.size()) {
            std::size_t slash = targets_field.find('/', pos);
            std::string_view t = (slash == std::string_view::npos)
                                     ? targets_field.substr(pos)
                                     : targets_field.substr(pos, slash - pos);
            t = trim(t);
            if (!t.empty()) {
                std::string target(t);
                if (std::find(pair.targets.begin(), pair.targets.end(), target) ==
                    pair.targets.end()) {
                    pair.targets.push_back(std::move(target));
                }
            }
            if (slash == std::string_view::npos) break;
            pos = slash + 1;
        }
        if (pair.targets.empty()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": no targets");
        }
        cat.pairs.push_back(std::move(pair));
    }
    return cat;
}

std::vector<RelationCategory> parse_bats_directory(const std::filesystem::path& path) {
    if (!std::filesystem::is_directory(path)) {
        throw ParseError("'" + path.string() + "' is not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<RelationCategory> cats;
    cats.reserve(files.size());
    for (const auto& file : files) cats.push_back(parse_bats_file(file));
    std::sort(cats.begin(), cats.end(),
              [](const RelationCategory& a, const RelationCategory& b) { return a.id < b.id; });
    if (cats.empty()) {
        std::cerr << "warning: no relation files found under '" << path.string() << "'\n";
    }
    return cats;
}

ResolvedCategory resolve(const RelationCategory& category, const VectorSpaceModel& vsm) {
    ResolvedCategory out;
    out.category = category;
    for (const RelationPair& pair : category.pairs) {
        const auto source_row = vsm.find_row(pair.source);
        if (!source_row) {
            out.dropped.push_back({pair, DropReason::source_oov});
            continue;
        }
        ResolvedPair resolved;
        resolved.source = vsm.token(*source_row);
        resolved.source_row = *source_row;
        std::set<std::size_t> seen_rows;
        for (const std::string& target : pair.targets) {
            const auto row = vsm.find_row(target);
            if (!row || !seen_rows.insert(*row).second) continue;
            resolved.targets.push_back(vsm.token(*row));
            resolved.target_rows.push_back(*row);
        }
        if (resolved.targets.empty()) {
            out.dropped.push_back({pair, DropReason::all_targets_oov});
            continue;
        }
        out.pairs.push_back(std::move(resolved));
    }
    return out;
}

std::string serialize_category(const RelationCategory& category) {
    std::ostringstream out;
    for (const RelationPair& pair : category.pairs) {
        out << pair.source << '\t';
        for (std::size_t i = 0; i < pair.targets.size(); ++i) {
            if (i) out << '/';
            out << pair.targets[i];
        }
        out << '\n';
    }
    return out.str();
}

} // namespace relhyper

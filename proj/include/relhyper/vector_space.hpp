#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace relhyper {

// Rows are stored as 32-bit floats (matching published embedding files); all
// dot products accumulate in 64-bit.
using WordVector = std::vector<float>;

enum class VsmFormat { glove_text, w2v_text, w2v_binary, native_cache };
enum class CaseMode { exact, lowercase_fallback };

std::optional<VsmFormat> parse_vsm_format(std::string_view s);
std::string_view to_string(VsmFormat f);
std::optional<CaseMode> parse_case_mode(std::string_view s);
std::string_view to_string(CaseMode m);

struct RankedToken {
    std::string token;
    double score = 0.0;
};

// Immutable token -> vector store with precomputed row norms. Safe for any
// number of concurrent readers once constructed.
class VectorSpaceModel {
public:
    VectorSpaceModel(std::string name,
                     std::size_t dim,
                     std::vector<std::string> tokens,
                     std::vector<float> matrix,
                     CaseMode case_mode,
                     std::size_t duplicates_dropped = 0);

    const std::string& name() const { return name_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return tokens_.size(); }
    CaseMode case_mode() const { return case_mode_; }
    std::size_t duplicates_dropped() const { return duplicates_dropped_; }

    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::string& token(std::size_t row) const { return tokens_[row]; }

    std::span<const float> row(std::size_t i) const {
        return {matrix_.data() + i * dim_, dim_};
    }
    double row_norm(std::size_t i) const { return norms_[i]; }

    // Exact match first; under lowercase_fallback a miss retries the
    // ASCII-lowercased token.
    std::optional<std::size_t> find_row(std::string_view token) const;
    std::optional<std::span<const float>> lookup(std::string_view token) const;

private:
    std::string name_;
    std::size_t dim_;
    std::vector<std::string> tokens_;
    std::vector<float> matrix_;
    std::vector<double> norms_;
    CaseMode case_mode_;
    std::size_t duplicates_dropped_;

    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };
    std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
};

VectorSpaceModel load_vsm(const std::filesystem::path& path,
                          VsmFormat format,
                          CaseMode case_mode = CaseMode::lowercase_fallback);

void write_cache(const VectorSpaceModel& vsm, const std::filesystem::path& path);
VectorSpaceModel read_cache(const std::filesystem::path& path,
                            CaseMode case_mode = CaseMode::lowercase_fallback);

double l2_norm(std::span<const float> v);
double l2_norm(std::span<const double> v);

double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const double> a, std::span<const float> b);

// entry i = cosine(query, row i); partitioning across threads changes nothing
// because every entry is written independently.
void score_all(const VectorSpaceModel& vsm, std::span<const double> query,
               std::span<double> out, int n_threads = 1);
std::vector<double> score_all(const VectorSpaceModel& vsm, std::span<const double> query,
                              int n_threads = 1);

// Top-k selection over a score array; ties broken by ascending row index.
std::vector<std::pair<std::size_t, double>> select_top_k(std::span<const double> scores,
                                                         std::size_t k);

// 1-based rank of `row` under (score desc, row index asc).
std::size_t rank_of(std::span<const double> scores, std::size_t row);

std::vector<std::pair<std::size_t, double>> top_k_rows(const VectorSpaceModel& vsm,
                                                       std::span<const double> query,
                                                       std::size_t k, int n_threads = 1);
std::vector<RankedToken> top_k_cosine(const VectorSpaceModel& vsm,
                                      std::span<const double> query,
                                      std::size_t k, int n_threads = 1);

std::vector<double> to_double(std::span<const float> v);

} // namespace relhyper

#include "relhyper/vector_space.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <queue>
#include <sstream>

#include "relhyper/errors.hpp"
#include "relhyper/parallel.hpp"

namespace relhyper {

namespace {

std::string lowercase_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

float parse_float(std::string_view text, std::size_t line_no, const std::filesystem::path& path) {
    float value = 0.0f;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad float value '" +
                         std::string(text) + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": non-finite value '" +
                         std::string(text) + "'");
    }
    return value;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

struct RowAccumulator {
    std::size_t dim = 0;
    std::vector<std::string> tokens;
    std::vector<float> matrix;
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t duplicates = 0;

    // Returns false when the token was a duplicate (row dropped, first kept).
    bool add(std::string token, const float* values, std::size_t n,
             std::size_t line_no, const std::filesystem::path& path) {
        if (seen.count(token)) {
            ++duplicates;
            return false;
        }
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm_sq += double(values[i]) * values[i];
        if (norm_sq == 0.0) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": zero-norm vector for token '" + token + "'");
        }
        matrix.insert(matrix.end(), values, values + n);
        seen.emplace(token, tokens.size());
        tokens.push_back(std::move(token));
        return true;
    }
};

// token then `dim` floats, single-space separated
void parse_text_record(std::string_view line, std::size_t line_no, const std::filesystem::path& path,
                       std::size_t expected_dim, RowAccumulator& acc, std::vector<float>& scratch) {
    const std::size_t sep = line.find(' ');
    if (sep == std::string_view::npos || sep == 0) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 'token v1 .. vd'");
    }
    std::string token(line.substr(0, sep));
    scratch.clear();
    std::size_t pos = sep + 1;
    while (pos <= line.size()) {
        std::size_t next = line.find(' ', pos);
        std::string_view field = (next == std::string_view::npos)
                                     ? line.substr(pos)
                                     : line.substr(pos, next - pos);
        if (field.empty()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty field");
        }
        scratch.push_back(parse_float(field, line_no, path));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    if (expected_dim != 0 && scratch.size() != expected_dim) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(expected_dim) + " values, found " +
                         std::to_string(scratch.size()));
    }
    acc.add(std::move(token), scratch.data(), scratch.size(), line_no, path);
}

std::ifstream open_input(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return in;
}

RowAccumulator load_glove_text(const std::filesystem::path& path) {
    auto in = open_input(path, false);
    RowAccumulator acc;
    std::vector<float> scratch;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        parse_text_record(line, line_no, path, acc.dim, acc, scratch);
        if (acc.dim == 0) acc.dim = scratch.size();
    }
    if (acc.tokens.empty()) throw ParseError(path.string() + ": no records");
    return acc;
}

std::pair<std::size_t, std::size_t> parse_header(const std::string& line, std::size_t line_no,
                                                 const std::filesystem::path& path) {
    std::size_t n = 0, d = 0;
    const char* first = line.data();
    const char* last = line.data() + line.size();
    auto r1 = std::from_chars(first, last, n);
    if (r1.ec != std::errc{} || r1.ptr == last || *r1.ptr != ' ') {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad 'N d' header");
    }
    auto r2 = std::from_chars(r1.ptr + 1, last, d);
    if (r2.ec != std::errc{} || r2.ptr != last || n == 0 || d == 0) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad 'N d' header");
    }
    return {n, d};
}

RowAccumulator load_w2v_text(const std::filesystem::path& path) {
    auto in = open_input(path, false);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    strip_cr(line);
    auto [n, d] = parse_header(line, 1, path);

    RowAccumulator acc;
    acc.dim = d;
    std::vector<float> scratch;
    std::size_t line_no = 1;
    std::size_t records = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        if (records == n) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": more records than the header announced");
        }
        parse_text_record(line, line_no, path, d, acc, scratch);
        ++records;
    }
    if (records != n) {
        throw ParseError(path.string() + ": header announced " + std::to_string(n) +
                         " records, found " + std::to_string(records));
    }
    return acc;
}

RowAccumulator load_w2v_binary(const std::filesystem::path& path) {
    auto in = open_input(path, true);
    std::string header;
    if (!std::getline(in, header)) throw ParseError(path.string() + ": empty file");
    strip_cr(header);
    auto [n, d] = parse_header(header, 1, path);

    RowAccumulator acc;
    acc.dim = d;
    std::vector<float> values(d);
    for (std::size_t rec = 0; rec < n; ++rec) {
        std::string token;
        int c;
        while ((c = in.get()) != EOF && (c == '\n' || c == '\r')) {
        }
        while (c != EOF && c != ' ') {
            token.push_back(static_cast<char>(c));
            c = in.get();
        }
        if (c == EOF || token.empty()) {
            throw ParseError(path.string() + ": truncated record " + std::to_string(rec + 1));
        }
        in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(d * sizeof(float)));
        if (in.gcount() != static_cast<std::streamsize>(d * sizeof(float))) {
            throw ParseError(path.string() + ": truncated vector for token '" + token + "'");
        }
        for (float v : values) {
            if (!std::isfinite(v)) {
                throw ParseError(path.string() + ": non-finite value for token '" + token + "'");
            }
        }
        acc.add(std::move(token), values.data(), d, rec + 2, path);
    }
    return acc;
}

constexpr char kCacheMagic[4] = {'R', 'H', 'C', '1'};

std::uint32_t read_u32(std::istream& in, const std::filesystem::path& path) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (in.gcount() != 4) throw CacheError(path.string() + ": truncated cache file");
    return std::uint32_t(buf[0]) | std::uint32_t(buf[1]) << 8 | std::uint32_t(buf[2]) << 16 |
           std::uint32_t(buf[3]) << 24;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                            static_cast<unsigned char>((v >> 8) & 0xff),
                            static_cast<unsigned char>((v >> 16) & 0xff),
                            static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

} // namespace

std::optional<VsmFormat> parse_vsm_format(std::string_view s) {
    if (s == "glove_text") return VsmFormat::glove_text;
    if (s == "w2v_text") return VsmFormat::w2v_text;
    if (s == "w2v_binary") return VsmFormat::w2v_binary;
    if (s == "native_cache") return VsmFormat::native_cache;
    return std::nullopt;
}

std::string_view to_string(VsmFormat f) {
    switch (f) {
        case VsmFormat::glove_text: return "glove_text";
        case VsmFormat::w2v_text: return "w2v_text";
        case VsmFormat::w2v_binary: return "w2v_binary";
        case VsmFormat::native_cache: return "native_cache";
    }
    return "?";
}

std::optional<CaseMode> parse_case_mode(std::string_view s) {
    if (s == "exact") return CaseMode::exact;
    if (s == "lowercase_fallback") return CaseMode::lowercase_fallback;
    return std::nullopt;
}

std::string_view to_string(CaseMode m) {
    return m == CaseMode::exact ? "exact" : "lowercase_fallback";
}

VectorSpaceModel::VectorSpaceModel(std::string name, std::size_t dim,
                                   std::vector<std::string> tokens, std::vector<float> matrix,
                                   CaseMode case_mode, std::size_t duplicates_dropped)
    : name_(std::move(name)),
      dim_(dim),
      tokens_(std::move(tokens)),
      matrix_(std::move(matrix)),
      case_mode_(case_mode),
      duplicates_dropped_(duplicates_dropped) {
    if (dim_ == 0) throw std::invalid_argument("VectorSpaceModel: dimension must be positive");
    if (matrix_.size() != tokens_.size() * dim_) {
        throw std::invalid_argument("VectorSpaceModel: matrix size does not match tokens * dim");
    }
    norms_.resize(tokens_.size());
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        const double n = l2_norm(row(i));
        if (n == 0.0) {
            throw NumericError("VectorSpaceModel: zero-norm row for token '" + tokens_[i] + "'");
        }
        norms_[i] = n;
        auto [it, inserted] = index_.emplace(tokens_[i], i);
        if (!inserted) throw std::invalid_argument("VectorSpaceModel: duplicate token '" + tokens_[i] + "'");
    }
}

std::optional<std::size_t> VectorSpaceModel::find_row(std::string_view token) const {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    if (case_mode_ == CaseMode::lowercase_fallback) {
        const std::string lower = lowercase_ascii(token);
        if (lower != token) {
            it = index_.find(std::string_view(lower));
            if (it != index_.end()) return it->second;
        }
    }
    return std::nullopt;
}

std::optional<std::span<const float>> VectorSpaceModel::lookup(std::string_view token) const {
    auto r = find_row(token);
    if (!r) return std::nullopt;
    return row(*r);
}

VectorSpaceModel load_vsm(const std::filesystem::path& path, VsmFormat format, CaseMode case_mode) {
    if (format == VsmFormat::native_cache) return read_cache(path, case_mode);
    RowAccumulator acc;
    switch (format) {
        case VsmFormat::glove_text: acc = load_glove_text(path); break;
        case VsmFormat::w2v_text: acc = load_w2v_text(path); break;
        case VsmFormat::w2v_binary: acc = load_w2v_binary(path); break;
        default: break;
    }
    return VectorSpaceModel(path.stem().string(), acc.dim, std::move(acc.tokens),
                            std::move(acc.matrix), case_mode, acc.duplicates);
}

void write_cache(const VectorSpaceModel& vsm, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot open '" + path.string() + "' for writing");
    out.write(kCacheMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(vsm.size()));
    write_u32(out, static_cast<std::uint32_t>(vsm.dim()));
    for (const auto& token : vsm.tokens()) {
        write_u32(out, static_cast<std::uint32_t>(token.size()));
        out.write(token.data(), static_cast<std::streamsize>(token.size()));
    }
    static_assert(sizeof(float) == 4);
    for (std::size_t i = 0; i < vsm.size(); ++i) {
        auto r = vsm.row(i);
        out.write(reinterpret_cast<const char*>(r.data()),
                  static_cast<std::streamsize>(r.size() * sizeof(float)));
    }
    if (!out) throw CacheError("write failed for '" + path.string() + "'");
}

VectorSpaceModel read_cache(const std::filesystem::path& path, CaseMode case_mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cannot open '" + path.string() + "'");
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kCacheMagic, 4) != 0) {
        throw CacheError(path.string() + ": not a relhyper cache file (bad magic)");
    }
    const std::uint32_t n = read_u32(in, path);
    const std::uint32_t d = read_u32(in, path);
    if (n == 0 || d == 0) throw CacheError(path.string() + ": empty cache");
    std::vector<std::string> tokens(n);
    for (auto& token : tokens) {
        const std::uint32_t len = read_u32(in, path);
        token.resize(len);
        in.read(token.data(), len);
        if (in.gcount() != static_cast<std::streamsize>(len)) {
            throw CacheError(path.string() + ": truncated cache file");
        }
    }
    std::vector<float> matrix(static_cast<std::size_t>(n) * d);
    in.read(reinterpret_cast<char*>(matrix.data()),
            static_cast<std::streamsize>(matrix.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(matrix.size() * sizeof(float))) {
        throw CacheError(path.string() + ": truncated cache file");
    }
    return VectorSpaceModel(path.stem().string(), d, std::move(tokens), std::move(matrix), case_mode);
}

namespace {

// four accumulators break the dependency chain so the compiler can vectorize
template <typename A, typename B>
double dot64(const A* a, const B* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += double(a[i]) * double(b[i]);
        s1 += double(a[i + 1]) * double(b[i + 1]);
        s2 += double(a[i + 2]) * double(b[i + 2]);
        s3 += double(a[i + 3]) * double(b[i + 3]);
    }
    for (; i < n; ++i) s0 += double(a[i]) * double(b[i]);
    return (s0 + s1) + (s2 + s3);
}

template <typename A, typename B>
double cosine_impl(std::span<const A> a, std::span<const B> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    if (a.empty()) throw std::invalid_argument("cosine: empty vectors");
    const double na = dot64(a.data(), a.data(), a.size());
    const double nb = dot64(b.data(), b.data(), b.size());
    if (na == 0.0 || nb == 0.0) throw NumericError("cosine: zero vector");
    return dot64(a.data(), b.data(), a.size()) / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace

double l2_norm(std::span<const float> v) { return std::sqrt(dot64(v.data(), v.data(), v.size())); }
double l2_norm(std::span<const double> v) { return std::sqrt(dot64(v.data(), v.data(), v.size())); }

double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const float> b) { return cosine_impl(a, b); }

void score_all(const VectorSpaceModel& vsm, std::span<const double> query,
               std::span<double> out, int n_threads) {
    if (query.size() != vsm.dim()) throw std::invalid_argument("score_all: query dimension mismatch");
    if (out.size() != vsm.size()) throw std::invalid_argument("score_all: output size mismatch");
    const double qn = l2_norm(query);
    if (qn == 0.0) throw NumericError("score_all: zero query vector");

    const std::size_t n = vsm.size();
    const std::size_t dim = vsm.dim();
    auto score_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double dot = dot64(query.data(), vsm.row(i).data(), dim);
            out[i] = dot / (qn * vsm.row_norm(i));
        }
    };

    n_threads = resolve_thread_count(n_threads);
    if (n_threads <= 1 || n < 4096) {
        score_range(0, n);
        return;
    }
    const std::size_t blocks = static_cast<std::size_t>(n_threads);
    run_parallel(blocks, n_threads, [&](std::size_t b) {
        const std::size_t begin = n * b / blocks;
        const std::size_t end = n * (b + 1) / blocks;
        score_range(begin, end);
    });
}

std::vector<double> score_all(const VectorSpaceModel& vsm, std::span<const double> query,
                              int n_threads) {
    std::vector<double> out(vsm.size());
    score_all(vsm, query, out, n_threads);
    return out;
}

std::vector<std::pair<std::size_t, double>> select_top_k(std::span<const double> scores,
                                                         std::size_t k) {
    if (k == 0) throw std::invalid_argument("top-k: k must be positive");
    if (k > scores.size()) throw std::invalid_argument("top-k: k exceeds the number of rows");

    struct Entry {
        double score;
        std::size_t row;
    };
    // min-heap whose top is the worst kept entry (lowest score, then highest row)
    auto worse = [](const Entry& a, const Entry& b) {
        return a.score > b.score || (a.score == b.score && a.row < b.row);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (heap.size() < k) {
            heap.push({scores[i], i});
        } else if (scores[i] > heap.top().score) {
            heap.pop();
            heap.push({scores[i], i});
        }
    }
    std::vector<std::pair<std::size_t, double>> out(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
        out[i] = {heap.top().row, heap.top().score};
        heap.pop();
    }
    return out;
}

std::size_t rank_of(std::span<const double> scores, std::size_t row) {
    const double s = scores[row];
    std::size_t rank = 1;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > s || (scores[i] == s && i < row)) ++rank;
    }
    return rank;
}

std::vector<std::pair<std::size_t, double>> top_k_rows(const VectorSpaceModel& vsm,
                                                       std::span<const double> query,
                                                       std::size_t k, int n_threads) {
    const std::vector<double> scores = score_all(vsm, query, n_threads);
    return select_top_k(scores, k);
}

std::vector<RankedToken> top_k_cosine(const VectorSpaceModel& vsm, std::span<const double> query,
                                      std::size_t k, int n_threads) {
    auto rows = top_k_rows(vsm, query, k, n_threads);
    std::vector<RankedToken> out;
    out.reserve(rows.size());
    for (const auto& [row, score] : rows) out.push_back({vsm.token(row), score});
    return out;
}

std::vector<double> to_double(std::span<const float> v) {
    return std::vector<double>(v.begin(), v.end());
}

} // namespace relhyper

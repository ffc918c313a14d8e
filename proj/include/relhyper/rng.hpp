#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace relhyper {

// All randomness in the project flows through this header so that results are
// bit-identical across platforms and standard library versions. std::mt19937
// is portable but the std distributions are not, hence the hand-rolled draws.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a, used to derive per-fold seeds from (global seed, category, source).
class Fnv1a {
public:
    Fnv1a& update(std::string_view s) {
        for (unsigned char c : s) {
            hash_ ^= c;
            hash_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    Fnv1a& update_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            hash_ ^= (v >> (8 * i)) & 0xffULL;
            hash_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    std::uint64_t digest() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // decorrelate trivially related seeds (0, 1, 2, ...)
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1) with 53 bits of mantissa
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, n), unbiased via rejection
    std::size_t next_index(std::size_t n) {
        if (n <= 1) return 0;
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<std::size_t>(v % bound);
    }

    // standard normal via Box-Muller
    double next_normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(theta);
        has_cached_normal_ = true;
        return r * std::cos(theta);
    }

    // uniform in [lo, hi)
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

inline std::uint64_t derive_seed(std::uint64_t global, std::string_view a, std::string_view b) {
    Fnv1a h;
    h.update_u64(global).update(a).update("\x1f").update(b);
    return h.digest();
}

} // namespace relhyper

#pragma once

// Synthetic vector spaces with planted relations, shared by the unit tests
// and the acceptance suite.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "relhyper/relations.hpp"
#include "relhyper/rng.hpp"
#include "relhyper/vector_space.hpp"

namespace synthetic {

struct Planted {
    relhyper::VectorSpaceModel vsm;
    relhyper::RelationCategory category;
};

inline std::string numbered(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
    return buf;
}

inline std::vector<float> random_unit(relhyper::Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& x : v) {
        x = rng.next_normal();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    std::vector<float> out(dim);
    for (std::size_t k = 0; k < dim; ++k) out[k] = static_cast<float>(v[k] / norm);
    return out;
}

// Every target sits at source + offset (+ optional Gaussian noise); sources
// cluster near the origin in the subspace orthogonal to the offset, so the
// target cloud is a plane at a fixed height along the offset direction.
// Distractors are an isotropic cloud. All three geometric models can recover
// the relation exactly when noise is zero.
//
// noise_sigma is the expected total norm of the per-target perturbation.
inline Planted planted_offset(std::uint64_t seed, std::size_t dim, std::size_t n_distractors,
                              std::size_t n_pairs, double offset_norm, double source_sigma,
                              double noise_sigma) {
    relhyper::Rng rng(seed);

    std::vector<double> offset(dim), offset_dir(dim);
    {
        const std::vector<float> u = random_unit(rng, dim);
        for (std::size_t k = 0; k < dim; ++k) {
            offset_dir[k] = double(u[k]);
            offset[k] = offset_norm * double(u[k]);
        }
    }

    std::vector<std::string> tokens;
    std::vector<float> matrix;
    relhyper::RelationCategory category;
    category.id = "S01";
    category.name = "planted offset";

    auto push_row = [&](std::string token, const std::vector<double>& row) {
        tokens.push_back(std::move(token));
        for (double x : row) matrix.push_back(static_cast<float>(x));
    };

    const double per_coord_noise = noise_sigma / std::sqrt(static_cast<double>(dim));
    for (std::size_t i = 0; i < n_pairs; ++i) {
        std::vector<double> src(dim), tgt(dim);
        double along = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            src[k] = source_sigma * rng.next_normal();
            along += src[k] * offset_dir[k];
        }
        for (std::size_t k = 0; k < dim; ++k) {
            src[k] -= along * offset_dir[k];
            tgt[k] = src[k] + offset[k] + per_coord_noise * rng.next_normal();
        }
        push_row(numbered("src", i), src);
        push_row(numbered("tgt", i), tgt);
        category.pairs.push_back({numbered("src", i), {numbered("tgt", i)}});
    }
    for (std::size_t i = 0; i < n_distractors; ++i) {
        std::vector<double> row(dim);
        for (std::size_t k = 0; k < dim; ++k) row[k] = rng.next_normal();
        push_row(numbered("tok", i), row);
    }

    return {relhyper::VectorSpaceModel("planted", dim, std::move(tokens), std::move(matrix),
                                       relhyper::CaseMode::exact),
            std::move(category)};
}

// Targets are linearly separable from everything else along the first axis,
// but each pair's offset points along its own coordinate axis, so offsets are
// mutually near-orthogonal: pairwise cosine is exactly
// common^2 / (common^2 + axis_step^2) for distinct pairs.
//
// dim must be at least n_pairs + 1.
inline Planted separable_nonparallel(std::uint64_t seed, std::size_t n_pairs,
                                     std::size_t n_distractors, double source_norm,
                                     double axis_step, double common_step) {
    const std::size_t dim = n_pairs + 1;
    relhyper::Rng rng(seed);

    std::vector<std::string> tokens;
    std::vector<float> matrix;
    relhyper::RelationCategory category;
    category.id = "S02";
    category.name = "separable nonparallel";

    auto push_row = [&](std::string token, const std::vector<double>& row) {
        tokens.push_back(std::move(token));
        for (double x : row) matrix.push_back(static_cast<float>(x));
    };

    auto transverse_unit = [&]() {
        // random unit vector with zero first coordinate
        std::vector<double> v(dim, 0.0);
        double norm = 0.0;
        for (std::size_t k = 1; k < dim; ++k) {
            v[k] = rng.next_normal();
            norm += v[k] * v[k];
        }
        norm = std::sqrt(norm);
        for (std::size_t k = 1; k < dim; ++k) v[k] /= norm;
        return v;
    };

    for (std::size_t i = 0; i < n_pairs; ++i) {
        std::vector<double> src = transverse_unit();
        for (double& x : src) x *= source_norm;
        std::vector<double> tgt = src;
        tgt[0] += common_step;
        tgt[i + 1] += axis_step;
        push_row(numbered("src", i), src);
        push_row(numbered("tgt", i), tgt);
        category.pairs.push_back({numbered("src", i), {numbered("tgt", i)}});
    }
    for (std::size_t i = 0; i < n_distractors; ++i) {
        std::vector<double> row = transverse_unit();
        for (double& x : row) x *= source_norm;
        row[0] = -std::abs(0.5 * rng.next_normal());
        push_row(numbered("tok", i), row);
    }

    return {relhyper::VectorSpaceModel("separable", dim, std::move(tokens), std::move(matrix),
                                       relhyper::CaseMode::exact),
            std::move(category)};
}

// tiny VSM built from explicit rows, for focused unit tests
inline relhyper::VectorSpaceModel tiny_vsm(const std::vector<std::string>& tokens,
                                           const std::vector<std::vector<float>>& rows,
                                           relhyper::CaseMode mode = relhyper::CaseMode::exact) {
    std::vector<float> matrix;
    for (const auto& r : rows) matrix.insert(matrix.end(), r.begin(), r.end());
    return relhyper::VectorSpaceModel("tiny", rows.front().size(),
                                      std::vector<std::string>(tokens), std::move(matrix), mode);
}

} // namespace synthetic

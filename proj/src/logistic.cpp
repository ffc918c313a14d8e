#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relhyper/errors.hpp"
#include "relhyper/numerics.hpp"

namespace relhyper {

namespace {

// log(1 + exp(-m)) without overflow
double log1p_exp_neg(double m) {
    if (m >= 0.0) return std::log1p(std::exp(-m));
    return -m + std::log1p(std::exp(m));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct Problem {
    const Matrix& pos;
    const Matrix& neg;
    double l2;
    std::size_t dim;
    double inv_n;

    // params = (w..., b)
    double value(std::span<const double> p) const {
        double loss = 0.0;
        auto margin = [&](const std::vector<double>& x) {
            double z = p[dim];
            for (std::size_t k = 0; k < dim; ++k) z += p[k] * x[k];
            return z;
        };
        for (const auto& x : pos) loss += log1p_exp_neg(margin(x));
        for (const auto& x : neg) loss += log1p_exp_neg(-margin(x));
        loss *= inv_n;
        double reg = 0.0;
        for (std::size_t k = 0; k < dim; ++k) reg += p[k] * p[k];
        return loss + 0.5 * l2 * reg;
    }

    void gradient(std::span<const double> p, std::span<double> g) const {
        std::fill(g.begin(), g.end(), 0.0);
        auto accumulate = [&](const std::vector<double>& x, double y) {
            double z = p[dim];
            for (std::size_t k = 0; k < dim; ++k) z += p[k] * x[k];
            // d/dz log(1+exp(-y z)) = -y * sigmoid(-y z)
            const double coef = -y * sigmoid(-y * z) * inv_n;
            for (std::size_t k = 0; k < dim; ++k) g[k] += coef * x[k];
            g[dim] += coef;
        };
        for (const auto& x : pos) accumulate(x, 1.0);
        for (const auto& x : neg) accumulate(x, -1.0);
        for (std::size_t k = 0; k < dim; ++k) g[k] += l2 * p[k];
    }
};

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

double LogisticModel::probability(std::span<const double> x) const {
    if (x.size() != w.size()) throw std::invalid_argument("probability: dimension mismatch");
    double z = b;
    for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
    return sigmoid(z);
}

double LogisticModel::probability(std::span<const float> x) const {
    if (x.size() != w.size()) throw std::invalid_argument("probability: dimension mismatch");
    double z = b;
    for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * double(x[i]);
    return sigmoid(z);
}

LogisticModel train_logistic(const Matrix& positives, const Matrix& negatives, double l2,
                             double tol, int max_iter, std::uint64_t seed) {
    (void)seed; // the optimizer is deterministic; kept for interface stability
    if (positives.empty() || negatives.empty()) {
        throw std::invalid_argument("train_logistic: both classes must be non-empty");
    }
    if (l2 < 0.0 || tol <= 0.0 || max_iter <= 0) {
        throw std::invalid_argument("train_logistic: invalid config");
    }
    const std::size_t dim = positives.front().size();
    for (const auto& x : positives) {
        if (x.size() != dim) throw std::invalid_argument("train_logistic: inconsistent dimension");
    }
    for (const auto& x : negatives) {
        if (x.size() != dim) throw std::invalid_argument("train_logistic: inconsistent dimension");
    }
    const double inv_n = 1.0 / static_cast<double>(positives.size() + negatives.size());
    const Problem prob{positives, negatives, l2, dim, inv_n};

    std::vector<double> p(dim + 1, 0.0);
    std::vector<double> g(dim + 1), g_prev(dim + 1), p_prev(dim + 1), trial(dim + 1);

    prob.gradient(p, g);
    const double g0 = norm(g);
    double f = prob.value(p);
    double step = 1.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double gn = norm(g);
        if (gn <= tol * std::max(1.0, g0)) break;

        if (iter > 0) {
            // Barzilai-Borwein step from the last displacement
            double ss = 0.0, sy = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k) {
                const double s = p[k] - p_prev[k];
                const double yk = g[k] - g_prev[k];
                ss += s * s;
                sy += s * yk;
            }
            step = (sy > 0.0) ? std::clamp(ss / sy, 1e-10, 1e10) : 1.0;
        }

        // Armijo backtracking
        double t = step;
        double f_new = f;
        for (int back = 0; back < 60; ++back) {
            for (std::size_t k = 0; k < p.size(); ++k) trial[k] = p[k] - t * g[k];
            f_new = prob.value(trial);
            if (f_new <= f - 1e-4 * t * gn * gn) break;
            t *= 0.5;
        }

        p_prev = p;
        g_prev = g;
        p = trial;
        f = f_new;
        prob.gradient(p, g);
    }

    LogisticModel model;
    model.w.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(dim));
    model.b = p[dim];
    return model;
}

double logistic_objective(const LogisticModel& m, const Matrix& positives, const Matrix& negatives,
                          double l2) {
    const std::size_t dim = m.w.size();
    const double inv_n = 1.0 / static_cast<double>(positives.size() + negatives.size());
    const Problem prob{positives, negatives, l2, dim, inv_n};
    std::vector<double> p(m.w);
    p.push_back(m.b);
    return prob.value(p);
}

std::vector<double> logistic_gradient(const LogisticModel& m, const Matrix& positives,
                                      const Matrix& negatives, double l2) {
    const std::size_t dim = m.w.size();
    const double inv_n = 1.0 / static_cast<double>(positives.size() + negatives.size());
    const Problem prob{positives, negatives, l2, dim, inv_n};
    std::vector<double> p(m.w);
    p.push_back(m.b);
    std::vector<double> g(dim + 1);
    prob.gradient(p, g);
    return g;
}

} // namespace relhyper

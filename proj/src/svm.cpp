#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "relhyper/errors.hpp"
#include "relhyper/numerics.hpp"

namespace relhyper {

double Hyperplane::decision(std::span<const double> x) const {
    if (x.size() != w.size()) throw std::invalid_argument("decision: dimension mismatch");
    double s = b;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
    return s;
}

namespace {

constexpr double kTau = 1e-12;

// Dual of the soft-margin problem with an unregularized intercept:
//
//   min_a  0.5 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,
//
// with Q_ij = y_i y_j x_i.x_j. Single-coordinate updates cannot maintain the
// equality constraint, so variables move in maximal-violating pairs; ties go
// to the smaller index, making the solver fully deterministic.
struct SmoSolver {
    SmoSolver(const std::vector<const std::vector<double>*>& x_in, const std::vector<double>& y_in,
              double C_in, double tol_in, int max_iter_in)
        : x(x_in), y(y_in), C(C_in), tol(tol_in), max_iter(max_iter_in) {}

    const std::vector<const std::vector<double>*>& x;
    const std::vector<double>& y;
    double C;
    double tol;
    int max_iter;

    std::size_t n = 0;
    std::vector<double> alpha;
    std::vector<double> grad; // grad_i = (Qa)_i - 1
    std::vector<double> q;    // full kernel matrix, n x n
    std::vector<double> diag;

    bool converged = false;
    int iterations = 0;
    double m_final = 0.0, M_final = 0.0;

    void build_kernel() {
        q.resize(n * n);
        diag.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& xi = *x[i];
            for (std::size_t j = 0; j <= i; ++j) {
                const auto& xj = *x[j];
                double dot = 0.0;
                for (std::size_t k = 0; k < xi.size(); ++k) dot += xi[k] * xj[k];
                const double v = y[i] * y[j] * dot;
                q[i * n + j] = v;
                q[j * n + i] = v;
            }
            diag[i] = q[i * n + i];
        }
    }

    bool in_up(std::size_t t) const { return y[t] > 0 ? alpha[t] < C : alpha[t] > 0; }
    bool in_low(std::size_t t) const { return y[t] > 0 ? alpha[t] > 0 : alpha[t] < C; }

    void solve() {
        n = x.size();
        alpha.assign(n, 0.0);
        grad.assign(n, -1.0);
        build_kernel();

        for (iterations = 0; iterations < max_iter; ++iterations) {
            std::size_t i = n, j = n;
            double m = -std::numeric_limits<double>::infinity();
            double M = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < n; ++t) {
                const double v = -y[t] * grad[t];
                if (in_up(t) && v > m) {
                    m = v;
                    i = t;
                }
                if (in_low(t) && v < M) {
                    M = v;
                    j = t;
                }
            }
            m_final = m;
            M_final = M;
            if (i == n || j == n || m - M <= tol) {
                converged = (i != n && j != n);
                break;
            }

            // move along alpha_i += y_i s, alpha_j -= y_j s
            double quad = diag[i] + diag[j] - 2.0 * y[i] * y[j] * q[i * n + j];
            if (quad <= 0.0) quad = kTau;
            double s = (m - (-y[j] * grad[j])) / quad; // = -(y_i g_i - y_j g_j)/quad

            // feasible interval for s from the two box constraints
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            {
                // alpha_i + y_i s in [0, C]
                if (y[i] > 0) {
                    lo = std::max(lo, -alpha[i]);
                    hi = std::min(hi, C - alpha[i]);
                } else {
                    lo = std::max(lo, alpha[i] - C);
                    hi = std::min(hi, alpha[i]);
                }
                // alpha_j - y_j s in [0, C]
                if (y[j] > 0) {
                    lo = std::max(lo, alpha[j] - C);
                    hi = std::min(hi, alpha[j]);
                } else {
                    lo = std::max(lo, -alpha[j]);
                    hi = std::min(hi, C - alpha[j]);
                }
            }
            s = std::clamp(s, lo, hi);
            if (s == 0.0) {
                converged = true; // numerically pinned; gap cannot be reduced
                break;
            }

            const double di = y[i] * s;
            const double dj = -y[j] * s;
            alpha[i] += di;
            alpha[j] += dj;
            const double* qi = &q[i * n];
            const double* qj = &q[j * n];
            for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
        }
    }

    double intercept() const {
        double sum = 0.0;
        std::size_t free_count = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (alpha[t] > 0.0 && alpha[t] < C) {
                sum += -y[t] * grad[t];
                ++free_count;
            }
        }
        if (free_count > 0) return sum / static_cast<double>(free_count);
        return 0.5 * (m_final + M_final);
    }
};

} // namespace

SvmResult train_linear_svm(const Matrix& positives, const Matrix& negatives, const SvmConfig& cfg) {
    if (positives.empty() || negatives.empty()) {
        throw std::invalid_argument("train_linear_svm: both classes must be non-empty");
    }
    if (cfg.C <= 0.0 || cfg.tol <= 0.0 || cfg.max_iter <= 0) {
        throw std::invalid_argument("train_linear_svm: invalid config");
    }
    const std::size_t dim = positives.front().size();
    std::vector<const std::vector<double>*> x;
    std::vector<double> y;
    x.reserve(positives.size() + negatives.size());
    y.reserve(x.capacity());
    for (const auto& v : positives) {
        if (v.size() != dim) throw std::invalid_argument("train_linear_svm: inconsistent dimension");
        x.push_back(&v);
        y.push_back(1.0);
    }
    for (const auto& v : negatives) {
        if (v.size() != dim) throw std::invalid_argument("train_linear_svm: inconsistent dimension");
        x.push_back(&v);
        y.push_back(-1.0);
    }

    SmoSolver solver(x, y, cfg.C, cfg.tol, cfg.max_iter);
    solver.solve();

    SvmResult result;
    result.converged = solver.converged;
    result.iterations = solver.iterations;
    result.plane.w.assign(dim, 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double coef = solver.alpha[t] * y[t];
        if (coef == 0.0) continue;
        const auto& xt = *x[t];
        for (std::size_t k = 0; k < dim; ++k) result.plane.w[k] += coef * xt[k];
    }
    result.plane.b = solver.intercept();

    double wnorm = 0.0;
    for (double v : result.plane.w) wnorm += v * v;
    if (wnorm == 0.0) {
        throw NumericError("train_linear_svm: degenerate data (separating normal collapsed to zero)");
    }
    return result;
}

double svm_objective(const Hyperplane& plane, const Matrix& positives, const Matrix& negatives,
                     double C) {
    double reg = 0.0;
    for (double v : plane.w) reg += v * v;
    double hinge = 0.0;
    for (const auto& v : positives) hinge += std::max(0.0, 1.0 - plane.decision(v));
    for (const auto& v : negatives) hinge += std::max(0.0, 1.0 + plane.decision(v));
    return 0.5 * reg + C * hinge;
}

} // namespace relhyper

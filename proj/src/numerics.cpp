#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relhyper/errors.hpp"
#include "relhyper/numerics.hpp"

namespace relhyper {

namespace {

// Cyclic Jacobi eigensolver for small dense symmetric matrices. Returns the
// eigenvector of the largest eigenvalue (ties broken by index).
std::vector<double> top_eigenvector(std::vector<double> a, std::size_t n) {
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    double frob = 0.0;
    for (double x : a) frob += x * x;
    const double threshold = 1e-28 * std::max(frob, 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        }
        if (2.0 * off <= threshold) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (a[i * n + i] > a[best * n + best]) best = i;
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = v[k * n + best];
    return out;
}

} // namespace

std::vector<double> first_principal_component(const Matrix& rows) {
    const std::size_t m = rows.size();
    if (m < 2) throw std::invalid_argument("first_principal_component: need at least 2 rows");
    const std::size_t d = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != d) {
            throw std::invalid_argument("first_principal_component: inconsistent dimension");
        }
    }

    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < d; ++k) mean[k] += r[k];
    }
    for (double& x : mean) x /= static_cast<double>(m);

    Matrix centered(m, std::vector<double>(d));
    double total_ss = 0.0, centered_ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            const double c = rows[i][k] - mean[k];
            centered[i][k] = c;
            centered_ss += c * c;
            total_ss += rows[i][k] * rows[i][k];
        }
    }
    if (centered_ss <= 1e-12 * std::max(total_ss, 1e-300)) {
        throw NumericError("first_principal_component: rows have no variance");
    }

    std::vector<double> pc(d);
    if (m <= d) {
        // Gram trick: top eigenvector u of C C' gives pc = C' u
        std::vector<double> gram(m * m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < d; ++k) dot += centered[i][k] * centered[j][k];
                gram[i * m + j] = dot;
                gram[j * m + i] = dot;
            }
        }
        const std::vector<double> u = top_eigenvector(std::move(gram), m);
        std::fill(pc.begin(), pc.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < d; ++k) pc[k] += u[i] * centered[i][k];
        }
    } else {
        std::vector<double> scatter(d * d, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < d; ++p) {
                const double cp = centered[i][p];
                for (std::size_t q = p; q < d; ++q) scatter[p * d + q] += cp * centered[i][q];
            }
        }
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = 0; q < p; ++q) scatter[p * d + q] = scatter[q * d + p];
        }
        pc = top_eigenvector(std::move(scatter), d);
    }

    double nrm = 0.0;
    for (double x : pc) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) throw NumericError("first_principal_component: eigenvector collapsed");
    for (double& x : pc) x /= nrm;

    double orient = 0.0;
    for (std::size_t k = 0; k < d; ++k) orient += pc[k] * mean[k];
    if (orient < 0.0) {
        for (double& x : pc) x = -x;
    } else if (orient == 0.0) {
        for (std::size_t k = 0; k < d; ++k) {
            if (pc[k] != 0.0) {
                if (pc[k] < 0.0) {
                    for (double& x : pc) x = -x;
                }
                break;
            }
        }
    }
    return pc;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile: empty input");
    if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile: p must be in [0, 100]");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("percentile: non-finite value");
    }
    std::sort(values.begin(), values.end());
    const double pos = (p / 100.0) * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return values[lo];
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

} // namespace relhyper

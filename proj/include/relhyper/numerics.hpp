#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace relhyper {

using Matrix = std::vector<std::vector<double>>;

// Separating hyperplane; decision(x) = w.x + b. The relational direction
// lives in w.
struct Hyperplane {
    std::vector<double> w;
    double b = 0.0;

    double decision(std::span<const double> x) const;
};

struct SvmConfig {
    double C = 0.001;
    double tol = 1e-6;
    int max_iter = 20000;
    std::uint64_t seed = 0; // reserved; the solver is deterministic
};

struct SvmResult {
    Hyperplane plane;
    bool converged = true;
    int iterations = 0;
};

// Soft-margin linear SVM with standard (non-squared) hinge loss and an
// unregularized intercept:
//
//   minimize  0.5 ||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))
//
// solved in the dual (box constraints plus the intercept's equality
// constraint) by deterministic maximal-violating-pair updates.
SvmResult train_linear_svm(const Matrix& positives, const Matrix& negatives,
                           const SvmConfig& cfg = {});

// Primal objective above, for contract checks. The intercept is not part of
// the regularization term.
double svm_objective(const Hyperplane& plane, const Matrix& positives, const Matrix& negatives,
                     double C);

struct LogisticModel {
    std::vector<double> w;
    double b = 0.0;

    double probability(std::span<const double> x) const;
    double probability(std::span<const float> x) const;
};

// L2-regularized logistic regression:
//
//   minimize  (1/n) sum_i log(1 + exp(-y_i (w.x_i + b))) + (l2/2) ||w||^2
//
// via gradient descent with Barzilai-Borwein steps and Armijo backtracking.
// The mean-loss form keeps the fit invariant under duplicating the data set.
LogisticModel train_logistic(const Matrix& positives, const Matrix& negatives, double l2,
                             double tol = 1e-8, int max_iter = 2000, std::uint64_t seed = 0);

double logistic_objective(const LogisticModel& m, const Matrix& positives, const Matrix& negatives,
                          double l2);
std::vector<double> logistic_gradient(const LogisticModel& m, const Matrix& positives,
                                      const Matrix& negatives, double l2);

// Unit eigenvector of the covariance of the mean-centered rows with the
// largest eigenvalue, sign-oriented so dot(pc, mean of rows) >= 0.
// Rows with (numerically) no variance are rejected.
std::vector<double> first_principal_component(const Matrix& rows);

// Linear-interpolation percentile of the sorted values at p in [0, 100].
double percentile(std::vector<double> values, double p);

enum class MlpLayout { linear, one_hidden_relu };

struct MlpRegressor {
    MlpLayout layout = MlpLayout::linear;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::size_t hidden_dim = 0; // unused for linear

    // linear: w0 is out_dim x in_dim (row-major), b0 has out_dim entries.
    // one_hidden_relu: w0 hidden x in, b0 hidden, w1 out x hidden, b1 out.
    std::vector<double> w0, b0, w1, b1;
};

MlpRegressor make_mlp(MlpLayout layout, std::size_t in_dim, std::size_t out_dim,
                      std::size_t hidden_dim, std::uint64_t seed);

std::vector<double> predict_mlp(const MlpRegressor& model, std::span<const double> x);

// Mean squared error over all samples and output components.
double mlp_mse(const MlpRegressor& model, const Matrix& inputs, const Matrix& labels);

// Flat parameter access (order: w0, b0, w1, b1) for the trainer and for
// gradient checks.
std::vector<double> mlp_parameters(const MlpRegressor& model);
void set_mlp_parameters(MlpRegressor& model, std::span<const double> params);
std::vector<double> mlp_gradient(const MlpRegressor& model, const Matrix& inputs,
                                 const Matrix& labels);

// Full-batch gradient descent on the MSE for `epochs` passes.
MlpRegressor train_mlp(const Matrix& inputs, const Matrix& labels, MlpLayout layout,
                       std::size_t hidden_dim, double lr, int epochs, std::uint64_t seed);

} // namespace relhyper

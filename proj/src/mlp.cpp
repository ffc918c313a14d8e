#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relhyper/errors.hpp"
#include "relhyper/numerics.hpp"
#include "relhyper/rng.hpp"

namespace relhyper {

namespace {

void check_shapes(const MlpRegressor& model, const Matrix& inputs, const Matrix& labels) {
    if (inputs.empty() || inputs.size() != labels.size()) {
        throw std::invalid_argument("mlp: inputs and labels must be non-empty and aligned");
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].size() != model.in_dim || labels[i].size() != model.out_dim) {
            throw std::invalid_argument("mlp: sample dimension mismatch");
        }
    }
}

// forward pass capturing the hidden pre-activation for backprop
void forward(const MlpRegressor& model, std::span<const double> x, std::vector<double>& hidden,
             std::vector<double>& out) {
    if (model.layout == MlpLayout::linear) {
        out.assign(model.out_dim, 0.0);
        for (std::size_t r = 0; r < model.out_dim; ++r) {
            double z = model.b0[r];
            const double* wrow = &model.w0[r * model.in_dim];
            for (std::size_t k = 0; k < model.in_dim; ++k) z += wrow[k] * x[k];
            out[r] = z;
        }
        return;
    }
    hidden.assign(model.hidden_dim, 0.0);
    for (std::size_t r = 0; r < model.hidden_dim; ++r) {
        double z = model.b0[r];
        const double* wrow = &model.w0[r * model.in_dim];
        for (std::size_t k = 0; k < model.in_dim; ++k) z += wrow[k] * x[k];
        hidden[r] = z;
    }
    out.assign(model.out_dim, 0.0);
    for (std::size_t r = 0; r < model.out_dim; ++r) {
        double z = model.b1[r];
        const double* wrow = &model.w1[r * model.hidden_dim];
        for (std::size_t k = 0; k < model.hidden_dim; ++k) {
            z += wrow[k] * std::max(0.0, hidden[k]);
        }
        out[r] = z;
    }
}

} // namespace

MlpRegressor make_mlp(MlpLayout layout, std::size_t in_dim, std::size_t out_dim,
                      std::size_t hidden_dim, std::uint64_t seed) {
    if (in_dim == 0 || out_dim == 0) throw std::invalid_argument("make_mlp: zero dimension");
    if (layout == MlpLayout::one_hidden_relu && hidden_dim == 0) {
        throw std::invalid_argument("make_mlp: hidden_dim must be positive");
    }
    MlpRegressor model;
    model.layout = layout;
    model.in_dim = in_dim;
    model.out_dim = out_dim;
    model.hidden_dim = (layout == MlpLayout::linear) ? 0 : hidden_dim;

    Rng rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    auto init = [&](std::vector<double>& w, std::size_t n) {
        w.resize(n);
        for (double& x : w) x = rng.next_uniform(-bound, bound);
    };
    if (layout == MlpLayout::linear) {
        init(model.w0, out_dim * in_dim);
        model.b0.assign(out_dim, 0.0);
    } else {
        init(model.w0, hidden_dim * in_dim);
        model.b0.assign(hidden_dim, 0.0);
        init(model.w1, out_dim * hidden_dim);
        model.b1.assign(out_dim, 0.0);
    }
    return model;
}

std::vector<double> predict_mlp(const MlpRegressor& model, std::span<const double> x) {
    if (x.size() != model.in_dim) throw std::invalid_argument("predict_mlp: dimension mismatch");
    std::vector<double> hidden, out;
    forward(model, x, hidden, out);
    return out;
}

double mlp_mse(const MlpRegressor& model, const Matrix& inputs, const Matrix& labels) {
    check_shapes(model, inputs, labels);
    double sum = 0.0;
    std::vector<double> hidden, out;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        forward(model, inputs[i], hidden, out);
        for (std::size_t r = 0; r < model.out_dim; ++r) {
            const double e = out[r] - labels[i][r];
            sum += e * e;
        }
    }
    return sum / (static_cast<double>(inputs.size()) * static_cast<double>(model.out_dim));
}

std::vector<double> mlp_parameters(const MlpRegressor& model) {
    std::vector<double> p;
    p.reserve(model.w0.size() + model.b0.size() + model.w1.size() + model.b1.size());
    p.insert(p.end(), model.w0.begin(), model.w0.end());
    p.insert(p.end(), model.b0.begin(), model.b0.end());
    p.insert(p.end(), model.w1.begin(), model.w1.end());
    p.insert(p.end(), model.b1.begin(), model.b1.end());
    return p;
}

void set_mlp_parameters(MlpRegressor& model, std::span<const double> params) {
    const std::size_t total =
        model.w0.size() + model.b0.size() + model.w1.size() + model.b1.size();
    if (params.size() != total) throw std::invalid_argument("set_mlp_parameters: size mismatch");
    std::size_t off = 0;
    auto take = [&](std::vector<double>& dst) {
        std::copy(params.begin() + static_cast<std::ptrdiff_t>(off),
                  params.begin() + static_cast<std::ptrdiff_t>(off + dst.size()), dst.begin());
        off += dst.size();
    };
    take(model.w0);
    take(model.b0);
    take(model.w1);
    take(model.b1);
}

std::vector<double> mlp_gradient(const MlpRegressor& model, const Matrix& inputs,
                                 const Matrix& labels) {
    check_shapes(model, inputs, labels);
    std::vector<double> gw0(model.w0.size(), 0.0), gb0(model.b0.size(), 0.0);
    std::vector<double> gw1(model.w1.size(), 0.0), gb1(model.b1.size(), 0.0);
    const double scale =
        2.0 / (static_cast<double>(inputs.size()) * static_cast<double>(model.out_dim));

    std::vector<double> hidden, out;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& x = inputs[i];
        forward(model, x, hidden, out);
        if (model.layout == MlpLayout::linear) {
            for (std::size_t r = 0; r < model.out_dim; ++r) {
                const double delta = scale * (out[r] - labels[i][r]);
                gb0[r] += delta;
                double* grow = &gw0[r * model.in_dim];
                for (std::size_t k = 0; k < model.in_dim; ++k) grow[k] += delta * x[k];
            }
        } else {
            std::vector<double> dh(model.hidden_dim, 0.0);
            for (std::size_t r = 0; r < model.out_dim; ++r) {
                const double delta = scale * (out[r] - labels[i][r]);
                gb1[r] += delta;
                double* grow = &gw1[r * model.hidden_dim];
                const double* wrow = &model.w1[r * model.hidden_dim];
                for (std::size_t k = 0; k < model.hidden_dim; ++k) {
                    grow[k] += delta * std::max(0.0, hidden[k]);
                    dh[k] += delta * wrow[k];
                }
            }
            for (std::size_t r = 0; r < model.hidden_dim; ++r) {
                if (hidden[r] <= 0.0) continue;
                gb0[r] += dh[r];
                double* grow = &gw0[r * model.in_dim];
                for (std::size_t k = 0; k < model.in_dim; ++k) grow[k] += dh[r] * x[k];
            }
        }
    }

    std::vector<double> g;
    g.reserve(gw0.size() + gb0.size() + gw1.size() + gb1.size());
    g.insert(g.end(), gw0.begin(), gw0.end());
    g.insert(g.end(), gb0.begin(), gb0.end());
    g.insert(g.end(), gw1.begin(), gw1.end());
    g.insert(g.end(), gb1.begin(), gb1.end());
    return g;
}

MlpRegressor train_mlp(const Matrix& inputs, const Matrix& labels, MlpLayout layout,
                       std::size_t hidden_dim, double lr, int epochs, std::uint64_t seed) {
    if (inputs.empty() || labels.empty()) throw std::invalid_argument("train_mlp: no samples");
    if (lr <= 0.0 || epochs <= 0) throw std::invalid_argument("train_mlp: invalid config");
    MlpRegressor model =
        make_mlp(layout, inputs.front().size(), labels.front().size(), hidden_dim, seed);
    check_shapes(model, inputs, labels);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        const std::vector<double> g = mlp_gradient(model, inputs, labels);
        std::vector<double> p = mlp_parameters(model);
        for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr * g[k];
        set_mlp_parameters(model, p);
    }
    const double final_mse = mlp_mse(model, inputs, labels);
    if (!std::isfinite(final_mse)) {
        throw NumericError("train_mlp: training diverged; try a smaller learning rate");
    }
    return model;
}

} // namespace relhyper

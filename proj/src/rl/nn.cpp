// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/nn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace qtopo::nn {

Mlp::Mlp(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("network needs input and output sizes");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        if (sizes_[l] == 0 || sizes_[l + 1] == 0) throw std::invalid_argument("layer width must be positive");
        offsets_.push_back(total);
        total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    }
    offsets_.push_back(total);
    params_.assign(total, 0.0);
}

std::pair<std::size_t, std::size_t> Mlp::layer_range(std::size_t l) const {
    return {offsets_.at(l), offsets_.at(l + 1)};
}

void Mlp::init_orthogonal(std::uint64_t seed, double hidden_gain, double output_gain) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const std::size_t rows = sizes_[l + 1];
        const std::size_t cols = sizes_[l];
        const double gain = l + 1 == layer_count() ? output_gain : hidden_gain;
        // Orthonormalise along the longer dimension with modified Gram-Schmidt.
        const bool tall = rows >= cols;
        const std::size_t vecs = tall ? cols : rows;
        const std::size_t len = tall ? rows : cols;
        std::vector<std::vector<double>> basis;
        basis.reserve(vecs);
        while (basis.size() < vecs) {
            std::vector<double> v(len);
            for (double& x : v) x = normal(rng);
            for (const auto& b : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < len; ++i) dot += v[i] * b[i];
                for (std::size_t i = 0; i < len; ++i) v[i] -= dot * b[i];
            }
            double norm = 0.0;
            for (double x : v) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < 1e-8) continue;
            for (double& x : v) x /= norm;
            basis.push_back(std::move(v));
        }
        double* w = params_.data() + offsets_[l];
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                w[r * cols + c] = gain * (tall ? basis[c][r] : basis[r][c]);
            }
        }
        for (std::size_t r = 0; r < rows; ++r) w[rows * cols + r] = 0.0;
    }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
    Tape tape;
    return forward(x, tape);
}

std::vector<double> Mlp::forward(std::span<const double> x, Tape& tape) const {
    if (x.size() != input_size()) throw std::invalid_argument("network input has wrong size");
    tape.act.resize(sizes_.size());
    tape.act[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const std::size_t rows = sizes_[l + 1];
        const std::size_t cols = sizes_[l];
        const double* w = params_.data() + offsets_[l];
        const double* b = w + rows * cols;
        const std::vector<double>& in = tape.act[l];
        std::vector<double>& out = tape.act[l + 1];
        out.assign(rows, 0.0);
        const bool hidden = l + 1 < layer_count();
        for (std::size_t r = 0; r < rows; ++r) {
            double s = b[r];
            const double* wr = w + r * cols;
            for (std::size_t c = 0; c < cols; ++c) s += wr[c] * in[c];
            out[r] = hidden ? std::tanh(s) : s;
        }
    }
    return tape.act.back();
}

void Mlp::backward(const Tape& tape, std::span<const double> grad_out, std::span<double> grad) const {
    if (grad.size() != params_.size()) throw std::invalid_argument("gradient buffer has wrong size");
    std::vector<double> delta(grad_out.begin(), grad_out.end());
    for (std::size_t l = layer_count(); l-- > 0;) {
        const std::size_t rows = sizes_[l + 1];
        const std::size_t cols = sizes_[l];
        const double* w = params_.data() + offsets_[l];
        double* gw = grad.data() + offsets_[l];
        double* gb = gw + rows * cols;
        const std::vector<double>& in = tape.act[l];
        // delta is d(loss)/d(pre-activation) of layer l.
        for (std::size_t r = 0; r < rows; ++r) {
            gb[r] += delta[r];
            double* gwr = gw + r * cols;
            for (std::size_t c = 0; c < cols; ++c) gwr[c] += delta[r] * in[c];
        }
        if (l == 0) break;
        std::vector<double> prev(cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* wr = w + r * cols;
            for (std::size_t c = 0; c < cols; ++c) prev[c] += wr[c] * delta[r];
        }
        for (std::size_t c = 0; c < cols; ++c) prev[c] *= 1.0 - in[c] * in[c];  // tanh'
        delta = std::move(prev);
    }
}

bool Mlp::all_finite() const {
    for (double p : params_) {
        if (!std::isfinite(p)) return false;
    }
    return true;
}

void Sgd::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != grad.size()) throw std::invalid_argument("parameter/gradient size mismatch");
    if (momentum_ == 0.0) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
        return;
    }
    velocity_.resize(params.size(), 0.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity_[i] = momentum_ * velocity_[i] + grad[i];
        params[i] -= lr_ * velocity_[i];
    }
}

}  // namespace qtopo::nn

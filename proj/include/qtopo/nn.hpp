// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file nn.hpp
 * @brief Small dense tanh networks with hand-written backpropagation.
 *
 * Parameters live in one flat buffer (per layer: weights row-major
 * [out][in], then biases) so the optimizer and the finite-difference
 * checks can treat a network as a plain vector.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qtopo::nn {

class Mlp {
public:
    Mlp() = default;
    /// sizes = {inputs, hidden..., outputs}; hidden layers use tanh, the
    /// output layer is linear.
    explicit Mlp(std::vector<std::size_t> sizes);

    /// Orthogonal initialisation: hidden layers with gain `hidden_gain`,
    /// the output layer with `output_gain`; biases zero.
    void init_orthogonal(std::uint64_t seed, double hidden_gain, double output_gain);

    const std::vector<std::size_t>& sizes() const { return sizes_; }
    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    std::size_t layer_count() const { return sizes_.size() - 1; }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    /// [begin, end) of layer l inside params().
    std::pair<std::size_t, std::size_t> layer_range(std::size_t l) const;

    /// Activations of one forward pass, kept for backward().
    struct Tape {
        std::vector<std::vector<double>> act;  // act[0] = input, act[L] = output
    };

    std::vector<double> forward(std::span<const double> x) const;
    std::vector<double> forward(std::span<const double> x, Tape& tape) const;

    /// Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
    void backward(const Tape& tape, std::span<const double> grad_out, std::span<double> grad) const;

    bool all_finite() const;

    friend bool operator==(const Mlp&, const Mlp&) = default;

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

/// Plain stochastic gradient descent with optional momentum.
class Sgd {
public:
    explicit Sgd(double lr = 5e-5, double momentum = 0.0) : lr_(lr), momentum_(momentum) {}

    void step(std::span<double> params, std::span<const double> grad);

    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }

private:
    double lr_;
    double momentum_;
    std::vector<double> velocity_;
};

}  // namespace qtopo::nn

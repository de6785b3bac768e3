#pragma once

// Backward Euler convolution quadrature: weights of the generating symbol
// (1 - xi)^gamma and the discrete fractional operator built from them.

#include <cstddef>
#include <span>
#include <vector>

namespace subdiff {

/// Order gamma of the symbol (1 - xi)^gamma. Weight generation accepts
/// 0 < gamma < 2; the Caputo order of the model lies in (0, 1).
class FracOrder {
public:
    explicit FracOrder(double gamma);

    double value() const noexcept { return gamma_; }
    bool is_model_order() const noexcept { return gamma_ > 0.0 && gamma_ < 1.0; }

    /// Throws DomainError unless 0 < gamma < 1.
    static FracOrder model(double alpha);

private:
    double gamma_;
};

/// Uniform grid t_n = n * tau on [0, T] with N steps.
class TimeGrid {
public:
    TimeGrid(double final_time, std::size_t steps);

    double final_time() const noexcept { return final_time_; }
    std::size_t steps() const noexcept { return steps_; }
    double tau() const noexcept { return final_time_ / static_cast<double>(steps_); }
    double t(std::size_t n) const noexcept;

private:
    double final_time_;
    std::size_t steps_;
};

/// b_0 .. b_{n_max}, the power-series coefficients of (1 - xi)^gamma.
class WeightTable {
public:
    WeightTable(FracOrder gamma, std::vector<double> weights);

    FracOrder order() const noexcept { return gamma_; }
    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t horizon() const noexcept { return weights_.size() - 1; }
    double operator[](std::size_t j) const { return weights_[j]; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// s_n = b_0 + ... + b_n.
    double partial_sum(std::size_t n) const;

private:
    FracOrder gamma_;
    std::vector<double> weights_;
};

/// Multiplicative recurrence b_0 = 1, b_j = b_{j-1} (j - 1 - gamma) / j.
/// Throws DomainError for gamma outside (0, 2) and ConfigError when the
/// table would not be addressable.
WeightTable gen_weights(FracOrder gamma, std::size_t n_max);

/// Bound e^{2 gamma} (j + 1)^{-gamma - 1} on |b_j| (valid for 0 < gamma < 1).
double weight_bound(double gamma, std::size_t j);

/// Cauchy product of two weight sequences truncated to `count` terms.
std::vector<double> convolve_weights(std::span<const double> a, std::span<const double> b,
                                     std::size_t count);

using VectorSequence = std::vector<std::vector<double>>;

/// (d_tau^gamma phi)^n = tau^{-gamma} sum_{j<=n} b_j phi^{n-j} for every n of
/// the input sequence. Throws ShapeError on ragged input or a short table.
VectorSequence frac_apply(const WeightTable& table, double tau, const VectorSequence& seq);

/// Riemann-Liouville integral of order alpha of t^beta:
/// Gamma(beta + 1) / Gamma(beta + 1 + alpha) * t^{beta + alpha}.
double rl_integral_oracle(double alpha, double beta, double t);

}  // namespace subdiff

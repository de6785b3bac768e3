#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subdiff/cq.hpp"

namespace subdiff {

/// Owns the solution history U^0, U^1, ... of a time-stepping run and
/// evaluates the lagged sums
///
///     H^n = sum_{k=0}^{n-1} b_{n-k} U^k        (n = number of stored states)
///
/// that the backward Euler CQ scheme needs at every step. The cost stays
/// O(n) per step; the sums over older states are formed for `block` future
/// steps at once so each stored vector is streamed once per block rather than
/// once per step.
class HistoryConvolution {
public:
    HistoryConvolution(const WeightTable& weights, std::size_t dim, std::size_t block = 16);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return states_.size(); }

    void push(std::vector<double> state);
    const std::vector<double>& state(std::size_t k) const { return states_.at(k); }

    /// Writes H^n for n = size(). Requires 1 <= size() <= table horizon.
    void lagged_sum(std::span<double> out);

    /// Moves the stored history out; the object is empty afterwards.
    std::vector<std::vector<double>> release();

private:
    void refill_block();

    const WeightTable& weights_;
    std::size_t dim_;
    std::size_t block_;
    std::vector<std::vector<double>> states_;
    // acc_[i] = sum_{k < block_start_} b_{block_start_ + i - k} U^k
    std::vector<std::vector<double>> acc_;
    std::size_t block_start_ = 0;
    bool block_valid_ = false;
};

}  // namespace subdiff

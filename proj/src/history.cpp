#include "subdiff/history.hpp"

#include <algorithm>
#include <utility>

#include "subdiff/errors.hpp"
#include "subdiff/kernels.hpp"

namespace subdiff {

HistoryConvolution::HistoryConvolution(const WeightTable& weights, std::size_t dim,
                                       std::size_t block)
    : weights_(weights), dim_(dim), block_(std::max<std::size_t>(block, 1)) {
    acc_.assign(block_, std::vector<double>(dim_, 0.0));
}

void HistoryConvolution::push(std::vector<double> state) {
    if (state.size() != dim_) throw ShapeError("history state has wrong dimension");
    states_.push_back(std::move(state));
}

void HistoryConvolution::refill_block() {
    const std::size_t n0 = block_start_;
    const std::size_t horizon = weights_.horizon();
    const std::size_t nout = std::min(block_, horizon + 1 - n0);
    for (auto& a : acc_) std::fill(a.begin(), a.end(), 0.0);
    if (n0 > 0) {
        std::vector<const double*> hist(n0);
        for (std::size_t k = 0; k < n0; ++k) hist[k] = states_[k].data();
        std::vector<double*> out(nout);
        for (std::size_t i = 0; i < nout; ++i) out[i] = acc_[i].data();
        kernels::active().conv_block(hist.data(), n0, weights_.weights().data(), 1, out.data(),
                                     nout, dim_);
    }
    block_valid_ = true;
}

void HistoryConvolution::lagged_sum(std::span<double> out) {
    const std::size_t n = states_.size();
    if (n == 0) throw StateError("lagged sum needs U^0");
    if (n > weights_.horizon()) throw ShapeError("weight table horizon exceeded");
    if (out.size() != dim_) throw ShapeError("output has wrong dimension");

    const std::size_t n0 = (n / block_) * block_;
    if (!block_valid_ || n0 != block_start_) {
        block_start_ = n0;
        refill_block();
    }
    const auto& far = acc_[n - n0];
    std::copy(far.begin(), far.end(), out.begin());
    if (n > n0) {
        std::vector<const double*> hist(n - n0);
        for (std::size_t k = n0; k < n; ++k) hist[k - n0] = states_[k].data();
        double* o = out.data();
        kernels::active().conv_block(hist.data(), n - n0, weights_.weights().data(), 1, &o, 1,
                                     dim_);
    }
}

std::vector<std::vector<double>> HistoryConvolution::release() {
    block_valid_ = false;
    return std::exchange(states_, {});
}

}  // namespace subdiff

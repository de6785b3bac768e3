#include "subdiff/cq.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {

FracOrder::FracOrder(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma < 2.0)) {
        std::ostringstream msg;
        msg << "fractional order " << gamma << " outside (0, 2)";
        throw DomainError(msg.str());
    }
}

FracOrder FracOrder::model(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream msg;
        msg << "model order alpha=" << alpha << " outside (0, 1)";
        throw DomainError(msg.str());
    }
    return FracOrder(alpha);
}

TimeGrid::TimeGrid(double final_time, std::size_t steps) : final_time_(final_time), steps_(steps) {
    if (steps == 0) throw ConfigError("time grid needs at least one step");
    if (!(final_time > 0.0) || !std::isfinite(final_time))
        throw ConfigError("final time must be positive and finite");
}

double TimeGrid::t(std::size_t n) const noexcept {
    // exact at n = N
    if (n == steps_) return final_time_;
    return static_cast<double>(n) * tau();
}

WeightTable::WeightTable(FracOrder gamma, std::vector<double> weights)
    : gamma_(gamma), weights_(std::move(weights)) {
    if (weights_.empty()) throw ShapeError("weight table must hold b_0");
}

double WeightTable::partial_sum(std::size_t n) const {
    if (n >= weights_.size()) throw ShapeError("partial sum beyond table horizon");
    double s = 0.0;
    for (std::size_t j = 0; j <= n; ++j) s += weights_[j];
    return s;
}

WeightTable gen_weights(FracOrder gamma, std::size_t n_max) {
    if (n_max >= std::numeric_limits<std::size_t>::max() / sizeof(double) - 1)
        throw ConfigError("weight table horizon too large");
    const double g = gamma.value();
    std::vector<double> b(n_max + 1);
    b[0] = 1.0;
    for (std::size_t j = 1; j <= n_max; ++j) {
        const double jd = static_cast<double>(j);
        b[j] = b[j - 1] * (jd - 1.0 - g) / jd;
    }
    return WeightTable(gamma, std::move(b));
}

double weight_bound(double gamma, std::size_t j) {
    return std::exp(2.0 * gamma) * std::pow(static_cast<double>(j) + 1.0, -gamma - 1.0);
}

std::vector<double> convolve_weights(std::span<const double> a, std::span<const double> b,
                                     std::size_t count) {
    if (a.size() < count || b.size() < count) throw ShapeError("weight sequences too short");
    std::vector<double> c(count, 0.0);
    for (std::size_t n = 0; n < count; ++n) {
        double s = 0.0;
        for (std::size_t j = 0; j <= n; ++j) s += a[j] * b[n - j];
        c[n] = s;
    }
    return c;
}

VectorSequence frac_apply(const WeightTable& table, double tau, const VectorSequence& seq) {
    if (seq.empty()) return {};
    if (table.size() < seq.size()) throw ShapeError("weight table shorter than sequence");
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    const std::size_t dim = seq.front().size();
    for (const auto& v : seq)
        if (v.size() != dim) throw ShapeError("sequence vectors differ in dimension");

    const double scale = std::pow(tau, -table.order().value());
    VectorSequence out(seq.size(), std::vector<double>(dim, 0.0));
    for (std::size_t n = 0; n < seq.size(); ++n) {
        auto& o = out[n];
        for (std::size_t j = 0; j <= n; ++j) {
            const double b = table[j];
            const auto& phi = seq[n - j];
            for (std::size_t d = 0; d < dim; ++d) o[d] += b * phi[d];
        }
        for (double& x : o) x *= scale;
    }
    return out;
}

double rl_integral_oracle(double alpha, double beta, double t) {
    if (t < 0.0) throw DomainError("rl_integral_oracle: negative time");
    if (beta < 0.0) throw DomainError("rl_integral_oracle: negative exponent");
    if (!(alpha > 0.0)) throw DomainError("rl_integral_oracle: order must be positive");
    if (t == 0.0) return 0.0;
    return std::tgamma(beta + 1.0) / std::tgamma(beta + 1.0 + alpha) * std::pow(t, beta + alpha);
}

}  // namespace subdiff

#include "subdiff/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/kernels.hpp"

namespace subdiff {

Smoother Smoother::jacobi(double omega) {
    if (!(omega > 0.0 && omega <= 1.0)) throw ConfigError("Jacobi damping must lie in (0, 1]");
    return Smoother{Kind::DampedJacobi, omega};
}

Smoother Smoother::gauss_seidel() { return Smoother{Kind::GaussSeidelForward, 1.0}; }

std::string Smoother::name() const { return kind == Kind::DampedJacobi ? "jacobi" : "gs"; }

LevelSystem::LevelSystem(CsrMatrix b) : matrix(std::move(b)) {
    inv_diag = matrix.diagonal();
    for (double& d : inv_diag) {
        if (!(d > 0.0)) throw NumericError("level matrix has a non-positive diagonal entry");
        d = 1.0 / d;
    }
}

void smooth(const LevelSystem& level, std::span<double> x, std::span<const double> rhs,
            const Smoother& smoother, int sweeps) {
    const std::size_t n = level.size();
    if (x.size() != n || rhs.size() != n) throw ShapeError("smooth: dimension mismatch");
    const auto ptr = level.matrix.row_ptr();
    const auto idx = level.matrix.col_idx();
    const auto val = level.matrix.values();
    if (smoother.kind == Smoother::Kind::DampedJacobi) {
        std::vector<double> bx(n);
        for (int s = 0; s < sweeps; ++s) {
            level.matrix.apply(x, bx);
            kernels::active().jacobi_update(smoother.omega, level.inv_diag.data(), rhs.data(),
                                            bx.data(), x.data(), n);
        }
        return;
    }
    for (int s = 0; s < sweeps; ++s)
        for (std::size_t i = 0; i < n; ++i) {
            double r = rhs[i];
            for (std::size_t p = ptr[i]; p < ptr[i + 1]; ++p)
                if (idx[p] != i) r -= val[p] * x[idx[p]];
            x[i] = r * level.inv_diag[i];
        }
}

CsrMatrix prolongation(std::size_t fine_K) {
    const Mesh2D fine(fine_K);
    const Mesh2D coarse(fine_K / 2);
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    std::vector<double> val;
    const auto add = [&](std::size_t ci, std::size_t cj, double w,
                         std::vector<std::pair<std::size_t, double>>& row) {
        if (coarse.is_interior(ci, cj)) row.emplace_back(coarse.index(ci, cj), w);
    };
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t J = 1; J < fine_K; ++J)
        for (std::size_t I = 1; I < fine_K; ++I) {
            row.clear();
            const std::size_t i0 = I / 2, j0 = J / 2;
            const bool odd_i = I % 2 == 1, odd_j = J % 2 == 1;
            if (!odd_i && !odd_j) {
                add(i0, j0, 1.0, row);
            } else if (odd_i && !odd_j) {
                add(i0, j0, 0.5, row);
                add(i0 + 1, j0, 0.5, row);
            } else if (!odd_i && odd_j) {
                add(i0, j0, 0.5, row);
                add(i0, j0 + 1, 0.5, row);
            } else {
                // midpoint of the coarse (1,1) diagonal
                add(i0, j0, 0.5, row);
                add(i0 + 1, j0 + 1, 0.5, row);
            }
            std::sort(row.begin(), row.end());
            for (const auto& [c, w] : row) {
                idx.push_back(c);
                val.push_back(w);
            }
            ptr.push_back(idx.size());
        }
    return CsrMatrix(fine.num_interior(), coarse.num_interior(), std::move(ptr), std::move(idx),
                     std::move(val));
}

MgHierarchy::MgHierarchy(const FemSystem& fine, double tau, double alpha, MgOptions options)
    : tau_(tau), alpha_(alpha), tau_alpha_(std::pow(tau, alpha)), options_(options) {
    const std::size_t K = fine.mesh.K();
    const std::size_t K0 = options_.coarse_K;
    if (K0 < 2 || K0 % 2 != 0) throw ConfigError("coarsest K must be even and >= 2");
    if (options_.nu1 < 0 || options_.nu2 < 0 || options_.nu1 + options_.nu2 < 1)
        throw ConfigError("need at least one smoothing sweep per V-cycle");
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    std::size_t k = K0;
    ks_.push_back(K0);
    while (k < K) {
        k *= 2;
        ks_.push_back(k);
    }
    if (k != K || ks_.size() < 2) {
        std::ostringstream msg;
        msg << "K=" << K << " is not K0*2^L with K0=" << K0 << " and L >= 1";
        throw ConfigError(msg.str());
    }

    for (std::size_t l = 0; l < ks_.size(); ++l) {
        if (l + 1 == ks_.size()) {
            levels_.emplace_back(fine.mass.add_scaled(tau_alpha_, fine.stiffness));
        } else {
            const FemSystem sys = assemble(build_mesh(ks_[l]), fine.diffusivity);
            levels_.emplace_back(sys.mass.add_scaled(tau_alpha_, sys.stiffness));
        }
    }
    for (std::size_t l = 0; l + 1 < ks_.size(); ++l) {
        prolong_.push_back(subdiff::prolongation(ks_[l + 1]));
        restrict_.push_back(prolong_.back().transpose());
    }
    for (std::size_t l = 0; l + 1 < ks_.size(); ++l) {
        const double dev = galerkin_deviation(l);
        if (!(dev <= 1e-12)) {
            std::ostringstream msg;
            msg << "coarse operator at K=" << ks_[l] << " deviates from the Galerkin product by " << dev;
            throw NumericError(msg.str());
        }
    }
    coarse_.emplace(levels_.front().matrix);
}

double MgHierarchy::galerkin_deviation(std::size_t l) const {
    const CsrMatrix& p = prolong_.at(l);
    const CsrMatrix galerkin = restrict_.at(l).multiply(levels_.at(l + 1).matrix.multiply(p));
    const CsrMatrix& b = levels_.at(l).matrix;
    double scale = 0.0;
    for (double v : b.values()) scale = std::max(scale, std::abs(v));
    double dev = 0.0;
    const auto gp = galerkin.row_ptr();
    const auto gi = galerkin.col_idx();
    const auto gv = galerkin.values();
    for (std::size_t i = 0; i < galerkin.rows(); ++i)
        for (std::size_t q = gp[i]; q < gp[i + 1]; ++q)
            dev = std::max(dev, std::abs(gv[q] - b.at(i, gi[q])));
    // entries of b missing from the product pattern
    const auto bp = b.row_ptr();
    const auto bi = b.col_idx();
    const auto bv = b.values();
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t q = bp[i]; q < bp[i + 1]; ++q)
            dev = std::max(dev, std::abs(bv[q] - galerkin.at(i, bi[q])));
    return dev / scale;
}

void MgHierarchy::cycle(std::size_t l, std::span<double> x, std::span<const double> rhs) const {
    const LevelSystem& lev = levels_[l];
    if (l == 0) {
        coarse_->solve(rhs, x);
        return;
    }
    smooth(lev, x, rhs, options_.smoother, options_.nu1);
    std::vector<double> r = lev.matrix.apply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    const std::vector<double> rc = restrict_[l - 1].apply(r);
    std::vector<double> ec(rc.size(), 0.0);
    cycle(l - 1, ec, rc);
    const std::vector<double> e = prolong_[l - 1].apply(ec);
    kernels::axpy(1.0, e, x);
    smooth(lev, x, rhs, options_.smoother, options_.nu2);
}

void MgHierarchy::vcycle_inplace(std::span<double> x, std::span<const double> rhs) const {
    if (x.size() != size() || rhs.size() != size()) throw ShapeError("vcycle: dimension mismatch");
    cycle(levels_.size() - 1, x, rhs);
}

std::vector<double> MgHierarchy::vcycle(std::span<const double> x0, std::span<const double> rhs) const {
    std::vector<double> x(x0.begin(), x0.end());
    vcycle_inplace(x, rhs);
    return x;
}

double MgHierarchy::weighted_norm(std::span<const double> x) const {
    return std::sqrt(std::max(0.0, energy(fine().matrix, x)));
}

ContractionParams estimate_contraction(
    const std::function<void(std::span<double>)>& step,
    const std::function<double(std::span<const double>)>& norm, std::size_t dim,
    std::size_t trials, std::size_t cycles, std::uint64_t seed) {
    if (trials < 1 || cycles < 2) throw ConfigError("contraction estimate needs trials >= 1, cycles >= 2");
    constexpr double kFloor = 1e-12;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    std::vector<std::vector<double>> ratios(trials);  // r_m, m = 1..cycles
    double kappa = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<double> x(dim);
        for (double& v : x) v = unif(rng);
        const double n0 = norm(x);
        double prev = n0;
        for (std::size_t m = 1; m <= cycles; ++m) {
            step(x);
            const double nm = norm(x);
            ratios[t].push_back(nm / n0);
            if (m >= 2) kappa = std::max(kappa, prev > 0.0 ? nm / prev : 0.0);
            prev = nm;
        }
    }
    if (!(kappa < 1.0)) {
        std::ostringstream msg;
        msg << "iteration does not contract: measured kappa=" << kappa;
        throw NumericError(msg.str());
    }
    kappa = std::max(kappa, kFloor);
    double c0 = 1.0;
    for (const auto& r : ratios)
        for (std::size_t m = 1; m <= r.size(); ++m)
            c0 = std::max(c0, r[m - 1] / std::pow(kappa, static_cast<double>(m)));
    return ContractionParams{c0, kappa};
}

ContractionParams estimate_contraction(const MgHierarchy& h, std::size_t trials, std::size_t cycles,
                                       std::uint64_t seed) {
    const std::vector<double> zero(h.size(), 0.0);
    return estimate_contraction([&](std::span<double> x) { h.vcycle_inplace(x, zero); },
                                [&](std::span<const double> x) { return h.weighted_norm(x); },
                                h.size(), trials, cycles, seed);
}

}  // namespace subdiff

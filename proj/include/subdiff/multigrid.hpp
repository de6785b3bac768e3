#pragma once

// Geometric V-cycle multigrid for the per-step operator B = M + tau^alpha S
// on nested uniform meshes K_l = K0 * 2^l.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subdiff/fem.hpp"
#include "subdiff/sparse.hpp"

namespace subdiff {

struct Smoother {
    enum class Kind { DampedJacobi, GaussSeidelForward };

    Kind kind = Kind::GaussSeidelForward;
    double omega = 1.0;  // Jacobi damping, (0, 1]

    static Smoother jacobi(double omega = 2.0 / 3.0);
    static Smoother gauss_seidel();

    std::string name() const;
};

/// Matrix of one level together with the data its smoothers need.
struct LevelSystem {
    CsrMatrix matrix;
    std::vector<double> inv_diag;

    explicit LevelSystem(CsrMatrix b);
    std::size_t size() const noexcept { return matrix.rows(); }
};

/// `sweeps` smoothing sweeps on B x = rhs, in place.
void smooth(const LevelSystem& level, std::span<double> x, std::span<const double> rhs,
            const Smoother& smoother, int sweeps);

/// Prolongation from the interior nodes of a K/2 mesh to those of a K mesh
/// (linear interpolation along the coarse edges).
CsrMatrix prolongation(std::size_t fine_K);

struct MgOptions {
    Smoother smoother = Smoother::gauss_seidel();
    int nu1 = 1;
    int nu2 = 1;
    std::size_t coarse_K = 4;
};

class MgHierarchy {
public:
    /// Throws ConfigError unless fine K = coarse_K * 2^L with L >= 1 and
    /// coarse_K even; NumericError if the rediscretized coarse operators
    /// fail the Galerkin identity.
    MgHierarchy(const FemSystem& fine, double tau, double alpha, MgOptions options);

    std::size_t num_levels() const noexcept { return levels_.size(); }
    std::size_t level_K(std::size_t l) const noexcept { return ks_[l]; }
    const LevelSystem& level(std::size_t l) const { return levels_.at(l); }
    /// Prolongation from level l to level l + 1.
    const CsrMatrix& prolongation(std::size_t l) const { return prolong_.at(l); }
    const LevelSystem& fine() const { return levels_.back(); }
    std::size_t size() const noexcept { return fine().size(); }

    double tau() const noexcept { return tau_; }
    double alpha() const noexcept { return alpha_; }
    double tau_alpha() const noexcept { return tau_alpha_; }
    const MgOptions& options() const noexcept { return options_; }

    /// Max-norm of P_l^T B_{l+1} P_l - B_l relative to max |B_l|.
    double galerkin_deviation(std::size_t l) const;

    /// One V(nu1, nu2) cycle on B x = rhs starting from x0.
    std::vector<double> vcycle(std::span<const double> x0, std::span<const double> rhs) const;
    void vcycle_inplace(std::span<double> x, std::span<const double> rhs) const;

    /// sqrt(x^T B x) on the fine level.
    double weighted_norm(std::span<const double> x) const;

private:
    void cycle(std::size_t l, std::span<double> x, std::span<const double> rhs) const;

    double tau_;
    double alpha_;
    double tau_alpha_;
    MgOptions options_;
    std::vector<std::size_t> ks_;
    std::vector<LevelSystem> levels_;
    std::vector<CsrMatrix> prolong_;
    std::vector<CsrMatrix> restrict_;
    std::optional<DirectSolver> coarse_;
};

struct ContractionParams {
    double c0 = 1.0;
    double kappa = 0.0;
};

/// Measures (c0, kappa) of an iteration x -> step(x) for a homogeneous
/// problem (exact solution 0): for random starts, r_m = |x_m| / |x_0|;
/// kappa is the largest per-cycle ratio |x_m| / |x_{m-1}| over m >= 2, and
/// c0 = max r_m / kappa^m, at least 1. kappa is floored at 1e-12. Throws
/// NumericError when kappa >= 1.
ContractionParams estimate_contraction(
    const std::function<void(std::span<double>)>& step,
    const std::function<double(std::span<const double>)>& norm, std::size_t dim,
    std::size_t trials, std::size_t cycles, std::uint64_t seed);

ContractionParams estimate_contraction(const MgHierarchy& h, std::size_t trials,
                                       std::size_t cycles, std::uint64_t seed);

}  // namespace subdiff

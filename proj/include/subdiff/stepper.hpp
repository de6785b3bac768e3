#pragma once

// Backward Euler convolution quadrature time stepping for
//   d_t^alpha u + A u = f,  u(0) = v
// in nodal form: each step solves (M + tau^alpha S) U^n = r^n. The exact
// variant solves directly; the incomplete iterative scheme (IIS) applies a
// scheduled number of V-cycles from an extrapolated start.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "subdiff/cq.hpp"
#include "subdiff/fem.hpp"
#include "subdiff/multigrid.hpp"
#include "subdiff/schedule.hpp"

namespace subdiff {

struct InitialData {
    enum class Mode { Zero, L2Projection, RitzProjection };

    Mode mode = Mode::Zero;
    ScalarField v;         // L2Projection
    VectorField grad_v;    // RitzProjection

    static InitialData zero() { return {}; }
    static InitialData l2_projection(ScalarField v) { return {Mode::L2Projection, std::move(v), {}}; }
    static InitialData ritz_projection(VectorField grad_v) {
        return {Mode::RitzProjection, {}, std::move(grad_v)};
    }
};

struct Source {
    enum class Kind { Zero, Separable, General };

    Kind kind = Kind::Zero;
    std::function<double(double t)> time;               // Separable: f = time(t) * space(x, y)
    ScalarField space;
    std::function<double(double x, double y, double t)> field;  // General

    static Source zero() { return {}; }
    static Source separable(std::function<double(double)> time, ScalarField space) {
        return {Kind::Separable, std::move(time), std::move(space), {}};
    }
    static Source general(std::function<double(double, double, double)> f) {
        return {Kind::General, {}, {}, std::move(f)};
    }
};

struct ProblemSpec {
    double alpha;
    TimeGrid grid;
    std::shared_ptr<const FemSystem> sys;
    InitialData initial = InitialData::zero();
    Source source = Source::zero();
};

/// Fully discrete problem in nodal coordinates. `load(n, t_n, F)` writes the
/// load vector F^n (unscaled, i.e. (f(t_n), phi_i)).
struct DiscreteProblem {
    double alpha;
    TimeGrid grid;
    CsrMatrix mass;
    CsrMatrix stiffness;
    std::vector<double> initial;
    std::function<void(std::size_t n, double t, std::span<double> load)> load;

    std::size_t size() const noexcept { return mass.rows(); }
    double tau_alpha() const;
};

/// Builds U^0 and the per-step load callback from the continuous data.
DiscreteProblem discretize(const ProblemSpec& spec);

struct StepRecord {
    std::size_t n = 0;
    int iterations = kExactStep;  // V-cycles used, or kExactStep for a direct solve
    double correction = 0.0;      // |U^{n,M} - U^{n,M-1}| in the weighted norm
    double seconds = 0.0;
    bool clamped = false;
    std::vector<double> inner_corrections;  // per V-cycle, when requested

    static constexpr int kExactStep = -1;
    bool exact() const noexcept { return iterations == kExactStep; }
};

struct Trajectory {
    TimeGrid grid{1.0, 1};
    /// All states U^0..U^N, or only {U^0, U^N} when the run was asked to keep
    /// the final state only.
    std::vector<std::vector<double>> states;
    std::vector<StepRecord> records;  // steps 1..N

    bool complete() const noexcept { return states.size() == grid.steps() + 1; }
    const std::vector<double>& initial_state() const { return states.front(); }
    const std::vector<double>& final_state() const { return states.back(); }
    /// U^n; requires a complete trajectory.
    const std::vector<double>& state(std::size_t n) const;
};

struct RunOptions {
    bool keep_all_states = true;
    bool record_inner = false;
    std::size_t history_block = 16;
};

/// r = tau^alpha F^n + M (s_n U^0 - sum_{j=1}^n b_j U^{n-j}), n = history.size().
/// Direct evaluation of the history sum. Throws StateError on empty history.
std::vector<double> step_rhs(const CsrMatrix& mass, double tau_alpha, const WeightTable& weights,
                             std::span<const std::vector<double>> history, std::span<const double> load);

Trajectory run_exact(const DiscreteProblem& problem, const RunOptions& options = {});
Trajectory run_exact(const ProblemSpec& spec, const RunOptions& options = {});

/// Incomplete iterative scheme. The hierarchy must be built for the same
/// operator (tau, alpha, mesh) as the problem.
Trajectory run_iis(const DiscreteProblem& problem, const IterationSchedule& schedule,
                   const MgHierarchy& hierarchy, const RunOptions& options = {});
Trajectory run_iis(const ProblemSpec& spec, const IterationSchedule& schedule,
                   const MgHierarchy& hierarchy, const RunOptions& options = {});

struct ErrorReport {
    double final_error = 0.0;  // e^N
    struct Checkpoint {
        std::size_t n;
        double t;
        double error;
    };
    std::vector<Checkpoint> checkpoints;
};

/// e = ||U - U_ref||_M / ||U_ref||_M at t_N. Throws DataError for a zero reference.
ErrorReport error_report(const Trajectory& traj, std::span<const double> reference_final,
                         const FemSystem& sys);
/// Same, plus errors at every step of `traj` that coincides with a stored
/// step of `reference` (whose grid must refine traj's grid by an integer factor).
ErrorReport error_report(const Trajectory& traj, const Trajectory& reference, const FemSystem& sys);

double relative_l2_error(const CsrMatrix& mass, std::span<const double> u, std::span<const double> ref);

}  // namespace subdiff

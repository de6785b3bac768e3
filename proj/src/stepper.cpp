#include "subdiff/stepper.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/history.hpp"
#include "subdiff/kernels.hpp"

namespace subdiff {

double DiscreteProblem::tau_alpha() const { return std::pow(grid.tau(), alpha); }

DiscreteProblem discretize(const ProblemSpec& spec) {
    if (!spec.sys) throw ConfigError("problem has no finite element system");
    FracOrder::model(spec.alpha);
    const FemSystem& sys = *spec.sys;

    std::vector<double> u0;
    switch (spec.initial.mode) {
        case InitialData::Mode::Zero:
            u0.assign(sys.size(), 0.0);
            break;
        case InitialData::Mode::L2Projection:
            if (!spec.initial.v) throw ConfigError("L2 projection needs initial data v");
            u0 = l2_project(sys, spec.initial.v);
            break;
        case InitialData::Mode::RitzProjection:
            if (!spec.initial.grad_v) throw ConfigError("Ritz projection needs grad v");
            u0 = ritz_project(sys, spec.initial.grad_v);
            break;
    }

    std::function<void(std::size_t, double, std::span<double>)> load;
    switch (spec.source.kind) {
        case Source::Kind::Zero:
            load = [](std::size_t, double, std::span<double> f) { std::fill(f.begin(), f.end(), 0.0); };
            break;
        case Source::Kind::Separable: {
            if (!spec.source.time || !spec.source.space) throw ConfigError("separable source incomplete");
            auto shape = std::make_shared<const std::vector<double>>(load_vector(sys.mesh, spec.source.space));
            auto time = spec.source.time;
            load = [shape, time](std::size_t, double t, std::span<double> f) {
                const double s = time(t);
                for (std::size_t i = 0; i < f.size(); ++i) f[i] = s * (*shape)[i];
            };
            break;
        }
        case Source::Kind::General: {
            if (!spec.source.field) throw ConfigError("source field missing");
            auto field = spec.source.field;
            auto mesh = sys.mesh;
            load = [field, mesh](std::size_t, double t, std::span<double> f) {
                const auto v = load_vector(mesh, [&](double x, double y) { return field(x, y, t); });
                std::copy(v.begin(), v.end(), f.begin());
            };
            break;
        }
    }
    return DiscreteProblem{spec.alpha, spec.grid, sys.mass, sys.stiffness, std::move(u0), std::move(load)};
}

const std::vector<double>& Trajectory::state(std::size_t n) const {
    if (!complete()) throw StateError("trajectory keeps only its final state");
    return states.at(n);
}

std::vector<double> step_rhs(const CsrMatrix& mass, double tau_alpha, const WeightTable& weights,
                             std::span<const std::vector<double>> history, std::span<const double> load) {
    const std::size_t n = history.size();
    if (n == 0) throw StateError("step_rhs needs at least U^0 in the history");
    if (weights.size() < n + 1) throw ShapeError("weight table shorter than the history");
    const std::size_t dim = mass.rows();
    if (load.size() != dim) throw ShapeError("load vector has wrong dimension");
    for (const auto& u : history)
        if (u.size() != dim) throw ShapeError("history state has wrong dimension");

    std::vector<double> w(dim);
    const double sn = weights.partial_sum(n);
    for (std::size_t d = 0; d < dim; ++d) w[d] = sn * history[0][d];
    for (std::size_t j = 1; j <= n; ++j) {
        const double b = weights[j];
        const auto& u = history[n - j];
        for (std::size_t d = 0; d < dim; ++d) w[d] -= b * u[d];
    }
    std::vector<double> r = mass.apply(w);
    for (std::size_t d = 0; d < dim; ++d) r[d] += tau_alpha * load[d];
    return r;
}

namespace {

using Clock = std::chrono::steady_clock;

Trajectory run_core(const DiscreteProblem& problem, const IterationSchedule* schedule,
                    const MgHierarchy* hierarchy, const RunOptions& options) {
    const std::size_t N = problem.grid.steps();
    const std::size_t dim = problem.size();
    if (problem.initial.size() != dim) throw ShapeError("initial state has wrong dimension");
    if (!problem.load) throw ConfigError("problem has no load callback");
    const bool iterative = schedule != nullptr && !schedule->is_exact();
    if (schedule) schedule->validate();
    if (iterative) {
        if (hierarchy == nullptr) throw ConfigError("incomplete iteration needs a multigrid hierarchy");
        if (hierarchy->size() != dim) throw ShapeError("hierarchy and problem differ in size");
        const double tau = problem.grid.tau();
        if (std::abs(hierarchy->tau() - tau) > 1e-14 * tau || hierarchy->alpha() != problem.alpha)
            throw ConfigError("hierarchy was built for a different (tau, alpha)");
    }

    const double tau = problem.grid.tau();
    const double ta = problem.tau_alpha();
    const WeightTable weights = gen_weights(FracOrder::model(problem.alpha), N);
    std::vector<double> partial(N + 1);
    {
        double s = 0.0;
        for (std::size_t n = 0; n <= N; ++n) partial[n] = (s += weights[n]);
    }
    const CsrMatrix b = problem.mass.add_scaled(ta, problem.stiffness);
    const DirectSolver direct(b);

    HistoryConvolution history(weights, dim, options.history_block);
    history.push(problem.initial);

    Trajectory traj;
    traj.grid = problem.grid;
    traj.records.reserve(N);

    std::vector<double> load(dim), lagged(dim), w(dim), rhs(dim), prev(dim), diff(dim);
    const std::vector<double> u0 = problem.initial;
    for (std::size_t n = 1; n <= N; ++n) {
        const auto start = Clock::now();
        const double t = problem.grid.t(n);
        problem.load(n, t, load);
        history.lagged_sum(lagged);
        for (std::size_t d = 0; d < dim; ++d) w[d] = partial[n] * u0[d] - lagged[d];
        problem.mass.apply(w, rhs);
        kernels::axpy(ta, load, rhs);

        StepRecord rec;
        rec.n = n;
        std::vector<double> x(dim);
        if (!iterative || n <= schedule->exact_startup_steps) {
            direct.solve(rhs, x);
        } else {
            const auto& u1 = history.state(n - 1);
            const auto& u2 = history.state(n - 2);
            for (std::size_t d = 0; d < dim; ++d) x[d] = 2.0 * u1[d] - u2[d];
            const ScheduledCount count = schedule_iters(*schedule, n, t, tau, problem.alpha);
            rec.iterations = count.iterations;
            rec.clamped = count.clamped;
            double first = 0.0;
            for (int m = 1; m <= count.iterations; ++m) {
                prev = x;
                hierarchy->vcycle_inplace(x, rhs);
                for (std::size_t d = 0; d < dim; ++d) diff[d] = x[d] - prev[d];
                const double corr = hierarchy->weighted_norm(diff);
                if (options.record_inner) rec.inner_corrections.push_back(corr);
                if (m == 1) first = corr;
                if (m > 1 && corr > 10.0 * first) {
                    std::ostringstream msg;
                    msg << "V-cycle diverges at step " << n << ": correction grew from " << first << " to "
                        << corr;
                    throw NumericError(msg.str());
                }
                rec.correction = corr;
            }
        }
        if (!std::isfinite(kernels::dot(x, x))) throw NumericError("non-finite state in time stepping");
        history.push(std::move(x));
        rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        traj.records.push_back(std::move(rec));
    }

    traj.states = history.release();
    if (!options.keep_all_states && traj.states.size() > 2) {
        std::vector<std::vector<double>> ends;
        ends.push_back(std::move(traj.states.front()));
        ends.push_back(std::move(traj.states.back()));
        traj.states = std::move(ends);
    }
    return traj;
}

}  // namespace

Trajectory run_exact(const DiscreteProblem& problem, const RunOptions& options) {
    return run_core(problem, nullptr, nullptr, options);
}

Trajectory run_exact(const ProblemSpec& spec, const RunOptions& options) {
    return run_exact(discretize(spec), options);
}

Trajectory run_iis(const DiscreteProblem& problem, const IterationSchedule& schedule,
                   const MgHierarchy& hierarchy, const RunOptions& options) {
    return run_core(problem, &schedule, &hierarchy, options);
}

Trajectory run_iis(const ProblemSpec& spec, const IterationSchedule& schedule, const MgHierarchy& hierarchy,
                   const RunOptions& options) {
    return run_iis(discretize(spec), schedule, hierarchy, options);
}

double relative_l2_error(const CsrMatrix& mass, std::span<const double> u, std::span<const double> ref) {
    if (u.size() != ref.size() || u.size() != mass.rows()) throw ShapeError("error: dimension mismatch");
    const double ref_norm = std::sqrt(std::max(0.0, energy(mass, ref)));
    if (!(ref_norm > 0.0)) throw DataError("relative error undefined for a zero reference");
    std::vector<double> d(u.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = u[i] - ref[i];
    return std::sqrt(std::max(0.0, energy(mass, d))) / ref_norm;
}

ErrorReport error_report(const Trajectory& traj, std::span<const double> reference_final,
                         const FemSystem& sys) {
    ErrorReport rep;
    rep.final_error = relative_l2_error(sys.mass, traj.final_state(), reference_final);
    return rep;
}

ErrorReport error_report(const Trajectory& traj, const Trajectory& reference, const FemSystem& sys) {
    ErrorReport rep = error_report(traj, reference.final_state(), sys);
    const std::size_t n = traj.grid.steps();
    const std::size_t nr = reference.grid.steps();
    if (std::abs(traj.grid.final_time() - reference.grid.final_time()) > 1e-12 * traj.grid.final_time())
        throw ConfigError("reference covers a different time interval");
    if (!traj.complete() || !reference.complete()) return rep;
    if (nr % n != 0) throw ConfigError("reference grid does not refine the trajectory grid");
    const std::size_t ratio = nr / n;
    for (std::size_t k = 1; k <= n; ++k) {
        const auto& ref = reference.states[k * ratio];
        double refn = std::sqrt(std::max(0.0, energy(sys.mass, ref)));
        if (refn == 0.0) continue;
        rep.checkpoints.push_back({k, traj.grid.t(k), relative_l2_error(sys.mass, traj.states[k], ref)});
    }
    return rep;
}

}  // namespace subdiff

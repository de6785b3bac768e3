// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Arguments select a subset by number ("subdiff_acceptance 1 5").
// SUBDIFF_REF_DIR, if set, caches fine-step reference solutions on disk.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subdiff/bench.hpp"
#include "subdiff/cq.hpp"
#include "subdiff/fem.hpp"
#include "subdiff/multigrid.hpp"
#include "subdiff/schedule.hpp"

using namespace subdiff;
using namespace subdiff::bench;

namespace {

struct Outcome {
    std::vector<std::string> failures;
    std::ostringstream detail;

    bool pass() const { return failures.empty(); }
    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

ReferenceCache& references() {
    static ReferenceCache cache = [] {
        const char* dir = std::getenv("SUBDIFF_REF_DIR");
        return dir ? ReferenceCache(std::filesystem::path(dir)) : ReferenceCache();
    }();
    return cache;
}

std::string fmt(double x, const char* spec = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

ExperimentConfig table_config(Example e, std::size_t K, std::vector<std::string> schedules) {
    ExperimentConfig c;
    c.example = e;
    c.K = K;
    for (const auto& s : schedules) c.schedules.push_back(parse_schedule(s));
    return c;
}

// Rates of one row for N >= n_min, as "N:rate" text plus the values.
std::vector<double> rates(const ErrorTable& t, double alpha, const std::string& label, std::size_t n_min,
                          std::string& text) {
    std::vector<double> out;
    for (const TableCell* c : t.row(alpha, label))
        if (c->rate && c->N >= n_min) {
            out.push_back(*c->rate);
            text += " " + std::to_string(c->N) + ":" + fmt(*c->rate, "%.3f");
        }
    return out;
}

bool all_within(const std::vector<double>& v, double lo, double hi) {
    for (double x : v)
        if (x < lo || x > hi) return false;
    return !v.empty();
}

void weights_bounded(Outcome& o) {
    std::size_t checked = 0;
    for (int k = 1; k <= 9; ++k) {
        const double g = 0.1 * k;
        const WeightTable w = gen_weights(FracOrder(g), 10000);
        for (std::size_t j = 0; j <= 10000; ++j, ++checked)
            if (!(std::abs(w[j]) <= weight_bound(g, j)))
                o.require(false, "gamma=" + fmt(g) + " j=" + std::to_string(j));
    }
    o.detail << checked << " weights within e^{2g}(j+1)^{-g-1}";
}

void composition(Outcome& o) {
    double worst = 0.0;
    for (double a : {0.2, 0.5, 0.8}) {
        const WeightTable w1 = gen_weights(FracOrder(1.0 - a), 499);
        const WeightTable w2 = gen_weights(FracOrder(a), 499);
        const auto c = convolve_weights(w1.weights(), w2.weights(), 500);
        for (std::size_t j = 0; j < 500; ++j) {
            const double target = j == 0 ? 1.0 : (j == 1 ? -1.0 : 0.0);
            worst = std::max(worst, std::abs(c[j] - target));
        }
    }
    o.require(worst <= 1e-13, "deviation too large");
    o.detail << "max deviation from [1,-1,0,...] " << fmt(worst);
}

void scalar_oracle(Outcome& o) {
    double lo = 1e9, hi = -1e9;
    for (double alpha : {0.2, 0.5, 0.8})
        for (double beta : {0.0, 1.0, 2.0}) {
            const double exact = rl_integral_oracle(alpha, beta, 1.0);
            double prev = 0.0;
            for (std::size_t N : {40u, 80u, 160u, 320u}) {
                const WeightTable w = gen_weights(FracOrder::model(alpha), N);
                const double tau = 1.0 / static_cast<double>(N);
                std::vector<double> u(N + 1, 0.0);
                for (std::size_t n = 1; n <= N; ++n) {
                    double s = std::pow(tau, alpha) * std::pow(static_cast<double>(n) * tau, beta);
                    for (std::size_t j = 1; j <= n; ++j) s -= w[j] * u[n - j];
                    u[n] = s;
                }
                const double err = std::abs(u[N] - exact);
                if (N > 40) {
                    const double r = std::log2(prev / err);
                    lo = std::min(lo, r);
                    hi = std::max(hi, r);
                }
                prev = err;
            }
        }
    o.require(lo >= 0.9 && hi <= 1.1, "order outside 1 +- 0.1");
    o.detail << "observed orders in [" << fmt(lo, "%.3f") << ", " << fmt(hi, "%.3f") << "]";
}

void fem_identity(Outcome& o) {
    double worst = 0.0;
    for (double c : {1.0, 5.0})
        for (std::size_t K : {8u, 16u, 32u}) {
            const FemSystem sys = assemble(build_mesh(K), c);
            const auto rv = ritz_project(sys, [](double x, double y) {
                return std::array<double, 2>{-2 * x * (1 - y * y), -2 * y * (1 - x * x)};
            });
            const auto F = load_vector(sys.mesh, [c](double x, double y) { return 2 * c * ((1 - y * y) + (1 - x * x)); });
            const auto s = sys.stiffness.apply(rv);
            double d = 0.0, f = 0.0;
            for (std::size_t i = 0; i < F.size(); ++i) {
                d = std::max(d, std::abs(s[i] - F[i]));
                f = std::max(f, std::abs(F[i]));
            }
            worst = std::max(worst, d / f);
        }
    o.require(worst <= 1e-10, "identity violated");
    o.detail << "max |S R_h v - F(Av)| / |F| = " << fmt(worst);
}

void galerkin(Outcome& o) {
    const FemSystem sys = assemble(build_mesh(32), 5.0);
    double worst = 0.0;
    for (double ta : {1e-3, 0.1}) {
        const MgHierarchy h(sys, ta * ta, 0.5, {});
        for (std::size_t l = 0; l + 1 < h.num_levels(); ++l) worst = std::max(worst, h.galerkin_deviation(l));
    }
    o.require(worst <= 1e-12, "coarse operator differs from P^T B P");
    o.detail << "max relative deviation " << fmt(worst);
}

void contraction(Outcome& o) {
    double gs_max = 0.0, jac_min = 1.0, jac_max = 0.0;
    for (std::size_t K : {32u, 64u}) {
        const FemSystem sys = assemble(build_mesh(K), 5.0);
        for (double alpha : {0.2, 0.5, 0.8})
            for (std::size_t N : {40u, 320u}) {
                const double tau = 1.0 / static_cast<double>(N);
                const MgHierarchy gs(sys, tau, alpha, {Smoother::gauss_seidel(), 1, 1, 4});
                const MgHierarchy jac(sys, tau, alpha, {Smoother::jacobi(), 1, 1, 4});
                const double kg = estimate_contraction(gs, 4, 10, 42).kappa;
                const double kj = estimate_contraction(jac, 4, 10, 42).kappa;
                const std::string cell = "K=" + std::to_string(K) + " alpha=" + fmt(alpha) + " N=" + std::to_string(N);
                o.require(kg > 0.0 && kg < 1.0, "gs kappa out of (0,1) at " + cell);
                o.require(kj > 0.0 && kj < 1.0, "jacobi kappa out of (0,1) at " + cell);
                o.require(kg < kj, "gs not below jacobi at " + cell);
                gs_max = std::max(gs_max, kg);
                jac_min = std::min(jac_min, kj);
                jac_max = std::max(jac_max, kj);
            }
    }
    o.detail << "kappa gs <= " << fmt(gs_max, "%.3f") << ", damped jacobi in [" << fmt(jac_min, "%.3f") << ", "
             << fmt(jac_max, "%.3f") << "]";
}

void direct_rates(Outcome& o) {
    ExperimentConfig c = table_config(Example::One, 64, {"exact"});
    c.Ns = {40, 80, 160, 320};
    const ErrorTable t = run_example(c, &references());
    for (double a : c.alphas) {
        std::string text;
        const auto r = rates(t, a, "exact", 80, text);
        o.require(all_within(r, 0.9, 1.1), "alpha=" + fmt(a) + " rates outside [0.9,1.1]");
        o.detail << "alpha=" << a << ":" << text << "  ";
    }
}

void reference_band(Outcome& o) {
    ExperimentConfig c = table_config(Example::One, 128, {"fixed:2"});
    c.alphas = {0.5};
    c.Ns = {160, 320};
    const ErrorTable t = run_example(c, &references());
    const TableCell& last = t.cells.back();
    const double target = 7.03e-5, target_rate = 0.99;
    const double rel = last.error / target - 1.0;
    o.require(std::abs(rel) <= 0.10, "e^N not within 10% of " + fmt(target));
    o.require(last.rate && std::abs(*last.rate - target_rate) <= 0.15, "rate not within 0.15 of 0.99");
    o.detail << "e^N=" << format_sci(last.error) << " (" << fmt(100 * rel, "%+.1f") << "% vs " << fmt(target)
             << "), rate=" << fmt(last.rate.value_or(NAN), "%.3f");
}

void instability(Outcome& o) {
    ExperimentConfig c = table_config(Example::One, 64, {"fixed:1", "fixed:3"});
    c.smoother = Smoother::jacobi(1.0);
    const ErrorTable t = run_example(c, &references());
    bool unstable = false;
    for (double a : c.alphas) {
        std::string t1, t3;
        for (double r : rates(t, a, "fixed:1", 0, t1))
            if (r < 0.6 || r > 1.4) unstable = true;
        const auto r3 = rates(t, a, "fixed:3", 80, t3);
        o.require(all_within(r3, 0.85, 1.15), "alpha=" + fmt(a) + " fixed:3 rates outside [0.85,1.15]");
        o.detail << "alpha=" << a << " M=1:" << t1 << " | M=3:" << t3 << "  ";
    }
    o.require(unstable, "fixed:1 keeps every rate in [0.6,1.4]");
}

void nonsmooth_schedules(Outcome& o) {
    ExperimentConfig a = table_config(Example::Two, 64, {"log:1,0"});
    const ErrorTable ta = run_example(a, &references());
    for (double alpha : a.alphas) {
        std::string text;
        const auto r = rates(ta, alpha, "log:1,0", 40, text);
        o.require(all_within(r, 0.9, 1.1), "gs log:1,0 alpha=" + fmt(alpha) + " rates outside [0.9,1.1]");
        o.detail << "(a) alpha=" << alpha << ":" << text << "  ";
    }

    ExperimentConfig b = table_config(Example::Two, 64, {"log:3,0", "log:3,6"});
    b.alphas = {0.8};
    b.smoother = Smoother::jacobi(1.0);
    const ErrorTable tb = run_example(b, &references());
    std::string t0, t6;
    const auto r0 = rates(tb, 0.8, "log:3,0", 0, t0);
    const auto r6 = rates(tb, 0.8, "log:3,6", 160, t6);
    double lowest = 1e9;
    for (double r : r0) lowest = std::min(lowest, r);
    o.require(lowest <= 0.6, "jacobi b=0 lowest rate " + fmt(lowest, "%.3f") + " > 0.6");
    o.require(all_within(r6, 0.8, 1.15), "jacobi b=6 rates outside [0.8,1.15]");
    o.detail << "(b) b=0:" << t0 << " | b=6:" << t6;
}

void theory_schedule(Outcome& o) {
    ExperimentConfig c = table_config(Example::Two, 64, {"theory-nonsmooth:0.1"});
    const ErrorTable t = run_example(c, &references());
    const std::string label = c.schedules.front().label();
    for (double a : c.alphas) {
        std::string text;
        const auto r = rates(t, a, label, 80, text);
        o.require(all_within(r, 0.85, 1.15), "alpha=" + fmt(a) + " rates outside [0.85,1.15]");
        o.detail << "alpha=" << a << ":" << text << "  ";
    }
    int max_m = 0;
    for (const auto& cell : t.cells) {
        const auto& m = cell.iterations;
        for (std::size_t n = c.startup_exact + 1; n < m.size(); ++n)
            if (m[n] > m[n - 1]) o.require(false, "M_n increases at alpha=" + fmt(cell.alpha) + " N=" + std::to_string(cell.N));
        if (m.size() > c.startup_exact) max_m = std::max(max_m, m[c.startup_exact]);
    }
    o.detail << "max M_n " << max_m;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "CQ weight bound", 1.0, weights_bounded},
        {2, "CQ composition", 1.0, composition},
        {3, "scalar fractional integral order", 5.0, scalar_oracle},
        {4, "Ritz projection identity", 5.0, fem_identity},
        {5, "Galerkin coarse operators", 5.0, galerkin},
        {6, "V-cycle contraction", 120.0, contraction},
        {7, "direct solver rates, example 1", 300.0, direct_rates},
        {8, "K=128 gauss-seidel M_n=2 band", 900.0, reference_band},
        {9, "fixed-count instability signature", 600.0, instability},
        {10, "nonsmooth data log schedules", 600.0, nonsmooth_schedules},
        {11, "theory schedule, nonsmooth data", 600.0, theory_schedule},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.require(secs <= c.limit_seconds, "runtime " + fmt(secs) + " s over " + fmt(c.limit_seconds) + " s");
        std::string text = o.detail.str();
        for (const auto& f : o.failures) text += "\n       failed: " + f;
        if (!o.pass()) ++failures;
        std::printf("[%s] %2d %s (%.1f s): %s\n", o.pass() ? "PASS" : "FAIL", c.id, c.name, secs, text.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}

#include "subdiff/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff::bench {

std::string example_name(Example e) { return e == Example::One ? "example1" : "example2"; }

void ExperimentConfig::validate() const {
    if (alphas.empty()) throw ConfigError("need at least one alpha");
    for (double a : alphas) FracOrder::model(a);
    if (Ns.empty()) throw ConfigError("need at least one N");
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (Ns[i] < 1) throw ConfigError("N must be positive");
        if (i > 0 && Ns[i] <= Ns[i - 1]) throw ConfigError("N list must be strictly increasing");
    }
    Mesh2D{K};
    std::size_t k = coarse_K;
    if (coarse_K < 2 || coarse_K % 2 != 0) throw ConfigError("coarsest K must be even and >= 2");
    while (k < K) k *= 2;
    if (k != K || K == coarse_K) {
        std::ostringstream msg;
        msg << "K=" << K << " is not " << coarse_K << "*2^L with L >= 1";
        throw ConfigError(msg.str());
    }
    if (!(diffusivity > 0.0)) throw ConfigError("diffusivity must be positive");
    if (!(final_time > 0.0)) throw ConfigError("final time must be positive");
    if (nu1 < 0 || nu2 < 0 || nu1 + nu2 < 1) throw ConfigError("need nu1 + nu2 >= 1");
    if (startup_exact < 1) throw ConfigError("exact start-up steps must be >= 1");
    if (ref_N < 16 * Ns.back()) {
        std::ostringstream msg;
        msg << "reference N_ref=" << ref_N << " must be at least 16 x max N = " << 16 * Ns.back();
        throw ConfigError(msg.str());
    }
    for (const auto& s : schedules) s.validate();
    if (contraction_trials < 1 || contraction_cycles < 2) throw ConfigError("bad contraction probe sizes");
}

std::vector<IterationSchedule> default_schedules(Example e) {
    std::vector<IterationSchedule> rows;
    if (e == Example::One) {
        for (const char* s : {"fixed:1", "fixed:2", "fixed:3", "exact"}) rows.push_back(parse_schedule(s));
    } else {
        for (const char* s : {"log:3,0", "log:3,3", "log:3,6", "exact"}) rows.push_back(parse_schedule(s));
    }
    return rows;
}

ProblemSpec make_problem(Example e, double alpha, const TimeGrid& grid, std::shared_ptr<const FemSystem> sys) {
    ProblemSpec spec{alpha, grid, std::move(sys)};
    if (e == Example::One) {
        spec.initial = InitialData::zero();
        spec.source = Source::separable([](double t) { return t * t; },
                                        [](double x, double y) { return (1.0 - x * x) * (1.0 - y * y); });
    } else {
        spec.initial = InitialData::l2_projection(
            [](double x, double y) { return (x < 0.0 ? 1.0 : 0.0) + (y < 0.0 ? 1.0 : 0.0); });
        spec.source = Source::zero();
    }
    return spec;
}

ReferenceCache::ReferenceCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {}

void ReferenceCache::save(const std::filesystem::path& file, const std::vector<double>& u) {
    std::ofstream os(file);
    if (!os) throw IoError("cannot write reference file " + file.string());
    os << "subdiff-reference " << u.size() << '\n';
    char buf[40];
    for (double v : u) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        os << buf;
    }
    if (!os) throw IoError("failed writing reference file " + file.string());
}

std::vector<double> ReferenceCache::load(const std::filesystem::path& file, std::size_t expected_size) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot read reference file " + file.string());
    std::string tag;
    std::size_t n = 0;
    if (!(is >> tag >> n) || tag != "subdiff-reference") throw DataError("malformed reference file " + file.string());
    if (n != expected_size) throw ShapeError("reference file " + file.string() + " has the wrong dimension");
    std::vector<double> u(n);
    for (double& v : u)
        if (!(is >> v)) throw DataError("truncated reference file " + file.string());
    return u;
}

const std::vector<double>& ReferenceCache::get(Example e, double alpha, const FemSystem& sys, double final_time,
                                               std::size_t ref_N) {
    const Key key{static_cast<int>(e), alpha, sys.mesh.K(), sys.diffusivity, final_time, ref_N};
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    std::optional<std::filesystem::path> file;
    if (dir_) {
        std::ostringstream name;
        name << example_name(e) << "_alpha" << alpha << "_K" << sys.mesh.K() << "_c" << sys.diffusivity << "_T"
             << final_time << "_Nref" << ref_N << ".txt";
        file = *dir_ / name.str();
        if (std::filesystem::exists(*file)) return cache_[key] = load(*file, sys.size());
    }
    auto shared = std::make_shared<const FemSystem>(sys);
    const ProblemSpec spec = make_problem(e, alpha, TimeGrid(final_time, ref_N), shared);
    RunOptions opts;
    opts.keep_all_states = false;
    const Trajectory ref = run_exact(spec, opts);
    auto& stored = cache_[key] = ref.final_state();
    if (file) {
        std::filesystem::create_directories(*dir_);
        save(*file, stored);
    }
    return stored;
}

std::string format_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", x);
    return buf;
}

double round_emitted(double x) { return std::stod(format_sci(x)); }

double observed_rate(double e_prev, double e) { return std::log2(e_prev / e); }

std::vector<const TableCell*> ErrorTable::row(double alpha, const std::string& label) const {
    std::vector<const TableCell*> out;
    for (const auto& c : cells)
        if (c.alpha == alpha && c.label == label) out.push_back(&c);
    return out;
}

std::vector<std::string> ErrorTable::labels() const {
    std::vector<std::string> out;
    for (const auto& c : cells)
        if (std::find(out.begin(), out.end(), c.label) == out.end()) out.push_back(c.label);
    return out;
}

namespace {

std::string describe_smoother(const ExperimentConfig& c) {
    std::ostringstream os;
    os << c.smoother.name();
    if (c.smoother.kind == Smoother::Kind::DampedJacobi) os << "(omega=" << c.smoother.omega << ")";
    return os.str();
}

ErrorTable run_table(const ExperimentConfig& config, ReferenceCache* cache) {
    config.validate();
    ReferenceCache local;
    ReferenceCache& refs = cache ? *cache : local;
    std::vector<IterationSchedule> rows = config.schedules.empty() ? default_schedules(config.example) : config.schedules;
    for (auto& r : rows) r.exact_startup_steps = config.startup_exact;

    auto sys = std::make_shared<const FemSystem>(assemble(build_mesh(config.K), config.diffusivity));

    ErrorTable table;
    table.title = config.example == Example::One ? "Example 1: smooth solution, L2 errors e^N"
                                                 : "Example 2: nonsmooth initial data, L2 errors e^N";
    {
        std::ostringstream h;
        h << "K=" << config.K << ", c_A=" << config.diffusivity << ", T=" << config.final_time
          << ", smoother=" << describe_smoother(config) << ", nu1=" << config.nu1 << ", nu2=" << config.nu2
          << ", K0=" << config.coarse_K << ", startup_exact=" << config.startup_exact
          << ", reference=fine backward Euler N_ref=" << config.ref_N << ", seed=" << config.seed;
        table.header.push_back(h.str());
    }

    for (double alpha : config.alphas) {
        const std::vector<double>& reference = refs.get(config.example, alpha, *sys, config.final_time, config.ref_N);
        for (const auto& schedule : rows) {
            const std::string label = schedule.label();
            std::optional<double> prev;
            for (std::size_t N : config.Ns) {
                const auto start = std::chrono::steady_clock::now();
                const TimeGrid grid(config.final_time, N);
                const ProblemSpec spec = make_problem(config.example, alpha, grid, sys);
                const DiscreteProblem problem = discretize(spec);
                RunOptions opts;
                opts.keep_all_states = false;
                Trajectory traj;
                if (schedule.is_exact()) {
                    traj = run_exact(problem, opts);
                } else {
                    const MgHierarchy h(*sys, grid.tau(), alpha, config.mg_options());
                    IterationSchedule s = schedule;
                    if (s.needs_contraction()) {
                        const ContractionParams p = estimate_contraction(h, config.contraction_trials,
                                                                         config.contraction_cycles, config.seed);
                        if (auto* t = std::get_if<IterationSchedule::TheorySmoothData>(&s.rule)) t->params = p;
                        if (auto* t = std::get_if<IterationSchedule::TheoryNonsmoothData>(&s.rule)) t->params = p;
                    }
                    traj = run_iis(problem, s, h, opts);
                }
                TableCell cell;
                cell.alpha = alpha;
                cell.label = label;
                cell.N = N;
                cell.raw_error = error_report(traj, reference, *sys).final_error;
                cell.error = round_emitted(cell.raw_error);
                if (prev) cell.rate = observed_rate(*prev, cell.error);
                prev = cell.error;
                for (const auto& r : traj.records) {
                    cell.iterations.push_back(r.iterations);
                    cell.clamped = cell.clamped || r.clamped;
                }
                cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                table.cells.push_back(std::move(cell));
            }
        }
    }
    return table;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string format_rate(double r) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", r);
    return buf;
}

std::string format_fixed2(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", r);
    return buf;
}

std::string format_short(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", e);
    return buf;
}

}  // namespace

ErrorTable run_example1(const ExperimentConfig& config, ReferenceCache* cache) {
    ExperimentConfig c = config;
    c.example = Example::One;
    return run_table(c, cache);
}

ErrorTable run_example2(const ExperimentConfig& config, ReferenceCache* cache) {
    ExperimentConfig c = config;
    c.example = Example::Two;
    return run_table(c, cache);
}

ErrorTable run_example(const ExperimentConfig& config, ReferenceCache* cache) { return run_table(config, cache); }

std::vector<ContractionRow> run_contraction_sweep(const ExperimentConfig& config,
                                                  const std::vector<std::string>& smoothers) {
    config.validate();
    const FemSystem sys = assemble(build_mesh(config.K), config.diffusivity);
    std::vector<ContractionRow> rows;
    for (double alpha : config.alphas)
        for (std::size_t N : config.Ns) {
            const double tau = config.final_time / static_cast<double>(N);
            for (const auto& name : smoothers) {
                ContractionRow row{alpha, tau, config.K, name, config.nu1, config.nu2, {}};
                if (name == "direct") {
                    const double ta = std::pow(tau, alpha);
                    const CsrMatrix b = sys.mass.add_scaled(ta, sys.stiffness);
                    const DirectSolver direct(b);
                    const std::vector<double> zero(sys.size(), 0.0);
                    row.nu1 = row.nu2 = 0;
                    row.params = estimate_contraction(
                        [&](std::span<double> x) { direct.solve(zero, x); },
                        [&](std::span<const double> x) { return std::sqrt(std::max(0.0, energy(b, x))); },
                        sys.size(), config.contraction_trials, config.contraction_cycles, config.seed);
                } else {
                    MgOptions opts = config.mg_options();
                    if (name == "jacobi") {
                        opts.smoother = config.smoother.kind == Smoother::Kind::DampedJacobi
                                            ? config.smoother
                                            : Smoother::jacobi();
                    } else if (name == "gs") {
                        opts.smoother = Smoother::gauss_seidel();
                    } else {
                        throw ConfigError("unknown smoother '" + name + "'");
                    }
                    const MgHierarchy h(sys, tau, alpha, opts);
                    row.params = estimate_contraction(h, config.contraction_trials, config.contraction_cycles,
                                                      config.seed);
                }
                rows.push_back(row);
            }
        }
    return rows;
}

void emit_table(std::ostream& os, const ErrorTable& table, Format format) {
    if (format == Format::Csv) {
        os << "alpha,row_label,N,eN,rate\n";
        for (const auto& c : table.cells) {
            os << format_sci(c.alpha) << ',' << csv_field(c.label) << ',' << c.N << ',' << format_sci(c.error) << ',';
            if (c.rate) os << format_rate(*c.rate);
            os << '\n';
        }
        return;
    }

    os << "## " << table.title << "\n\n";
    for (const auto& h : table.header) os << h << "\n\n";
    std::vector<std::size_t> Ns;
    std::vector<double> alphas;
    for (const auto& c : table.cells) {
        if (std::find(Ns.begin(), Ns.end(), c.N) == Ns.end()) Ns.push_back(c.N);
        if (std::find(alphas.begin(), alphas.end(), c.alpha) == alphas.end()) alphas.push_back(c.alpha);
    }
    std::sort(Ns.begin(), Ns.end());
    os << "| alpha | M_n \\ N |";
    for (std::size_t N : Ns) os << ' ' << N << " |";
    os << "\n|---|---|";
    for (std::size_t i = 0; i < Ns.size(); ++i) os << "---|";
    os << '\n';
    for (double a : alphas)
        for (const auto& label : table.labels()) {
            const auto cells = table.row(a, label);
            if (cells.empty()) continue;
            std::ostringstream alpha;
            alpha << a;
            os << "| " << alpha.str() << " | " << label << " |";
            for (std::size_t N : Ns) {
                const auto it = std::find_if(cells.begin(), cells.end(), [&](const TableCell* c) { return c->N == N; });
                os << ' ' << (it == cells.end() ? std::string() : format_short((*it)->error)) << " |";
            }
            os << "\n|  |  |";
            for (std::size_t N : Ns) {
                const auto it = std::find_if(cells.begin(), cells.end(), [&](const TableCell* c) { return c->N == N; });
                os << ' ' << (it == cells.end() || !(*it)->rate ? std::string() : format_fixed2(*(*it)->rate)) << " |";
            }
            os << '\n';
        }
}

void emit_contraction(std::ostream& os, const std::vector<ContractionRow>& rows) {
    os << "alpha,tau,K,smoother,nu1,nu2,kappa,c0\n";
    for (const auto& r : rows)
        os << format_sci(r.alpha) << ',' << format_sci(r.tau) << ',' << r.K << ',' << r.smoother << ',' << r.nu1 << ','
           << r.nu2 << ',' << format_sci(r.params.kappa) << ',' << format_sci(r.params.c0) << '\n';
}

void emit_weights(std::ostream& os, double gamma, std::size_t n_max) {
    const WeightTable w = gen_weights(FracOrder(gamma), n_max);
    os << "j,b_j,bound\n";
    for (std::size_t j = 0; j <= n_max; ++j)
        os << j << ',' << format_sci(w[j]) << ',' << format_sci(weight_bound(gamma, j)) << '\n';
}

}  // namespace subdiff::bench

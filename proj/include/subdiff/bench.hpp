#pragma once

// Benchmark harness: the two model problems on (-1, 1)^2 with A = -c Laplace,
// error tables over (alpha, schedule, N), contraction sweeps, and table
// output in CSV and Markdown.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "subdiff/multigrid.hpp"
#include "subdiff/schedule.hpp"
#include "subdiff/stepper.hpp"

namespace subdiff::bench {

enum class Example {
    One,  // v = 0, f = t^2 (1 - x^2)(1 - y^2)
    Two,  // f = 0, v = chi_{x<0} + chi_{y<0}, v_h = P_h v
};

std::string example_name(Example e);

struct ExperimentConfig {
    Example example = Example::One;
    std::vector<double> alphas{0.2, 0.5, 0.8};
    std::vector<std::size_t> Ns{10, 20, 40, 80, 160, 320};
    std::size_t K = 64;
    double diffusivity = 5.0;
    double final_time = 1.0;
    Smoother smoother = Smoother::gauss_seidel();
    int nu1 = 1;
    int nu2 = 1;
    std::size_t coarse_K = 4;
    std::vector<IterationSchedule> schedules;  // table rows
    std::size_t startup_exact = 2;
    std::size_t ref_N = 5120;
    std::optional<std::filesystem::path> ref_dir;  // load/store references here
    std::uint64_t seed = 42;
    std::size_t contraction_trials = 4;
    std::size_t contraction_cycles = 10;

    /// Throws ConfigError on violated invariants (N list not strictly
    /// increasing, K incompatible with the hierarchy, N_ref < 16 max N, ...).
    void validate() const;
    MgOptions mg_options() const { return MgOptions{smoother, nu1, nu2, coarse_K}; }
};

/// Default rows: M_n in {1, 2, 3, inf} for Example One, a = 3 with
/// b in {0, 3, 6} plus the direct row for Example Two.
std::vector<IterationSchedule> default_schedules(Example e);

ProblemSpec make_problem(Example e, double alpha, const TimeGrid& grid,
                         std::shared_ptr<const FemSystem> sys);

/// Fine-step backward Euler references, computed once per key and kept in
/// memory; optionally persisted as text files in a directory.
class ReferenceCache {
public:
    explicit ReferenceCache(std::optional<std::filesystem::path> dir = std::nullopt);

    const std::vector<double>& get(Example e, double alpha, const FemSystem& sys, double final_time,
                                   std::size_t ref_N);

    static void save(const std::filesystem::path& file, const std::vector<double>& u);
    static std::vector<double> load(const std::filesystem::path& file, std::size_t expected_size);

private:
    using Key = std::tuple<int, double, std::size_t, double, double, std::size_t>;
    std::optional<std::filesystem::path> dir_;
    std::map<Key, std::vector<double>> cache_;
};

struct TableCell {
    double alpha = 0.0;
    std::string label;
    std::size_t N = 0;
    double error = 0.0;      // e^N rounded to the six significant digits emitted
    double raw_error = 0.0;  // unrounded
    std::optional<double> rate;
    double seconds = 0.0;
    std::vector<int> iterations;  // M_n per step (StepRecord::kExactStep for direct steps)
    bool clamped = false;
};

struct ErrorTable {
    std::string title;
    std::vector<std::string> header;  // metadata lines for Markdown output
    std::vector<TableCell> cells;     // sorted by (alpha, row order, N)

    /// Cells of one row, in N order.
    std::vector<const TableCell*> row(double alpha, const std::string& label) const;
    std::vector<std::string> labels() const;  // row labels in first-seen order
};

/// log2(e_prev / e), from the given (already rounded) errors.
double observed_rate(double e_prev, double e);

/// Rounds to six significant digits, exactly as emitted.
double round_emitted(double x);

ErrorTable run_example1(const ExperimentConfig& config, ReferenceCache* cache = nullptr);
ErrorTable run_example2(const ExperimentConfig& config, ReferenceCache* cache = nullptr);
ErrorTable run_example(const ExperimentConfig& config, ReferenceCache* cache = nullptr);

struct ContractionRow {
    double alpha;
    double tau;
    std::size_t K;
    std::string smoother;  // "jacobi", "gs", or "direct"
    int nu1;
    int nu2;
    ContractionParams params;
};

/// kappa/c0 for every (alpha, N, smoother); `smoothers` may include
/// "direct" for the exact-solver row. Throws NumericError when kappa >= 1.
std::vector<ContractionRow> run_contraction_sweep(const ExperimentConfig& config,
                                                  const std::vector<std::string>& smoothers);

enum class Format { Csv, Markdown };

void emit_table(std::ostream& os, const ErrorTable& table, Format format);
void emit_contraction(std::ostream& os, const std::vector<ContractionRow>& rows);
void emit_weights(std::ostream& os, double gamma, std::size_t n_max);

/// Scientific notation with six significant digits.
std::string format_sci(double x);

}  // namespace subdiff::bench

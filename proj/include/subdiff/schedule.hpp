#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "subdiff/multigrid.hpp"

namespace subdiff {

/// Rule for the number M_n of inner iterations (V-cycles) at step n.
struct IterationSchedule {
    struct Exact {};
    struct Fixed {
        int m;
    };
    /// M_n = a + ceil(b log2(1 / t_n))
    struct LogSchedule {
        int a;
        int b;
    };
    /// smallest M with c0 kappa^M <= delta min(t_n^{alpha/2}, 1) / l_n
    struct TheorySmoothData {
        double delta;
        ContractionParams params;
    };
    /// smallest M with c0 kappa^M <= delta min(t_n, 1) / l_n
    struct TheoryNonsmoothData {
        double delta;
        ContractionParams params;
    };
    using Rule = std::variant<Exact, Fixed, LogSchedule, TheorySmoothData, TheoryNonsmoothData>;

    Rule rule = Exact{};
    /// Steps 1..exact_startup_steps are always solved directly.
    std::size_t exact_startup_steps = 2;

    bool is_exact() const noexcept { return std::holds_alternative<Exact>(rule); }
    bool needs_contraction() const noexcept {
        return std::holds_alternative<TheorySmoothData>(rule) ||
               std::holds_alternative<TheoryNonsmoothData>(rule);
    }
    /// Throws ConfigError when a parameter is out of range.
    void validate() const;

    /// Short label: "exact", "fixed:2", "log:3,6", "theory-smooth:0.1", ...
    std::string label() const;
};

constexpr int kMaxInnerIterations = 200;

/// Parses "exact", "fixed:m", "log:a,b", "theory-smooth:delta",
/// "theory-nonsmooth:delta". Theory variants get placeholder contraction
/// parameters (kappa = 0) that callers must fill from a measurement.
IterationSchedule parse_schedule(std::string_view text);

struct ScheduledCount {
    int iterations;
    bool clamped;  // the rule asked for more than kMaxInnerIterations
};

/// M_n for a step past the exact start-up, clamped to [1, kMaxInnerIterations].
/// Throws ConfigError for the Exact rule, for n within the start-up range, or
/// for theory rules with kappa outside (0, 1).
ScheduledCount schedule_iters(const IterationSchedule& schedule, std::size_t n, double t_n,
                              double tau, double alpha);

/// l_n = ln(1 + t_n / tau).
double log_factor(double t_n, double tau);

}  // namespace subdiff

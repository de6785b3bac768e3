#include "subdiff/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ConfigError("schedule: bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
    return v;
}

double parse_real(std::string_view s, std::string_view what) {
    try {
        std::size_t used = 0;
        const std::string str(s);
        const double v = std::stod(str, &used);
        if (used != str.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("schedule: bad number for " + std::string(what) + ": '" + std::string(s) + "'");
    }
}

// Smallest M >= 0 with c0 kappa^M <= target.
int iterations_for(const ContractionParams& p, double target) {
    if (!(p.kappa > 0.0 && p.kappa < 1.0))
        throw ConfigError("theory schedule needs a contraction factor kappa in (0, 1)");
    if (p.c0 <= target) return 0;
    const double m = std::log(target / p.c0) / std::log(p.kappa);
    int M = static_cast<int>(std::ceil(m - 1e-9));
    while (M > 0 && p.c0 * std::pow(p.kappa, M - 1) <= target) --M;
    return M;
}

}  // namespace

void IterationSchedule::validate() const {
    if (exact_startup_steps < 1) throw ConfigError("exact start-up steps must be >= 1");
    std::visit(Overloaded{
                   [](const Exact&) {},
                   [](const Fixed& f) {
                       if (f.m < 1) throw ConfigError("fixed schedule needs m >= 1");
                   },
                   [](const LogSchedule& l) {
                       if (l.a < 0 || l.b < 0 || l.a + l.b < 1)
                           throw ConfigError("log schedule needs a, b >= 0 and a + b >= 1");
                   },
                   [](const TheorySmoothData& t) {
                       if (!(t.delta > 0.0 && t.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
                   },
                   [](const TheoryNonsmoothData& t) {
                       if (!(t.delta > 0.0 && t.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
                   },
               },
               rule);
}

std::string IterationSchedule::label() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const Exact&) { os << "exact"; },
                   [&](const Fixed& f) { os << "fixed:" << f.m; },
                   [&](const LogSchedule& l) { os << "log:" << l.a << ',' << l.b; },
                   [&](const TheorySmoothData& t) { os << "theory-smooth:" << t.delta; },
                   [&](const TheoryNonsmoothData& t) { os << "theory-nonsmooth:" << t.delta; },
               },
               rule);
    return os.str();
}

IterationSchedule parse_schedule(std::string_view text) {
    IterationSchedule s;
    const auto colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (kind == "exact" && colon == std::string_view::npos) {
        s.rule = IterationSchedule::Exact{};
    } else if (kind == "fixed") {
        s.rule = IterationSchedule::Fixed{parse_int(arg, "m")};
    } else if (kind == "log") {
        const auto comma = arg.find(',');
        if (comma == std::string_view::npos) throw ConfigError("log schedule expects 'log:a,b'");
        s.rule = IterationSchedule::LogSchedule{parse_int(arg.substr(0, comma), "a"),
                                                parse_int(arg.substr(comma + 1), "b")};
    } else if (kind == "theory-smooth") {
        s.rule = IterationSchedule::TheorySmoothData{parse_real(arg, "delta"), {}};
    } else if (kind == "theory-nonsmooth") {
        s.rule = IterationSchedule::TheoryNonsmoothData{parse_real(arg, "delta"), {}};
    } else {
        throw ConfigError("unknown schedule '" + std::string(text) + "'");
    }
    s.validate();
    return s;
}

double log_factor(double t_n, double tau) { return std::log1p(t_n / tau); }

ScheduledCount schedule_iters(const IterationSchedule& schedule, std::size_t n, double t_n, double tau,
                              double alpha) {
    if (schedule.is_exact()) throw ConfigError("exact schedule has no iteration count");
    if (n <= schedule.exact_startup_steps) throw ConfigError("step lies in the exact start-up range");
    const int raw = std::visit(
        Overloaded{
            [](const IterationSchedule::Exact&) { return 0; },
            [](const IterationSchedule::Fixed& f) { return f.m; },
            [&](const IterationSchedule::LogSchedule& l) {
                const double lg = std::log2(std::max(1.0, 1.0 / t_n));
                return l.a + static_cast<int>(std::ceil(l.b * lg - 1e-9));
            },
            [&](const IterationSchedule::TheorySmoothData& t) {
                const double target =
                    t.delta * std::min(std::pow(t_n, alpha / 2.0), 1.0) / log_factor(t_n, tau);
                return iterations_for(t.params, target);
            },
            [&](const IterationSchedule::TheoryNonsmoothData& t) {
                const double target = t.delta * std::min(t_n, 1.0) / log_factor(t_n, tau);
                return iterations_for(t.params, target);
            },
        },
        schedule.rule);
    if (raw > kMaxInnerIterations) return {kMaxInnerIterations, true};
    return {std::max(raw, 1), false};
}

}  // namespace subdiff

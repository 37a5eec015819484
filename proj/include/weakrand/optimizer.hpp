#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "weakrand/keyrate.hpp"

namespace weakrand {

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
};

struct SolverOptions {
    int grid_points = 9;       // per free axis, endpoints included
    int refine_starts = 10;    // best grid cells refined with Nelder-Mead
    int random_starts = 4;     // extra uniformly drawn starts, driven by seed
    int max_restarts = 3;      // Nelder-Mead restarts at each converged point
    int max_iterations = 500;  // per Nelder-Mead run
    double f_tol = 1e-6;
    double x_tol = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SolverReport {
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    std::size_t restarts = 0;
    std::size_t starts = 0;
    /// Best objective value after the grid phase and after each refined start.
    std::vector<double> best_trace;
};

struct BoxMinimum {
    std::vector<double> point;
    double value = 0.0;
    SolverReport report;
};

using Objective = std::function<double(std::span<const double>)>;

/// Deterministic multi-start minimization of `objective` over a box.
///
/// The objective is evaluated on a full tensor grid (opts.grid_points per
/// axis with non-zero width), then box-projected Nelder-Mead runs start from
/// the best opts.refine_starts grid points plus opts.random_starts seeded
/// uniform points. Zero-width axes are held fixed. The returned value is
/// never above any grid value. Ties are broken by the lexicographically
/// smaller point.
BoxMinimum minimize_box(const Objective& objective, std::span<const Interval> bounds,
                        const SolverOptions& opts = {});

/// Worst-case two-step rate for an observed QBER. The observed basis
/// probability is 1/2 in the standard setting.
struct TwoStepProblem {
    double q_target = 0.0;
    DeviationParams dev;
    double observed_basis_prob = 0.5;

    void validate() const;
};

struct OptimizationResult {
    KeyRateResult min_rate;
    TwoStepScenario argmin;
    SolverReport solver_report;
    double feasibility_residual = 0.0;
};

/// Maximum violation of the worst-case program's constraints by `sc` (0 when
/// feasible): probability bounds, ε bands, p_rec = observed basis
/// probability, the QBER equality and the four cross-basis phase bands.
double two_step_constraint_residual(const TwoStepScenario& sc, const TwoStepProblem& problem);

/// Minimizes the two-step rate over all attacks consistent with the problem.
///
/// Searches (p_λ1, p(x1=0|λ1=0), e_b00, e_b01, e_b10); p(x1=0|λ1=1) and e_b11
/// follow from the two equality constraints and phase errors take their
/// worst case inside the cross-basis band. Throws InfeasibleError when no
/// start reaches the feasible set.
OptimizationResult solve_two_step(const TwoStepProblem& problem, const SolverOptions& opts = {});

}  // namespace weakrand

#include <algorithm>
#include <cmath>
#include <string>

#include "weakrand/errors.hpp"
#include "weakrand/optimizer.hpp"
#include "weakrand/quantum_core.hpp"

namespace weakrand {

namespace {

constexpr double kInfeasiblePenalty = 1e3;
constexpr double kFeasibleTol = 1e-12;
constexpr double kDegenerateWeight = 1e-12;

double distance_to(double x, double lo, double hi) {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
}

Interval basis_band(double eps1) { return {std::max(0.0, 0.5 - eps1), std::min(1.0, 0.5 + eps1)}; }

// Reconstruction of a full attack from the reduced search vector
// v = (p_λ1, p(x1=0|λ1=0), e_b00, e_b01, e_b10).
struct Decoded {
    TwoStepScenario scenario;
    double residual = 0.0;  // how far the eliminated variables sit outside their bounds
};

Decoded decode(std::span<const double> v, const TwoStepProblem& problem) {
    const double a = v[0];
    const double r0 = v[1];
    const double target = problem.observed_basis_prob;
    const Interval band = basis_band(problem.dev.eps1);

    Decoded d;
    TwoStepScenario& sc = d.scenario;
    sc.hv.p_lambda0 = 0.5;
    sc.hv.p_x0_given_l0 = {0.5 + problem.dev.eps0, 0.5 - problem.dev.eps0};
    sc.hv.p_lambda1 = a;

    // p(x1=0|λ1=1) from p_rec = a r0 + (1 − a) r1.
    double r1 = 0.5;
    if (1.0 - a <= kDegenerateWeight) {
        d.residual += std::abs(a * r0 - target);
    } else {
        r1 = (target - a * r0) / (1.0 - a);
        d.residual += distance_to(r1, band.lower, band.upper);
    }
    sc.hv.p_x1_given_l1 = {r0, std::clamp(r1, 0.0, 1.0)};

    auto& eb = sc.bit_error;
    eb[0][kRectilinear] = v[2];
    eb[0][kDiagonal] = v[3];
    eb[1][kRectilinear] = v[4];

    // e_b11 from the QBER equality.
    const BasisWeights w = BasisWeights::from(sc.hv);
    const double rest = problem.q_target - w.rec1 * v[2] - w.dia1 * v[3] - w.rec2 * v[4];
    double e11 = 0.0;
    if (w.dia2 <= kDegenerateWeight) {
        d.residual += std::abs(rest);
    } else {
        e11 = rest / w.dia2;
        d.residual += distance_to(e11, 0.0, 1.0);
    }
    eb[1][kDiagonal] = std::clamp(e11, 0.0, 1.0);

    const double gap = cross_basis_gap(problem.dev.eps0);
    for (int l = 0; l < 2; ++l) {
        for (int b = 0; b < 2; ++b) sc.phase_error[l][b] = worst_phase_error(eb[l][1 - b], gap);
    }
    return d;
}

}  // namespace

void TwoStepProblem::validate() const {
    require_in_range(q_target, 0.0, 0.5, "two-step problem: q_target");
    dev.validate();
    if (!(observed_basis_prob > 0.0 && observed_basis_prob < 1.0)) {
        throw DomainError("two-step problem: observed_basis_prob must lie in (0, 1)", observed_basis_prob);
    }
}

double two_step_constraint_residual(const TwoStepScenario& sc, const TwoStepProblem& problem) {
    double worst = 0.0;
    auto note = [&](double r) { worst = std::max(worst, r); };

    const HiddenVariableModel& hv = sc.hv;
    note(distance_to(hv.p_lambda0, 0.0, 1.0));
    note(distance_to(hv.p_lambda1, 0.0, 1.0));
    for (int i = 0; i < 2; ++i) {
        note(std::max(0.0, std::abs(hv.p_x0_given_l0[i] - 0.5) - problem.dev.eps0));
        note(std::max(0.0, std::abs(hv.p_x1_given_l1[i] - 0.5) - problem.dev.eps1));
        note(distance_to(hv.p_x0_given_l0[i], 0.0, 1.0));
        note(distance_to(hv.p_x1_given_l1[i], 0.0, 1.0));
    }
    for (int l = 0; l < 2; ++l) {
        for (int b = 0; b < 2; ++b) {
            note(distance_to(sc.bit_error[l][b], 0.0, 1.0));
            note(distance_to(sc.phase_error[l][b], 0.0, 1.0));
        }
    }

    const BasisWeights w = BasisWeights::from(hv);
    note(std::abs(w.rec() - problem.observed_basis_prob));
    note(std::abs(w.dia() - (1.0 - problem.observed_basis_prob)));

    const auto& eb = sc.bit_error;
    const double qber = w.rec1 * eb[0][0] + w.rec2 * eb[1][0] + w.dia1 * eb[0][1] + w.dia2 * eb[1][1];
    note(std::abs(qber - problem.q_target));

    const double gap = cross_basis_gap(problem.dev.eps0);
    for (int l = 0; l < 2; ++l) {
        for (int b = 0; b < 2; ++b) note(std::max(0.0, std::abs(sc.phase_error[l][b] - eb[l][1 - b]) - gap));
    }
    return worst;
}

OptimizationResult solve_two_step(const TwoStepProblem& problem, const SolverOptions& opts) {
    problem.validate();
    opts.validate();

    const Interval band = basis_band(problem.dev.eps1);
    const Interval bounds[5] = {{0.0, 1.0}, band, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};

    const Objective objective = [&problem](std::span<const double> v) {
        const Decoded d = decode(v, problem);
        if (d.residual > kFeasibleTol) return kInfeasiblePenalty + d.residual;
        return two_step_breakdown(d.scenario, false, problem.dev).rate;
    };

    const BoxMinimum best = minimize_box(objective, bounds, opts);
    if (best.value >= kInfeasiblePenalty) {
        throw InfeasibleError("two-step: no feasible attack found for q_target = " + std::to_string(problem.q_target),
                              best.value - kInfeasiblePenalty);
    }

    OptimizationResult out;
    out.argmin = decode(best.point, problem).scenario;
    out.min_rate = evaluate_two_step_scenario(out.argmin, true, problem.dev);
    out.solver_report = best.report;
    out.feasibility_residual = two_step_constraint_residual(out.argmin, problem);
    return out;
}

}  // namespace weakrand

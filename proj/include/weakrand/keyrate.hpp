#pragma once

// Closed-form secret-key-rate calculators.
//
//  * strong randomness: R = p·S(a|E) − f·h(e)
//  * one-step weak randomness: R = 1 − h(e_bit + δ) − h(e_bit),
//        δ = max(1/2 − √(1/4 − ε0²), 2ε1)
//  * two-step weak randomness: rectilinear and diagonal sifted keys are
//    post-processed separately and the rates of the two bases add up.

#include <array>
#include <map>
#include <string>

namespace weakrand {

/// Bounds on how far Eve's hidden variables can bias Alice's choices:
/// |p(x0|λ0) − 1/2| ≤ eps0 (bit value), |p(x1|λ1) − 1/2| ≤ eps1 (basis).
struct DeviationParams {
    double eps0 = 0.0;
    double eps1 = 0.0;

    void validate() const;
};

struct StrongRandomnessInputs {
    double p_valid = 1.0;      // fraction of counts Eve cannot control
    double s_a_given_e = 1.0;  // conditional entropy S(a|E), bits
    double f_ec = 1.0;         // error-correction inefficiency, >= 1
    double e_obs = 0.0;        // observed bit error rate

    void validate() const;
};

/// Two-valued hidden variables λ0 (bit value) and λ1 (basis). All entries
/// are probabilities of the 0 outcome.
struct HiddenVariableModel {
    double p_lambda0 = 0.5;
    double p_lambda1 = 0.5;
    std::array<double, 2> p_x0_given_l0{0.5, 0.5};
    std::array<double, 2> p_x1_given_l1{0.5, 0.5};

    void validate() const;

    /// Observable marginals p(x0 = 0) and p(x1 = 0).
    double p_x0_zero() const;
    double p_x1_zero() const;

    /// True when every conditional probability lies inside its ε band (with tol slack).
    bool within(const DeviationParams& dev, double tol = 1e-12) const;

    static HiddenVariableModel balanced() { return {}; }
};

/// Joint probabilities of (λ1, Alice's basis).
struct BasisWeights {
    double rec1 = 0.0;  // λ1 = 0, rectilinear
    double rec2 = 0.0;  // λ1 = 1, rectilinear
    double dia1 = 0.0;  // λ1 = 0, diagonal
    double dia2 = 0.0;  // λ1 = 1, diagonal

    double rec() const { return rec1 + rec2; }
    double dia() const { return dia1 + dia2; }

    static BasisWeights from(const HiddenVariableModel& hv);
};

constexpr int kRectilinear = 0;
constexpr int kDiagonal = 1;

/// Full bookkeeping for one two-step attack. Error arrays are indexed
/// [λ1][basis] with basis 0 = rectilinear, 1 = diagonal, so bit_error[1][0]
/// is e_b10.
struct TwoStepScenario {
    HiddenVariableModel hv;
    std::array<std::array<double, 2>, 2> bit_error{};
    std::array<std::array<double, 2>, 2> phase_error{};

    void validate() const;
};

struct KeyRateResult {
    double rate = 0.0;
    double rate_clamped = 0.0;
    std::map<std::string, double> diagnostics;

    static KeyRateResult from_rate(double rate);
};

/// 1/2 − √(1/4 − ε0²): largest gap between a phase error rate in one basis
/// and the bit error rate in the other.
double cross_basis_gap(double eps0);

/// The point of [cross − gap, cross + gap] ∩ [0, 1] closest to 1/2, i.e. the
/// phase error rate that hurts the key rate most.
double worst_phase_error(double cross_bit_error, double gap);

KeyRateResult strong_randomness_rate(const StrongRandomnessInputs& in);

/// δ = max(1/2 − √(1/4 − ε0²), 2ε1).
double one_step_delta(const DeviationParams& dev);

/// 1 − h(min(q_bit + δ, 1/2)) − h(q_bit); q_bit must lie in [0, 1/2].
KeyRateResult one_step_rate(double q_bit, const DeviationParams& dev);

/// Aggregated quantities for a two-step scenario.
struct TwoStepBreakdown {
    BasisWeights weights;
    double gap = 0.0;
    double e_recbit = 0.0;
    double e_recpha = 0.0;
    double e_diabit = 0.0;
    double e_diapha = 0.0;
    double rec_term = 0.0;
    double dia_term = 0.0;
    double rate = 0.0;
    std::array<std::array<double, 2>, 2> phase_error{};  // phases actually used
};

/// Evaluates p_rec(1 − h(e_recbit) − h(e_recpha)) + p_dia(1 − h(e_diabit) − h(e_diapha)).
///
/// With use_worst_phase the stored phase errors are replaced by their worst
/// case inside the cross-basis band; otherwise they must satisfy
/// |e_p(λ1,b) − e_b(λ1,1−b)| ≤ cross_basis_gap(eps0) + 1e-9 or InfeasibleError
/// is thrown. A basis with zero probability contributes 0.
TwoStepBreakdown two_step_breakdown(const TwoStepScenario& sc, bool use_worst_phase,
                                    const DeviationParams& dev);

KeyRateResult evaluate_two_step_scenario(const TwoStepScenario& sc, bool use_worst_phase,
                                         const DeviationParams& dev);

}  // namespace weakrand

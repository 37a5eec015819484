#include "weakrand/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "weakrand/errors.hpp"
#include "weakrand/quantum_core.hpp"

namespace weakrand {

namespace {

constexpr double kBandTol = 1e-9;

double conditional_average(double w1, double e1, double w2, double e2) {
    const double total = w1 + w2;
    if (total <= 0.0) return 0.0;
    return (w1 * e1 + w2 * e2) / total;
}

}  // namespace

void DeviationParams::validate() const {
    require_in_range(eps0, 0.0, 0.5, "DeviationParams: eps0");
    require_in_range(eps1, 0.0, 0.5, "DeviationParams: eps1");
}

void StrongRandomnessInputs::validate() const {
    require_probability(p_valid, "strong randomness: p_valid");
    require_probability(s_a_given_e, "strong randomness: s_a_given_e");
    if (!(f_ec >= 1.0) || !std::isfinite(f_ec)) {
        throw DomainError("strong randomness: f_ec must be a finite value >= 1", f_ec);
    }
    require_probability(e_obs, "strong randomness: e_obs");
}

void HiddenVariableModel::validate() const {
    require_probability(p_lambda0, "hidden variables: p_lambda0");
    require_probability(p_lambda1, "hidden variables: p_lambda1");
    for (int i = 0; i < 2; ++i) {
        require_probability(p_x0_given_l0[i], "hidden variables: p_x0_given_l0[" + std::to_string(i) + "]");
        require_probability(p_x1_given_l1[i], "hidden variables: p_x1_given_l1[" + std::to_string(i) + "]");
    }
}

double HiddenVariableModel::p_x0_zero() const {
    return p_lambda0 * p_x0_given_l0[0] + (1.0 - p_lambda0) * p_x0_given_l0[1];
}

double HiddenVariableModel::p_x1_zero() const {
    return p_lambda1 * p_x1_given_l1[0] + (1.0 - p_lambda1) * p_x1_given_l1[1];
}

bool HiddenVariableModel::within(const DeviationParams& dev, double tol) const {
    for (int i = 0; i < 2; ++i) {
        if (std::abs(p_x0_given_l0[i] - 0.5) > dev.eps0 + tol) return false;
        if (std::abs(p_x1_given_l1[i] - 0.5) > dev.eps1 + tol) return false;
    }
    return true;
}

BasisWeights BasisWeights::from(const HiddenVariableModel& hv) {
    const double l0 = hv.p_lambda1;
    const double l1 = 1.0 - hv.p_lambda1;
    return {l0 * hv.p_x1_given_l1[0], l1 * hv.p_x1_given_l1[1], l0 * (1.0 - hv.p_x1_given_l1[0]),
            l1 * (1.0 - hv.p_x1_given_l1[1])};
}

void TwoStepScenario::validate() const {
    hv.validate();
    for (int l = 0; l < 2; ++l) {
        for (int b = 0; b < 2; ++b) {
            const std::string idx = std::to_string(l) + std::to_string(b);
            require_probability(bit_error[l][b], "scenario: e_b" + idx);
            require_probability(phase_error[l][b], "scenario: e_p" + idx);
        }
    }
}

KeyRateResult KeyRateResult::from_rate(double rate) {
    KeyRateResult r;
    r.rate = rate;
    r.rate_clamped = std::max(0.0, rate);
    return r;
}

double cross_basis_gap(double eps0) {
    require_in_range(eps0, 0.0, 0.5, "cross_basis_gap: eps0");
    return 0.5 - std::sqrt(0.25 - eps0 * eps0);
}

double worst_phase_error(double cross_bit_error, double gap) {
    const double lo = std::max(0.0, cross_bit_error - gap);
    const double hi = std::min(1.0, cross_bit_error + gap);
    return std::clamp(0.5, lo, hi);
}

KeyRateResult strong_randomness_rate(const StrongRandomnessInputs& in) {
    in.validate();
    const double h = binary_entropy(in.e_obs);
    KeyRateResult r = KeyRateResult::from_rate(in.p_valid * in.s_a_given_e - in.f_ec * h);
    r.diagnostics["h_e_obs"] = h;
    r.diagnostics["privacy_term"] = in.p_valid * in.s_a_given_e;
    r.diagnostics["error_correction_term"] = in.f_ec * h;
    return r;
}

double one_step_delta(const DeviationParams& dev) {
    dev.validate();
    return std::max(cross_basis_gap(dev.eps0), 2.0 * dev.eps1);
}

KeyRateResult one_step_rate(double q_bit, const DeviationParams& dev) {
    require_in_range(q_bit, 0.0, 0.5, "one_step_rate: q_bit");
    const double delta = one_step_delta(dev);
    const double phase = std::min(q_bit + delta, 0.5);
    const double h_bit = binary_entropy(q_bit);
    const double h_phase = binary_entropy(phase);
    KeyRateResult r = KeyRateResult::from_rate(1.0 - h_phase - h_bit);
    r.diagnostics["delta"] = delta;
    r.diagnostics["e_bit"] = q_bit;
    r.diagnostics["e_phase"] = phase;
    r.diagnostics["h_bit"] = h_bit;
    r.diagnostics["h_phase"] = h_phase;
    return r;
}

TwoStepBreakdown two_step_breakdown(const TwoStepScenario& sc, bool use_worst_phase,
                                    const DeviationParams& dev) {
    sc.validate();
    dev.validate();

    TwoStepBreakdown out;
    out.weights = BasisWeights::from(sc.hv);
    out.gap = cross_basis_gap(dev.eps0);
    const auto& eb = sc.bit_error;

    // The phase error in one basis is tied to the bit error of the other basis
    // under the same λ1.
    for (int l = 0; l < 2; ++l) {
        for (int b = 0; b < 2; ++b) {
            const double cross = eb[l][1 - b];
            if (use_worst_phase) {
                out.phase_error[l][b] = worst_phase_error(cross, out.gap);
            } else {
                const double stored = sc.phase_error[l][b];
                const double excess = std::abs(stored - cross) - out.gap;
                if (excess > kBandTol) {
                    throw InfeasibleError("scenario: phase error e_p" + std::to_string(l) + std::to_string(b) +
                                              " lies outside the cross-basis band",
                                          excess);
                }
                out.phase_error[l][b] = stored;
            }
        }
    }
    const auto& ep = out.phase_error;
    const BasisWeights& w = out.weights;

    out.e_recbit = conditional_average(w.rec1, eb[0][kRectilinear], w.rec2, eb[1][kRectilinear]);
    out.e_diabit = conditional_average(w.dia1, eb[0][kDiagonal], w.dia2, eb[1][kDiagonal]);
    out.e_recpha = conditional_average(w.rec1, ep[0][kRectilinear], w.rec2, ep[1][kRectilinear]);
    out.e_diapha = conditional_average(w.dia1, ep[0][kDiagonal], w.dia2, ep[1][kDiagonal]);

    const double p_rec = w.rec();
    const double p_dia = w.dia();
    out.rec_term = p_rec > 0.0 ? p_rec * (1.0 - binary_entropy(out.e_recbit) - binary_entropy(out.e_recpha)) : 0.0;
    out.dia_term = p_dia > 0.0 ? p_dia * (1.0 - binary_entropy(out.e_diabit) - binary_entropy(out.e_diapha)) : 0.0;
    out.rate = out.rec_term + out.dia_term;
    return out;
}

KeyRateResult evaluate_two_step_scenario(const TwoStepScenario& sc, bool use_worst_phase,
                                         const DeviationParams& dev) {
    const TwoStepBreakdown b = two_step_breakdown(sc, use_worst_phase, dev);
    KeyRateResult r = KeyRateResult::from_rate(b.rate);
    auto& d = r.diagnostics;
    d["delta0"] = b.gap;
    d["p_rec"] = b.weights.rec();
    d["p_dia"] = b.weights.dia();
    d["e_recbit"] = b.e_recbit;
    d["e_recpha"] = b.e_recpha;
    d["e_diabit"] = b.e_diabit;
    d["e_diapha"] = b.e_diapha;
    d["h_recbit"] = binary_entropy(b.e_recbit);
    d["h_recpha"] = binary_entropy(b.e_recpha);
    d["h_diabit"] = binary_entropy(b.e_diabit);
    d["h_diapha"] = binary_entropy(b.e_diapha);
    d["rec_term"] = b.rec_term;
    d["dia_term"] = b.dia_term;
    return r;
}

}  // namespace weakrand

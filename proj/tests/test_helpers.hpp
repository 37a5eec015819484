#pragma once

#include <random>

#include "weakrand/quantum_core.hpp"

namespace weakrand::testing {

// Reference values evaluated with 40-digit arithmetic (mpmath) and frozen.
inline constexpr double kH002 = 0.14144054254182064515;           // h(0.02)
inline constexpr double kOneMinus2H002 = 0.71711891491635870969;  // 1 − 2h(0.02)
inline constexpr double kGap01 = 0.01010205144336438036;          // 1/2 − √0.24
inline constexpr double kOneStepEps0 = 0.66365607458319982524;    // 1 − h(0.02 + gap) − h(0.02)
inline constexpr double kStrongExample = 0.25855945745817935485;  // 0.4 − h(0.02)
inline constexpr double kOneMinusH004 = 0.75770781091758523845;   // 1 − h(0.04)
inline constexpr double kOneStepEps1 = 0.09839195449621376211;    // 1 − h(0.22) − h(0.02)
inline constexpr double kTwoStepEps1 = 0.66416759962660319398;    // 1 − h(0.02) − h(0.03)
inline constexpr double kOneStepRoot = 0.03415449118352392255;    // zero of 1 − h(e + 0.2) − h(e)

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline PauliChannel random_channel(std::mt19937_64& rng) {
    std::exponential_distribution<double> ex(1.0);
    double w[4];
    double sum = 0.0;
    for (double& x : w) sum += (x = ex(rng));
    return {w[0] / sum, w[1] / sum, w[2] / sum, 1.0 - (w[0] + w[1] + w[2]) / sum};
}

// Random full-rank density matrix A A† / tr(A A†).
inline TwoQubitState random_state(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix4 a;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) a(r, c) = Complex(g(rng), g(rng));
    }
    Matrix4 rho = a * a.adjoint();
    rho /= rho.trace();
    rho = 0.5 * (rho + rho.adjoint());
    return TwoQubitState(rho);
}

}  // namespace weakrand::testing

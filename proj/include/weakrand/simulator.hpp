#pragma once

// Pulse-level Monte Carlo of BB84 with hidden-variable-biased bit and basis
// choices, a Pauli channel on Bob's qubit, and an optional intercept-resend
// attacker who exploits knowledge of λ1.
//
// Each pulse consumes exactly kVariatesPerPulse uniforms drawn from its own
// SplitMix64 position, so results depend only on (config, seed) and not on
// how pulses are batched.
//
// The channel is a single fixed Pauli channel for every (λ0, λ1). The
// worst-case key-rate optimizer instead lets Eve pick error rates per λ1;
// the simulator does not model that extra freedom.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "weakrand/keyrate.hpp"
#include "weakrand/optimizer.hpp"
#include "weakrand/quantum_core.hpp"

namespace weakrand {

enum class Attacker { None, InterceptResendWithHints };

std::string to_string(Attacker a);
Attacker attacker_from_string(const std::string& name);

struct SimConfig {
    std::uint64_t n_pulses = 1;
    HiddenVariableModel hv;
    PauliChannel channel;
    double bob_basis_prob = 0.5;  // probability Bob measures rectilinear
    Attacker attacker = Attacker::None;
    std::uint64_t seed = 0;

    void validate() const;
};

/// A qubit in flight: BB84 state `bit` in `basis` (0 rectilinear, 1 diagonal).
struct Bb84Qubit {
    int basis = 0;
    int bit = 0;
};

struct PulseRecord {
    int lambda0 = 0;
    int lambda1 = 0;
    int x0 = 0;  // encoded bit
    int x1 = 0;  // Alice's basis
    int y = 0;   // Bob's basis
    std::optional<int> bob_bit;
    bool sifted = false;
    std::optional<int> eve_guess;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

struct SimReport {
    std::uint64_t n_pulses = 0;
    std::uint64_t sifted_count = 0;
    Estimate qber;
    Estimate qber_rec;
    Estimate qber_dia;
    std::uint64_t sifted_rec = 0;
    std::uint64_t sifted_dia = 0;
    Estimate x0_zero_fraction;  // over all pulses
    std::optional<Estimate> eve_agreement;
    std::optional<KeyRateResult> one_step_rate;
    std::optional<KeyRateResult> two_step_rate;
};

/// Probability that a matched-basis measurement reads the wrong bit, from the
/// Pauli weights: q10 + q11 (rectilinear), q01 + q11 (diagonal).
double matched_basis_flip_probability(const PauliChannel& channel, int basis);

/// Same quantity by explicit single-qubit density-matrix evolution of the
/// prepared BB84 state and projection onto the orthogonal outcome.
double matched_basis_flip_probability_full(const PauliChannel& channel, int basis, int bit);

/// Eve measures in the basis Alice more likely uses given λ1 (rectilinear on
/// ties) and resends her outcome. `alice_p_rect` is p(x1=0|λ1) for the
/// pulse; `coin` decides the outcome when her basis is wrong.
struct InterceptOutcome {
    Bb84Qubit resent;
    int eve_guess = 0;
};
InterceptOutcome intercept_resend_with_hints(const Bb84Qubit& sent, double alice_p_rect, double coin);

/// Fraction of sifted records with bob_bit != x0, with binomial standard
/// error √(p(1−p)/n). Throws InsufficientDataError without sifted records.
Estimate estimate_qber(std::span<const PulseRecord> records);

using PulseSink = std::function<void(std::uint64_t index, const PulseRecord&)>;

struct SimulateOptions {
    bool derive_rates = true;
    SolverOptions solver;
};

/// Runs cfg.n_pulses pulses. `sink`, when set, receives every record in order.
SimReport simulate(const SimConfig& cfg, const PulseSink& sink = {}, const SimulateOptions& opts = {});

/// The single pulse at `index`; simulate() is equivalent to calling this for
/// every index.
PulseRecord simulate_pulse(const SimConfig& cfg, std::uint64_t index);

}  // namespace weakrand

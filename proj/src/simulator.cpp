#include "weakrand/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "weakrand/errors.hpp"
#include "weakrand/rng.hpp"

namespace weakrand {

namespace {

constexpr std::uint64_t kVariatesPerPulse = 8;

Estimate binomial(std::uint64_t hits, std::uint64_t n) {
    Estimate e;
    e.samples = n;
    if (n == 0) return e;
    e.value = static_cast<double>(hits) / static_cast<double>(n);
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
    return e;
}

// Pauli X^u Z^v applied to a BB84 state: X flips rectilinear bits, Z flips
// diagonal bits, and each leaves the other basis unchanged up to phase.
Bb84Qubit apply_pauli(Bb84Qubit q, int u, int v) {
    if (q.basis == kRectilinear) {
        q.bit ^= u;
    } else {
        q.bit ^= v;
    }
    return q;
}

int measure(const Bb84Qubit& q, int basis, double coin) {
    if (q.basis == basis) return q.bit;
    return coin < 0.5 ? 0 : 1;
}

Eigen::Vector2cd bb84_ket(int basis, int bit) {
    Eigen::Vector2cd ket = Eigen::Vector2cd::Zero();
    ket(bit) = 1.0;
    if (basis == kDiagonal) ket = hadamard() * ket;
    return ket;
}

}  // namespace

std::string to_string(Attacker a) {
    return a == Attacker::None ? "none" : "intercept_resend_with_hints";
}

Attacker attacker_from_string(const std::string& name) {
    if (name == "none") return Attacker::None;
    if (name == "intercept_resend_with_hints" || name == "intercept-resend") return Attacker::InterceptResendWithHints;
    throw ValidationError("unknown attacker '" + name + "'");
}

void SimConfig::validate() const {
    if (n_pulses < 1) throw ValidationError("simulation: n_pulses must be >= 1");
    hv.validate();
    channel.validate();
    require_probability(bob_basis_prob, "simulation: bob_basis_prob");
}

double matched_basis_flip_probability(const PauliChannel& channel, int basis) {
    channel.validate();
    return basis == kRectilinear ? channel.q10 + channel.q11 : channel.q01 + channel.q11;
}

double matched_basis_flip_probability_full(const PauliChannel& channel, int basis, int bit) {
    channel.validate();
    const Eigen::Vector2cd sent = bb84_ket(basis, bit);
    const Eigen::Vector2cd wrong = bb84_ket(basis, 1 - bit);
    const Matrix2 rho = sent * sent.adjoint();
    Matrix2 out = Matrix2::Zero();
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            const Matrix2 op = pauli_operator(u, v);
            out += channel.weight(u, v) * (op * rho * op.adjoint());
        }
    }
    return (wrong.adjoint() * out * wrong)(0, 0).real();
}

InterceptOutcome intercept_resend_with_hints(const Bb84Qubit& sent, double alice_p_rect, double coin) {
    const int eve_basis = alice_p_rect >= 0.5 ? kRectilinear : kDiagonal;
    const int outcome = measure(sent, eve_basis, coin);
    return {{eve_basis, outcome}, outcome};
}

Estimate estimate_qber(std::span<const PulseRecord> records) {
    std::uint64_t sifted = 0;
    std::uint64_t errors = 0;
    for (const PulseRecord& r : records) {
        if (!r.sifted || !r.bob_bit) continue;
        ++sifted;
        if (*r.bob_bit != r.x0) ++errors;
    }
    if (sifted == 0) throw InsufficientDataError("estimate_qber: no sifted records");
    return binomial(errors, sifted);
}

PulseRecord simulate_pulse(const SimConfig& cfg, std::uint64_t index) {
    SplitMix64 rng(cfg.seed, index * kVariatesPerPulse);
    double u[kVariatesPerPulse];
    for (double& x : u) x = rng.uniform();

    const HiddenVariableModel& hv = cfg.hv;
    PulseRecord r;
    r.lambda0 = u[0] < hv.p_lambda0 ? 0 : 1;
    r.lambda1 = u[1] < hv.p_lambda1 ? 0 : 1;
    r.x0 = u[2] < hv.p_x0_given_l0[r.lambda0] ? 0 : 1;
    const double p_rect = hv.p_x1_given_l1[r.lambda1];
    r.x1 = u[3] < p_rect ? kRectilinear : kDiagonal;

    Bb84Qubit qubit{r.x1, r.x0};
    if (cfg.attacker == Attacker::InterceptResendWithHints) {
        const InterceptOutcome eve = intercept_resend_with_hints(qubit, p_rect, u[6]);
        qubit = eve.resent;
        r.eve_guess = eve.eve_guess;
    }

    const PauliChannel& ch = cfg.channel;
    const double draw = u[4];
    int pu = 1, pv = 1;
    if (draw < ch.q00) {
        pu = 0, pv = 0;
    } else if (draw < ch.q00 + ch.q01) {
        pu = 0, pv = 1;
    } else if (draw < ch.q00 + ch.q01 + ch.q10) {
        pu = 1, pv = 0;
    }
    qubit = apply_pauli(qubit, pu, pv);

    r.y = u[5] < cfg.bob_basis_prob ? kRectilinear : kDiagonal;
    r.bob_bit = measure(qubit, r.y, u[7]);
    r.sifted = r.x1 == r.y;
    return r;
}

SimReport simulate(const SimConfig& cfg, const PulseSink& sink, const SimulateOptions& opts) {
    cfg.validate();

    std::uint64_t sifted[2] = {0, 0};
    std::uint64_t errors[2] = {0, 0};
    std::uint64_t x0_zero = 0;
    std::uint64_t eve_agree = 0;

    for (std::uint64_t i = 0; i < cfg.n_pulses; ++i) {
        const PulseRecord r = simulate_pulse(cfg, i);
        if (sink) sink(i, r);
        if (r.x0 == 0) ++x0_zero;
        if (!r.sifted) continue;
        ++sifted[r.x1];
        if (*r.bob_bit != r.x0) ++errors[r.x1];
        if (r.eve_guess && *r.eve_guess == r.x0) ++eve_agree;
    }

    SimReport rep;
    rep.n_pulses = cfg.n_pulses;
    rep.sifted_rec = sifted[kRectilinear];
    rep.sifted_dia = sifted[kDiagonal];
    rep.sifted_count = sifted[0] + sifted[1];
    rep.qber = binomial(errors[0] + errors[1], rep.sifted_count);
    rep.qber_rec = binomial(errors[kRectilinear], sifted[kRectilinear]);
    rep.qber_dia = binomial(errors[kDiagonal], sifted[kDiagonal]);
    rep.x0_zero_fraction = binomial(x0_zero, cfg.n_pulses);
    if (cfg.attacker != Attacker::None) rep.eve_agreement = binomial(eve_agree, rep.sifted_count);

    if (opts.derive_rates && rep.sifted_count > 0 && rep.qber.value <= 0.5) {
        const HiddenVariableModel& hv = cfg.hv;
        DeviationParams dev;
        for (int i = 0; i < 2; ++i) {
            dev.eps0 = std::max(dev.eps0, std::abs(hv.p_x0_given_l0[i] - 0.5));
            dev.eps1 = std::max(dev.eps1, std::abs(hv.p_x1_given_l1[i] - 0.5));
        }
        rep.one_step_rate = one_step_rate(rep.qber.value, dev);
        const double observed = hv.p_x1_zero();
        if (observed > 0.0 && observed < 1.0) {
            rep.two_step_rate = solve_two_step({rep.qber.value, dev, observed}, opts.solver).min_rate;
        }
    }
    return rep;
}

}  // namespace weakrand
